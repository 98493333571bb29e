use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use wcalc_bench::builtins;
use wcalc_core::{
    assoc_sequence, check_mg, check_tilde_dom, convolve, convolve_by_min, decide_inclusion, gevrey, lc_minorant,
    OmegaEvaluator, SpaceSpec, SystemKind, ThetaFunction, ThetaKind, Weight,
};

fn omega(c: &mut Criterion) {
    let mut group = c.benchmark_group("omega");
    for (name, m) in builtins(512) {
        let eval = OmegaEvaluator::new(&m);
        let ts = eval.default_grid(64).unwrap().abscissae();
        group.bench_function(BenchmarkId::new("grid64", name), |b| {
            b.iter(|| ts.iter().map(|&t| eval.omega(black_box(t)).unwrap()).sum::<f64>())
        });
    }
    group.finish();
}

fn sequences(c: &mut Criterion) {
    let mut group = c.benchmark_group("sequence");
    for j in [128, 512, 2048] {
        let m = gevrey(1.5, j).unwrap();
        group.bench_with_input(BenchmarkId::new("lc_minorant", j), &m, |b, m| b.iter(|| lc_minorant(m)));
        group.bench_with_input(BenchmarkId::new("convolve_merge", j), &m, |b, m| {
            b.iter(|| convolve(m, m).unwrap())
        });
    }
    let m = gevrey(1.5, 512).unwrap();
    group.bench_function("convolve_min/512", |b| b.iter(|| convolve_by_min(&m, &m).unwrap()));
    group.bench_function("check_mg/512", |b| b.iter(|| check_mg(&m).unwrap()));
    let n = gevrey(1.0, 512).unwrap();
    group.bench_function("check_tilde_dom/512", |b| b.iter(|| check_tilde_dom(&m, &n).unwrap()));
    group.finish();
}

fn weights(c: &mut Criterion) {
    let mut group = c.benchmark_group("assoc_sequence");
    group.sample_size(10);
    let m = gevrey(1.0, 512).unwrap();
    group.bench_function("v_m/511", |b| b.iter(|| assoc_sequence(&Weight::v_m(&m), 511).unwrap()));
    group.bench_function("exp_power/512", |b| {
        b.iter(|| assoc_sequence(&Weight::exp_power(1.0, 1.0).unwrap(), 512).unwrap())
    });
    group.finish();
}

fn spaces(c: &mut Criterion) {
    let mut group = c.benchmark_group("spaces");
    let m = gevrey(1.0, 512).unwrap();
    let theta = ThetaFunction::new(&m, ThetaKind::Dilated(1.0)).unwrap();
    group.bench_function("theta_eval/t=100", |b| b.iter(|| theta.eval(black_box(100.0)).unwrap()));
    let fam = builtins(512);
    group.bench_function("inclusion_matrix/exponential", |b| {
        b.iter(|| {
            for (_, x) in &fam {
                for (_, y) in &fam {
                    let s = SystemKind::ExponentialInductive;
                    let d = decide_inclusion(&SpaceSpec::sequence(x.clone(), s), &SpaceSpec::sequence(y.clone(), s));
                    black_box(d.unwrap());
                }
            }
        })
    });
    group.finish();
}

criterion_group!(benches, omega, sequences, weights, spaces);
criterion_main!(benches);
