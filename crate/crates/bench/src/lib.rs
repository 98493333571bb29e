//! Inputs shared by the benchmarks in `benches/`.

use wcalc_core::{gevrey, q_gevrey, LogSequence};

/// The builtin families at horizon `j`: Gevrey 1, 2, 3 and q-Gevrey 2.
pub fn builtins(j: usize) -> Vec<(&'static str, LogSequence)> {
    vec![
        ("gevrey1", gevrey(1.0, j).unwrap()),
        ("gevrey2", gevrey(2.0, j).unwrap()),
        ("gevrey3", gevrey(3.0, j).unwrap()),
        ("qgevrey2", q_gevrey(2.0, j).unwrap()),
    ]
}
