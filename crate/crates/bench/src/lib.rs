//! Fixed instances shared by the benchmarks.

use mmp_core::gallery;
use mmp_core::{Pair, TDivisor};

/// F₁ with the scaling divisor of its two-step run.
pub fn f1_run() -> (Pair, TDivisor) {
    (gallery::f1(), TDivisor::from_ints(&[0, 0, 1, 3]))
}

/// The quadric flip over the cone.
pub fn quadric_flip() -> (Pair, TDivisor) {
    let mut d = TDivisor::zero(4);
    d.coeffs[0] = mmp_core::exactla::rat::rat(1, 2);
    (gallery::quadric_resolution(1, d).expect("static pair"), TDivisor::from_ints(&[0, 1, 0, 0]))
}

pub fn f1_times_p1() -> (Pair, TDivisor) {
    (gallery::f1_times_p1(), TDivisor::from_ints(&[0, 0, 1, 3, 0, 0]))
}
