#![allow(dead_code)]

use mmp_core::cones::NumSpace;
use mmp_core::exactla::rat::{ceil, int};
use mmp_core::mmp::nef_threshold;
use mmp_core::{Pair, Rat, TDivisor};
use num::{Integer, One};

/// An integral ample divisor: the sum of the nef cone's extremal rays, cleared of denominators.
pub fn ample(p: &Pair) -> TDivisor {
    let ns = NumSpace::build(p).unwrap();
    let x = ns.nef_cone().relint_point();
    let d = ns.divisor_with_class(&x);
    let den = d.coeffs.iter().fold(num::BigInt::one(), |acc, c| acc.lcm(c.denom()));
    d.scale(&Rat::from_integer(den))
}

/// A scaling divisor `cH` with `K + Δ + cH` nef and `c` a positive integer.
pub fn scaling(p: &Pair) -> TDivisor {
    let h = ample(p);
    let l = nef_threshold(p, &h).unwrap();
    let c = std::cmp::max(ceil(&l), int(1));
    h.scale(&c)
}

/// Seeds of the generated instance family used across suites.
pub fn instances(n: u64) -> Vec<Pair> {
    (0..n).map(|s| mmp_core::gallery::random_pair(s, 4, 6)).collect()
}

pub fn one() -> Rat {
    int(1)
}
