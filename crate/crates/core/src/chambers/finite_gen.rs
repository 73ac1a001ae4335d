use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::orders::adjoint_pairs;
use crate::error::{Error, Result};
use crate::exactla::{PolyCone, QVec};
use crate::toric::divisor::TDivisor;
use crate::toric::pair::Pair;

const MAX_DIM: usize = 5;
const BOX_CAP: usize = 100_000;

/// The cone `{(t, m) : t ≥ 0, m ∈ P_{Σ t_i D_i}}`; its lattice points index the monomials of the
/// multigraded section ring.
pub fn adjoint_cone(ds: &[TDivisor], p: &Pair) -> Result<PolyCone> {
    if ds.is_empty() {
        return Err(Error::Precondition("empty divisor list".into()));
    }
    adjoint_pairs(ds, p)
}

/// Hilbert basis of a pointed rational cone with a finite-generation check.
#[derive(Clone, Debug)]
pub struct HilbertWitness {
    pub cone: PolyCone,
    pub basis: Vec<QVec>,
}

impl HilbertWitness {
    pub fn of_cone(cone: &PolyCone) -> Result<HilbertWitness> {
        if cone.dim > MAX_DIM {
            return Err(Error::Unsupported(format!("lattice dimension {} exceeds {MAX_DIM}", cone.dim)));
        }
        if !cone.is_pointed() {
            return Err(Error::Unsupported("cone has lineality".into()));
        }
        let rays: Vec<QVec> = cone.rays.iter().map(|r| r.primitive()).collect();
        let integral = PolyCone::from_generators(cone.dim, &rays)?;
        let mut basis = integral.hilbert_basis(BOX_CAP)?;
        basis.sort();
        Ok(HilbertWitness { cone: integral, basis })
    }

    /// Writes a lattice point of the cone as a sum of basis elements (indices, with repetition).
    pub fn decompose(&self, x: &QVec) -> Option<Vec<usize>> {
        if !x.is_integral() || !self.cone.contains(x) {
            return None;
        }
        let mut dead: BTreeSet<QVec> = BTreeSet::new();
        let mut out = Vec::new();
        if self.walk(x, &mut dead, &mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn walk(&self, x: &QVec, dead: &mut BTreeSet<QVec>, out: &mut Vec<usize>) -> bool {
        if x.is_zero() {
            return true;
        }
        if dead.contains(x) {
            return false;
        }
        for (i, h) in self.basis.iter().enumerate() {
            let rest = x - h;
            if self.cone.contains(&rest) {
                out.push(i);
                if self.walk(&rest, dead, out) {
                    return true;
                }
                out.pop();
            }
        }
        dead.insert(x.clone());
        false
    }

    /// A random lattice point of the cone: an integer point of a box, kept if it lies in the cone.
    pub fn random_point(&self, rng: &mut ChaCha8Rng, radius: i64) -> QVec {
        loop {
            let x: Vec<i64> = (0..self.cone.dim).map(|_| rng.gen_range(-radius..=radius)).collect();
            let q = QVec::from_ints(&x);
            if self.cone.contains(&q) && !q.is_zero() {
                return q;
            }
        }
    }
}

/// Generators of the section ring of `D_1, ..., D_k` as a semigroup algebra.
pub fn hilbert_basis_witness(ds: &[TDivisor], p: &Pair) -> Result<HilbertWitness> {
    HilbertWitness::of_cone(&adjoint_cone(ds, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn plane_cone() {
        let c = PolyCone::from_generators(2, &[QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 2])]).unwrap();
        let w = HilbertWitness::of_cone(&c).unwrap();
        assert_eq!(w.basis, vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 1]), QVec::from_ints(&[1, 2])]);
        let u = PolyCone::from_generators(2, &[QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 1])]).unwrap();
        assert_eq!(HilbertWitness::of_cone(&u).unwrap().basis.len(), 2);
    }

    #[test]
    fn plane_sections() {
        let p = gallery::p2();
        let w = hilbert_basis_witness(&[TDivisor::from_ints(&[0, 0, 1])], &p).unwrap();
        assert_eq!(w.basis.len(), 3);
        assert!(w.basis.iter().all(|b| b[0] == crate::exactla::rat::int(1)));
        let mut rng = gallery::rng(5);
        for _ in 0..200 {
            let x = w.random_point(&mut rng, 4);
            let parts = w.decompose(&x).unwrap();
            let sum = parts.iter().fold(QVec::zeros(3), |acc, &i| &acc + &w.basis[i]);
            assert_eq!(sum, x);
        }
    }
}
