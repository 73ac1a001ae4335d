use std::collections::BTreeSet;

use crate::cones::NumSpace;
use crate::error::{Error, Result};
use crate::exactla::rat::int;
use crate::exactla::{Polyhedron, QVec, Rat};
use crate::toric::divisor::TDivisor;
use crate::toric::pair::Pair;

/// The real span of distinct prime divisors `S_1, ..., S_p`, in coordinates `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSpan {
    pub n_rays: usize,
    pub basis: Vec<usize>,
}

impl DivisorSpan {
    pub fn new(n_rays: usize, basis: Vec<usize>) -> Result<DivisorSpan> {
        let distinct: BTreeSet<usize> = basis.iter().copied().collect();
        if distinct.len() != basis.len() {
            return Err(Error::Precondition("span basis repeats a prime divisor".into()));
        }
        if let Some(&i) = basis.iter().find(|&&i| i >= n_rays) {
            return Err(Error::Precondition(format!("ray {i} out of range")));
        }
        Ok(DivisorSpan { n_rays, basis })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `Σ b_i S_i`.
    pub fn divisor(&self, b: &QVec) -> TDivisor {
        let mut d = TDivisor::zero(self.n_rays);
        for (k, &i) in self.basis.iter().enumerate() {
            d.coeffs[i] = &d.coeffs[i] + &b[k];
        }
        d
    }
}

/// `L(V)`: boundaries with coefficients in `[0,1]`.
pub fn polytope_l(v: &DivisorSpan) -> Polyhedron {
    Polyhedron::unit_cube(v.len())
}

fn require_ample(p: &Pair, a: &TDivisor) -> Result<()> {
    if !NumSpace::build(p)?.is_ample(a)? {
        return Err(Error::Precondition("A is not ample".into()));
    }
    Ok(())
}

/// Polyhedron in `(b, m)` of boundaries `b ∈ L(V)` and sections `m ∈ P_{D + Σ b_i S_i}`,
/// optionally forcing `m` onto the facet of the ray `s`.
fn joint(p: &Pair, d: &TDivisor, v: &DivisorSpan, facet: Option<usize>) -> Polyhedron {
    let s = v.len();
    let n = p.fan.rank;
    let dim = s + n;
    let mut ineqs: Vec<(QVec, Rat)> = Vec::new();
    let mut eqs: Vec<(QVec, Rat)> = Vec::new();
    for k in 0..s {
        ineqs.push((QVec::unit(dim, k), int(0)));
        ineqs.push((-&QVec::unit(dim, k), int(-1)));
    }
    for r in 0..p.n_rays() {
        let mut row = QVec::zeros(s).concat(&p.fan.u(r));
        if let Some(k) = v.basis.iter().position(|&i| i == r) {
            row[k] = int(1);
        }
        let rhs = -d.coeffs[r].clone();
        if facet == Some(r) {
            eqs.push((row, rhs));
        } else {
            ineqs.push((row, rhs));
        }
    }
    Polyhedron::new(dim, ineqs, eqs)
}

fn project_to_span(j: &Polyhedron, s: usize) -> Result<Polyhedron> {
    if j.is_empty() {
        return Ok(Polyhedron::empty(s));
    }
    let coords: Vec<usize> = (0..s).collect();
    let out = j.project(&coords);
    let vr = out.vrep();
    if !vr.rays.is_empty() || !vr.lineality.is_empty() {
        return Err(Error::Invariant("projection of a bounded boundary region is unbounded".into()));
    }
    Ok(out)
}

/// `E_A(V) = {B ∈ L(V) : |K + A + B|_Q ≠ ∅}`, a rational polytope.
pub fn compute_eav(p: &Pair, a: &TDivisor, v: &DivisorSpan) -> Result<Polyhedron> {
    require_ample(p, a)?;
    let d = p.k().add(a);
    project_to_span(&joint(p, &d, v, None), v.len())
}

/// `{B ∈ L(V) : o_S(K + S + A + B) = 0}`: some section of the adjoint divisor avoids `S`
/// asymptotically, so `m` can be placed on the facet of `S`.
pub fn compute_bsav(p: &Pair, s: usize, a: &TDivisor, v: &DivisorSpan) -> Result<Polyhedron> {
    if v.basis.contains(&s) {
        return Err(Error::Precondition("S lies in the span V".into()));
    }
    if s >= p.n_rays() {
        return Err(Error::Precondition(format!("ray {s} out of range")));
    }
    require_ample(p, a)?;
    let d = p.k().add(&TDivisor::prime(p.n_rays(), s)).add(a);
    project_to_span(&joint(p, &d, v, Some(s)), v.len())
}
