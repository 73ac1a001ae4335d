use num::{BigInt, Integer, Signed, Zero};

use crate::cones::{CurveClass, NumSpace};
use crate::error::{Error, Result};
use crate::exactla::{QVec, Rat};
use crate::toric::divisor::{cartier_data, TDivisor};
use crate::toric::Pair;

/// `K+Δ+λA` with the current threshold.
#[derive(Clone, Debug)]
pub struct ScalingState {
    pub pair: Pair,
    pub scaling: TDivisor,
    pub lambda: Rat,
}

/// `min{t >= 0 : K+Δ+tA nef}` over the contracted curves of `ns`. The threshold may exceed one.
pub fn threshold_in(ns: &NumSpace, a: &TDivisor) -> Result<Rat> {
    let kd = ns.pair.k_plus_delta();
    cartier_data(&kd, &ns.pair.fan)?;
    cartier_data(a, &ns.pair.fan)?;
    let mut best = Rat::zero();
    for c in &ns.curves {
        let ac = c.degree(a);
        if ac.is_positive() {
            let t = -c.degree(&kd) / ac;
            if t > best {
                best = t;
            }
        }
    }
    if !ns.is_nef(&kd.add(&a.scale(&best)))? {
        return Err(Error::Precondition("no multiple of A makes K+Δ+tA nef".into()));
    }
    Ok(best)
}

pub fn nef_threshold(p: &Pair, a: &TDivisor) -> Result<Rat> {
    threshold_in(&NumSpace::build(p)?, a)
}

/// The denominator bound of the rationality theorem, evaluated with `H = cA` the smallest
/// Cartier multiple of the scaling divisor and `r = 1/λ(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalityCheck {
    pub lambda: Rat,
    pub h_multiple: BigInt,
    pub r: Rat,
    pub a: BigInt,
    pub b: usize,
    pub v: BigInt,
    pub bound: BigInt,
    pub holds: bool,
}

pub fn rationality_check(p: &Pair, a: &TDivisor) -> Result<RationalityCheck> {
    let lambda = nef_threshold(p, a)?;
    if lambda.is_zero() {
        return Err(Error::Precondition("K+Δ is nef; the rationality theorem does not apply".into()));
    }
    let cd = cartier_data(a, &p.fan)?;
    let c = a.coeffs.iter().fold(cd.index(), |acc, x| acc.lcm(x.denom()));
    let ai = p.log_canonical_data()?.index();
    let b = p.fiber_dimension()?;
    // λ(cA) = λ(A)/c and r = 1/λ(cA).
    let r = Rat::from_integer(c.clone()) / &lambda;
    let q = &r / Rat::from_integer(ai.clone());
    let v = q.denom().clone();
    let bound = &ai * BigInt::from(b + 1);
    let holds = v <= bound;
    Ok(RationalityCheck { lambda, h_multiple: c, r, a: ai, b, v, bound, holds })
}

/// An extremal ray of the Mori cone together with every contracted curve whose class spans it.
#[derive(Clone, Debug)]
pub struct ExtremalRay {
    pub class: QVec,
    pub curves: Vec<CurveClass>,
}

impl ExtremalRay {
    /// The representative curve: smallest wall by sorted ray indices.
    pub fn curve(&self) -> &CurveClass {
        &self.curves[0]
    }
}

/// The ray with `(K+Δ+λA)·R = 0` and `(K+Δ)·R < 0`; ties go to the lexicographically smallest
/// wall.
pub fn select_in(ns: &NumSpace, a: &TDivisor, lambda: &Rat) -> Result<ExtremalRay> {
    if !lambda.is_positive() {
        return Err(Error::Precondition("threshold is zero; nothing to contract".into()));
    }
    let kd = ns.pair.k_plus_delta();
    let kx = ns.divisor_class(&kd)?;
    let sx = ns.divisor_class(&kd.add(&a.scale(lambda)))?;
    let mut candidates: Vec<ExtremalRay> = Vec::new();
    for r in &ns.mori.rays {
        if !sx.dot(r).is_zero() || !kx.dot(r).is_negative() {
            continue;
        }
        let mut curves: Vec<CurveClass> = ns.curves_on_ray(r).into_iter().map(|i| ns.curves[i].clone()).collect();
        curves.sort_by(|x, y| x.wall.rays.cmp(&y.wall.rays));
        if curves.is_empty() {
            return Err(Error::Invariant("extremal ray without a contracted wall".into()));
        }
        candidates.push(ExtremalRay { class: r.clone(), curves });
    }
    candidates
        .into_iter()
        .min_by(|x, y| x.curve().wall.rays.cmp(&y.curve().wall.rays))
        .ok_or_else(|| Error::Invariant("no extremal ray attains the threshold".into()))
}

pub fn select_extremal_ray(p: &Pair, a: &TDivisor, lambda: &Rat) -> Result<ExtremalRay> {
    select_in(&NumSpace::build(p)?, a, lambda)
}

/// Whether `D + (r - ε)H` is ample for all small `ε > 0`.
pub fn ample_just_below(ns: &NumSpace, d: &TDivisor, h: &TDivisor, r: &Rat) -> Result<bool> {
    let dx = ns.divisor_class(d)?;
    let hx = ns.divisor_class(h)?;
    let at = &dx + &hx.scale(r);
    if !ns.mori.is_pointed() {
        return Ok(false);
    }
    Ok(ns.mori.rays.iter().all(|g| {
        let v = at.dot(g);
        v.is_positive() || (v.is_zero() && hx.dot(g).is_negative())
    }))
}
