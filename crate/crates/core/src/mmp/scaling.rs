use num::{BigInt, Integer, One, Signed, Zero};

use crate::cones::{CurveClass, NumSpace};
use crate::error::Result;
use crate::exactla::lp::{solve_general, LpOutcome, Sense};
use crate::exactla::rat::int;
use crate::exactla::{QVec, Rat};
use crate::toric::divisor::{cartier_data, section_polyhedron, TDivisor};
use crate::toric::pair::{classify_pair, Pair};

#[derive(Clone, Debug)]
pub struct GoodScalingReport {
    pub big: bool,
    pub nef_sum: bool,
    /// `A ≡ F + N` with `F ≥ 0` torus-invariant, `Δ + F` with coefficients below one and `N` nef;
    /// a general member of `|kN|/k` keeps the pair klt.
    pub klt_witness: Option<(TDivisor, TDivisor)>,
}

impl GoodScalingReport {
    pub fn ok(&self) -> bool {
        self.big && self.nef_sum && self.klt_witness.is_some()
    }

    pub fn reason(&self) -> Option<&'static str> {
        if !self.big {
            Some("(i) A is not big")
        } else if !self.nef_sum {
            Some("(ii) K+Δ+A is not nef")
        } else if self.klt_witness.is_none() {
            Some("(iii) no klt representative of A")
        } else {
            None
        }
    }
}

/// Maximizes `t` with `F ≥ 0`, `δ_ρ + f_ρ ≤ 1 - t`, `(A - F)·C ≥ 0` on all contracted curves.
fn klt_representative(ns: &NumSpace, a: &TDivisor) -> Option<(TDivisor, TDivisor)> {
    let p = &ns.pair;
    let nr = p.n_rays();
    let nv = nr + 1;
    let mut ineqs: Vec<(QVec, Rat)> = Vec::new();
    for j in 0..nr {
        ineqs.push((QVec::unit(nv, j), Rat::zero()));
        let mut row = -&QVec::unit(nv, j);
        row[nr] = int(-1);
        ineqs.push((row, &p.boundary.coeffs[j] - int(1)));
    }
    for c in &ns.curves {
        let mut row = QVec::zeros(nv);
        for j in 0..nr {
            row[j] = -c.degrees[j].clone();
        }
        ineqs.push((row, -c.degree(a)));
    }
    ineqs.push((-&QVec::unit(nv, nr), int(-1)));
    match solve_general(&QVec::unit(nv, nr), &ineqs, &[], nv, Sense::Max) {
        LpOutcome::Optimal { value, witness } if value.is_positive() => {
            let f = TDivisor::new(witness[..nr].to_vec());
            let n = a.sub(&f);
            Some((f, n))
        }
        _ => None,
    }
}

pub fn good_scaling_report(p: &Pair, a: &TDivisor) -> Result<GoodScalingReport> {
    let ns = NumSpace::build(p)?;
    let big = ns.is_big(a)?;
    let nef_sum = ns.is_nef(&p.k_plus_delta().add(a))?;
    let klt_witness = if classify_pair(p)?.klt { klt_representative(&ns, a) } else { None };
    Ok(GoodScalingReport { big, nef_sum, klt_witness })
}

pub fn is_good_scaling_divisor(p: &Pair, a: &TDivisor) -> Result<bool> {
    Ok(good_scaling_report(p, a)?.ok())
}

/// Least `m ≥ 1` with `mH` Cartier (hence globally generated when nef), or a curve on which
/// `H` is negative.
pub fn basepoint_free_check(p: &Pair, h: &TDivisor) -> Result<std::result::Result<BigInt, CurveClass>> {
    let ns = NumSpace::build(p)?;
    if let Some(c) = ns.curves.iter().find(|c| c.degree(h).is_negative()) {
        return Ok(Err(c.clone()));
    }
    let cd = cartier_data(h, &p.fan)?;
    let m0 = h.coeffs.iter().fold(cd.index(), |acc, x| acc.lcm(x.denom()));
    let mh = h.scale(&Rat::from_integer(m0.clone()));
    if p.base.is_none() {
        // Generation: every local slope -m_σ lies in P_{mH}.
        let cdm = cartier_data(&mh, &p.fan)?;
        let poly = section_polyhedron(&mh, &p.fan);
        for (i, m) in cdm.m.iter().enumerate() {
            if p.fan.is_full_dim_cone(i) && !poly.contains(m) {
                return Err(crate::Error::Invariant("nef Cartier divisor is not generated".into()));
            }
        }
    }
    if m0 < BigInt::one() {
        return Err(crate::Error::Invariant("non-positive Cartier index".into()));
    }
    Ok(Ok(m0))
}

/// For toric `Q`-Cartier divisors semiampleness is nefness.
pub fn is_semiample(d: &TDivisor, p: &Pair) -> Result<bool> {
    NumSpace::build(p)?.is_nef(d)
}
