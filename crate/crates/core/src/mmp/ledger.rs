use std::collections::BTreeSet;

use num::Signed;

use crate::cones::NumSpace;
use crate::error::{Error, Result};
use crate::exactla::lattice::{self, IVec};
use crate::exactla::{QVec, Rat};
use crate::toric::divisor::{birational_transform, cartier_data, TDivisor};
use crate::toric::fan::{Fan, LatticeMap};
use crate::toric::pair::{discrepancy, exceptional_test_vectors, Base, Pair};

/// Test valuations shared by two birational models in one lattice: all rays of both fans,
/// their fundamental-box points and primitive sums of two rays lying in a common cone.
pub fn test_valuations(a: &Fan, b: &Fan) -> Result<Vec<IVec>> {
    let mut out: BTreeSet<IVec> = BTreeSet::new();
    for f in [a, b] {
        out.extend(f.rays.iter().cloned());
        out.extend(exceptional_test_vectors(f)?);
        for c in &f.cones {
            for (i, &x) in c.iter().enumerate() {
                for &y in &c[i + 1..] {
                    let s: IVec = f.rays[x].iter().zip(&f.rays[y]).map(|(p, q)| p + q).collect();
                    out.insert(lattice::primitive(&s));
                }
            }
        }
    }
    Ok(out
        .into_iter()
        .filter(|v| {
            let q = QVec::from_ints(v);
            a.in_support(&q) && b.in_support(&q)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyDelta {
    pub valuation: IVec,
    pub before: Rat,
    pub after: Rat,
}

/// Discrepancies of every test valuation on both sides of a birational step.
pub fn discrepancy_deltas(before: &Pair, after: &Pair) -> Result<Vec<DiscrepancyDelta>> {
    let vals = test_valuations(&before.fan, &after.fan)?;
    vals.into_iter()
        .map(|v| Ok(DiscrepancyDelta { before: discrepancy(before, &v)?, after: discrepancy(after, &v)?, valuation: v }))
        .collect()
}

/// Monotonicity summary of one step. Discrepancies never go down along an MMP step
/// (the standard comparison), and at least one goes up strictly.
#[derive(Clone, Debug)]
pub struct StepLedger {
    pub deltas: Vec<DiscrepancyDelta>,
    pub non_decreasing: bool,
    pub strict: bool,
    /// Number of valuations whose discrepancy went down.
    pub decreases: usize,
}

impl StepLedger {
    pub fn from_deltas(deltas: Vec<DiscrepancyDelta>) -> StepLedger {
        let decreases = deltas.iter().filter(|d| d.after < d.before).count();
        let strict = deltas.iter().any(|d| d.after > d.before);
        StepLedger { non_decreasing: decreases == 0, strict, decreases, deltas }
    }

    pub fn ok(&self) -> bool {
        self.non_decreasing && self.strict
    }

    /// Sum of discrepancies over the test family, before and after.
    pub fn potentials(&self) -> (Rat, Rat) {
        let b = self.deltas.iter().map(|d| d.before.clone()).sum();
        let a = self.deltas.iter().map(|d| d.after.clone()).sum();
        (b, a)
    }
}

/// Negativity: `h: X -> Y` proper birational, `-B` h-nef and `h_* B` effective imply `B`
/// effective. Returns the conclusion; unverifiable hypotheses are errors.
pub fn negativity_check(h: &LatticeMap, x: &Fan, y: &Fan, b: &TDivisor) -> Result<bool> {
    if !h.is_invertible_over_q() {
        return Err(Error::Precondition("map is not birational".into()));
    }
    cartier_data(b, x)?;
    let rel = Pair::relative(x.clone(), TDivisor::zero(x.n_rays()), Some(Base { fan: y.clone(), map: h.clone() }))?;
    let ns = NumSpace::build(&rel)?;
    if !ns.is_nef(&b.neg())? {
        return Err(Error::Precondition("-B is not nef over the target".into()));
    }
    let pushed = birational_transform(h, x, y, b)?;
    if !pushed.is_effective() {
        return Err(Error::Precondition("h_* B is not effective".into()));
    }
    Ok(b.is_effective())
}

/// Whether any coefficient is negative.
pub fn has_negative(d: &TDivisor) -> bool {
    d.coeffs.iter().any(|c| c.is_negative())
}
