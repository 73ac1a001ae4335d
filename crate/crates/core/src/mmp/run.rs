use num::{One, Signed, Zero};

use super::contract::{check_good_contraction, contract_ray, ContractionKind};
use super::flip::flip;
use super::ledger::{discrepancy_deltas, StepLedger};
use super::scaling::good_scaling_report;
use super::threshold::{ample_just_below, select_in, threshold_in};
use crate::cones::{CurveClass, NumSpace};
use crate::error::{Error, Result};
use crate::exactla::Rat;
use crate::toric::divisor::{cartier_data, TDivisor};
use crate::toric::fan::{is_q_factorial, Fan};
use crate::toric::pair::{classify_pair, Pair};

#[derive(Clone, Debug)]
pub struct MMPStep {
    pub kind: ContractionKind,
    pub ray: CurveClass,
    pub lambda: Rat,
    pub source: Pair,
    /// The next model; for a Mori fibre step, the base of the fibration.
    pub target: Pair,
    pub rank_before: usize,
    pub rank_after: usize,
    /// Empty for a Mori fibre step.
    pub ledger: Option<StepLedger>,
    /// Scaling divisor on the source.
    pub scaling: TDivisor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    MinimalModel,
    MoriFibration,
}

#[derive(Clone, Debug)]
pub struct MMPTrace {
    pub steps: Vec<MMPStep>,
    pub outcome: Outcome,
    /// Last model reached; for a Mori fibration this is the source of the fibration.
    pub final_pair: Pair,
    pub final_scaling: TDivisor,
    /// Base of the Mori fibration, if any.
    pub fibration_base: Option<Pair>,
    pub initial_rank: usize,
}

impl MMPTrace {
    pub fn lambdas(&self) -> Vec<Rat> {
        self.steps.iter().map(|s| s.lambda.clone()).collect()
    }

    pub fn flips(&self) -> usize {
        self.steps.iter().filter(|s| s.kind == ContractionKind::Flip).count()
    }

    /// λ non-increasing, rank bookkeeping, ledgers monotone, length bound.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for w in self.steps.windows(2) {
            if w[1].lambda > w[0].lambda {
                return Err(format!("threshold increased from {} to {}", w[0].lambda, w[1].lambda));
            }
        }
        for (i, s) in self.steps.iter().enumerate() {
            let ok = match s.kind {
                ContractionKind::Divisorial | ContractionKind::MoriFiber => s.rank_after + 1 == s.rank_before,
                ContractionKind::Flip => s.rank_after == s.rank_before,
            };
            if !ok {
                return Err(format!("step {i}: rank {} -> {} for {}", s.rank_before, s.rank_after, s.kind.label()));
            }
            if let Some(l) = &s.ledger {
                if !l.ok() {
                    return Err(format!("step {i}: discrepancy ledger fails"));
                }
            }
        }
        if self.steps.len() > self.initial_rank + self.flips() {
            return Err("trace longer than rank plus flips".into());
        }
        Ok(())
    }
}

pub fn iteration_cap(p: &Pair) -> usize {
    4 * p.n_rays() * p.n_rays()
}

/// Pushforward of a divisor to a contraction target, matching rays by their vectors.
pub fn push_divisor(from: &Fan, to: &Fan, d: &TDivisor) -> TDivisor {
    TDivisor::new(
        to.rays
            .iter()
            .map(|r| match from.ray_index(r) {
                Some(i) => d.coeffs[i].clone(),
                None => Rat::zero(),
            })
            .collect(),
    )
}

pub fn run_mmp_with_scaling(p: &Pair, a: &TDivisor) -> Result<MMPTrace> {
    if !is_q_factorial(&p.fan) {
        return Err(Error::Precondition("the fan is not simplicial".into()));
    }
    if !classify_pair(p)?.klt {
        return Err(Error::Precondition("the pair is not klt".into()));
    }
    // Thresholds above one are allowed: the scaling conditions are checked on `max(λ, 1) A`.
    let lambda0 = super::threshold::nef_threshold(p, a)?;
    let report = good_scaling_report(p, &a.scale(&lambda0.max(Rat::one())))?;
    if let Some(reason) = report.reason() {
        return Err(Error::Precondition(format!("scaling divisor is not good: {reason}")));
    }
    let cap = iteration_cap(p);
    let mut cur = p.clone();
    let mut scaling = a.clone();
    let mut steps: Vec<MMPStep> = Vec::new();
    let initial_rank = NumSpace::build(p)?.rank;
    for _ in 0..cap {
        let ns = NumSpace::build(&cur)?;
        let lambda = threshold_in(&ns, &scaling)?;
        if lambda.is_zero() {
            return Ok(MMPTrace {
                steps,
                outcome: Outcome::MinimalModel,
                final_pair: cur,
                final_scaling: scaling,
                fibration_base: None,
                initial_rank,
            });
        }
        let ray = select_in(&ns, &scaling, &lambda)?;
        let c = contract_ray(&cur, &ray)?;
        if !check_good_contraction(&cur, &c)?.ok() {
            return Err(Error::Invariant("contraction is not good".into()));
        }
        match c.kind {
            ContractionKind::MoriFiber => {
                let base = c.target.clone().expect("fibre target");
                let rank_after = if base.fan.rank == 0 { 0 } else { NumSpace::build(&base)?.rank };
                steps.push(MMPStep {
                    kind: c.kind,
                    ray: ray.curve().clone(),
                    lambda,
                    source: cur.clone(),
                    target: base.clone(),
                    rank_before: ns.rank,
                    rank_after,
                    ledger: None,
                    scaling: scaling.clone(),
                });
                return Ok(MMPTrace {
                    steps,
                    outcome: Outcome::MoriFibration,
                    final_pair: cur,
                    final_scaling: scaling,
                    fibration_base: Some(base),
                    initial_rank,
                });
            }
            ContractionKind::Divisorial | ContractionKind::Flip => {
                let next = if c.kind == ContractionKind::Flip {
                    flip(&cur, &c)?
                } else {
                    c.target.clone().expect("divisorial target")
                };
                let next_scaling = push_divisor(&cur.fan, &next.fan, &scaling);
                let rank_after = NumSpace::build(&next)?.rank;
                let ledger = StepLedger::from_deltas(discrepancy_deltas(&cur, &next)?);
                if !ledger.non_decreasing {
                    return Err(Error::Invariant("a discrepancy decreased along an MMP step".into()));
                }
                steps.push(MMPStep {
                    kind: c.kind,
                    ray: ray.curve().clone(),
                    lambda,
                    source: cur.clone(),
                    target: next.clone(),
                    rank_before: ns.rank,
                    rank_after,
                    ledger: Some(ledger),
                    scaling: scaling.clone(),
                });
                cur = next;
                scaling = next_scaling;
            }
        }
    }
    Err(Error::IterationCap(cap))
}

/// The model `X^r`: all steps with threshold at least `r`, followed by the ampleness check
/// of `D^r + (r-ε)H^r`.
#[derive(Clone, Debug)]
pub struct ScaleOutput {
    pub pair: Pair,
    pub scaling: TDivisor,
    pub steps_used: usize,
}

pub fn output_at_scale(p: &Pair, a: &TDivisor, r: &Rat) -> Result<ScaleOutput> {
    if r.is_negative() {
        return Err(Error::Precondition("scale must be non-negative".into()));
    }
    let trace = run_mmp_with_scaling(p, a)?;
    let used: Vec<&MMPStep> = trace.steps.iter().take_while(|s| s.lambda >= *r).collect();
    if used.iter().any(|s| s.kind == ContractionKind::MoriFiber) {
        return Err(Error::Unsupported(format!(
            "scale {r} is at or below the fibration threshold; the output is not birational"
        )));
    }
    let (pair, scaling) = match used.last() {
        None => (p.clone(), a.clone()),
        Some(s) => (s.target.clone(), push_divisor(&s.source.fan, &s.target.fan, &s.scaling)),
    };
    let ns = NumSpace::build(&pair)?;
    if !ample_just_below(&ns, &pair.k_plus_delta(), &scaling, r)? {
        return Err(Error::Unsupported(format!("D + (r-ε)H is not ample on the output at scale {r}")));
    }
    Ok(ScaleOutput { pair, scaling, steps_used: used.len() })
}

#[derive(Clone, Debug)]
pub struct CharacterizationReport {
    /// Birational contraction: same lattice and support, no new divisors.
    pub contraction: bool,
    /// `f_*(D + (r-ε)H)` ample.
    pub ample: bool,
    /// Every contracted divisor `E` has `(D + rH)|_E` not big.
    pub only_non_big_contracted: bool,
    pub contracted: Vec<usize>,
}

impl CharacterizationReport {
    pub fn all_pass(&self) -> bool {
        self.contraction && self.ample && self.only_non_big_contracted
    }
}

/// Bigness of `L|_{D_ρ}` over the image of `D_ρ` in the base: the face of the fibre polytope
/// where `<m, u_ρ> = -l_ρ` has dimension `rank - 1`.
pub fn restriction_is_big(p: &Pair, l: &TDivisor, rho: usize) -> Result<bool> {
    cartier_data(l, &p.fan)?;
    let u = p.fan.u(rho);
    let poly = match &p.base {
        None => crate::toric::divisor::section_polyhedron(l, &p.fan),
        Some(b) => {
            let img = b.map.apply_q(&u);
            let span = [img];
            let ineqs = (0..p.n_rays())
                .filter(|&i| {
                    let w = b.map.apply_q(&p.fan.u(i));
                    w.is_zero() || crate::exactla::linalg::in_span(&span, &w)
                })
                .map(|i| (p.fan.u(i), -l.coeffs[i].clone()))
                .collect();
            crate::exactla::Polyhedron::new(p.fan.rank, ineqs, vec![])
        }
    };
    let face = poly.with_eq(u, -l.coeffs[rho].clone());
    if face.is_empty() {
        return Ok(false);
    }
    Ok(face.dimension().is_some_and(|d| d + 1 == p.fan.rank))
}

pub fn verify_output_characterization(x: &Pair, candidate: &Pair, a: &TDivisor, r: &Rat) -> Result<CharacterizationReport> {
    let rays_x: Vec<&Vec<i64>> = x.fan.rays.iter().collect();
    let contraction = candidate.fan.rank == x.fan.rank
        && candidate.fan.rays.iter().all(|v| rays_x.contains(&v))
        && crate::toric::fan::validate_fan(&candidate.fan).is_valid();
    let contracted: Vec<usize> = (0..x.n_rays()).filter(|&i| candidate.fan.ray_index(&x.fan.rays[i]).is_none()).collect();
    let d = x.k_plus_delta();
    let h_c = push_divisor(&x.fan, &candidate.fan, a);
    let ample = contraction
        && match NumSpace::build(candidate) {
            Ok(ns) => ample_just_below(&ns, &candidate.k_plus_delta(), &h_c, r).unwrap_or(false),
            Err(_) => false,
        };
    let l = d.add(&a.scale(r));
    let mut only = true;
    for &e in &contracted {
        if restriction_is_big(x, &l, e)? {
            only = false;
        }
    }
    Ok(CharacterizationReport { contraction, ample, only_non_big_contracted: only, contracted })
}

/// Step data in a form suitable for reports.
pub fn describe_step(s: &MMPStep) -> String {
    format!(
        "{} at lambda={} on wall {:?} (rank {} -> {})",
        s.kind.label(),
        crate::exactla::fmt_rat(&s.lambda),
        s.ray.wall.rays,
        s.rank_before,
        s.rank_after
    )
}
