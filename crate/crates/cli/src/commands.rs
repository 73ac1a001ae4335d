use mmp_core::chambers::{
    asymptotic_order, chamber_decomposition, default_valuations, nef_chamber, support_cone,
};
use mmp_core::gallery::rng;
use mmp_core::gluing::{base_change_check, glue_outputs, run_local_mmps, BaseCover};
use mmp_core::mmp::{nef_threshold, output_at_scale, rationality_check, run_mmp_with_scaling};
use mmp_core::toric::pair::{classify_pair, min_exceptional_log_discrepancy};
use mmp_core::{fmt_rat, Error, QVec, Rat, Result};
use num::Zero;
use rand::Rng;

use crate::instance::Instance;
use crate::report::*;

fn strings(v: &QVec) -> Vec<String> {
    v.iter().map(fmt_rat).collect()
}

pub fn run(inst: &Instance) -> Result<Report> {
    let trace = run_mmp_with_scaling(&inst.pair, &inst.scaling()?)?;
    let steps = trace
        .steps
        .iter()
        .map(|s| StepReport {
            kind: s.kind.label().to_string(),
            lambda: fmt_rat(&s.lambda),
            walls: vec![s.ray.wall.rays.clone()],
            rank_before: s.rank_before,
            rank_after: s.rank_after,
            ledger: s.ledger.as_ref().map(|l| {
                let (b, a) = l.potentials();
                LedgerSummary {
                    valuations: l.deltas.len(),
                    non_decreasing: l.non_decreasing,
                    strict: l.strict,
                    potential_before: fmt_rat(&b),
                    potential_after: fmt_rat(&a),
                }
            }),
        })
        .collect();
    Ok(Report::Run(TraceReport {
        steps,
        outcome: format!("{:?}", trace.outcome),
        final_model: FanDump::of(&trace.final_pair),
        fibration_base: trace.fibration_base.as_ref().map(FanDump::of),
    }))
}

pub fn threshold(inst: &Instance) -> Result<Report> {
    let a = inst.scaling()?;
    let lambda = nef_threshold(&inst.pair, &a)?;
    let rationality = if lambda.is_zero() {
        None
    } else {
        let q = rationality_check(&inst.pair, &a)?;
        Some(RationalityReport {
            h_multiple: q.h_multiple.to_string(),
            r: fmt_rat(&q.r),
            a: q.a.to_string(),
            b: q.b,
            v: q.v.to_string(),
            bound: q.bound.to_string(),
            holds: q.holds,
        })
    };
    Ok(Report::Threshold(ThresholdReport { lambda: fmt_rat(&lambda), rationality }))
}

pub fn chambers(inst: &Instance, seed: u64) -> Result<Report> {
    let names = inst.file.params.chambers.clone().unwrap_or_else(|| vec!["A".to_string()]);
    let ds = names.iter().map(|n| inst.divisor(n)).collect::<Result<Vec<_>>>()?;
    let p = &inst.pair;
    let sc = support_cone(&ds, p)?;
    let vals = default_valuations(&p.fan)?;
    let cd = chamber_decomposition(&sc, &ds, &vals, p)?;
    let nef_cell = nef_chamber(&cd, p)?;
    // Sampled check of each linear form against a direct evaluation.
    let mut g = rng(seed);
    let mut verified = 0;
    for (cell, forms) in cd.cells.iter().zip(&cd.forms) {
        for _ in 0..10 {
            let t = cell
                .rays
                .iter()
                .fold(QVec::zeros(sc.dim), |acc, r| acc.axpy(&Rat::from_integer(g.gen_range(1..=5i64).into()), r));
            let d = cd.divisor_at(&t);
            for (v, f) in cd.valuations.iter().zip(forms) {
                if asymptotic_order(v, &d, p)? != Some(f.dot(&t)) {
                    return Err(Error::Invariant(format!("order at {v} is not linear on its cell")));
                }
                verified += 1;
            }
        }
    }
    Ok(Report::Chambers(ChambersReport {
        divisors: names,
        valuations: vals.iter().map(strings).collect(),
        support: sc.rays.iter().map(strings).collect(),
        cells: cd
            .cells
            .iter()
            .zip(&cd.forms)
            .map(|(c, f)| CellReport { rays: c.rays.iter().map(strings).collect(), forms: f.iter().map(strings).collect() })
            .collect(),
        nef_cell,
        coarsest: cd.is_coarsest(),
        subdivision: cd.is_subdivision(),
        seed,
        verified_samples: verified,
    }))
}

pub fn sing(inst: &Instance) -> Result<Report> {
    let c = classify_pair(&inst.pair)?;
    let least = min_exceptional_log_discrepancy(&inst.pair)?;
    Ok(Report::Sing(SingReport {
        label: c.label().to_string(),
        terminal: c.terminal,
        canonical: c.canonical,
        klt: c.klt,
        lc: c.lc,
        min_log_discrepancy: least.as_ref().map(|(a, _)| fmt_rat(a)),
        attained_at: least.map(|(_, v)| v),
    }))
}

pub fn glue(inst: &Instance, r: Option<Rat>) -> Result<Report> {
    let p = &inst.pair;
    let base = p.base.as_ref().ok_or_else(|| Error::Precondition("glue needs a base fan".into()))?;
    let cover = match &inst.file.params.cover {
        Some(c) => BaseCover::new(&base.fan, c.clone())?,
        None => BaseCover::charts(&base.fan)?,
    };
    let scales: Vec<Rat> = match (r, &inst.file.params.scales) {
        (Some(r), _) => vec![r],
        (None, Some(list)) => list.iter().map(|x| x.value()).collect::<Result<_>>()?,
        (None, None) => vec![Rat::from_integer(1.into())],
    };
    let a = inst.scaling()?;
    let runs = run_local_mmps(p, &a, &cover, &scales)?;
    let mut out = Vec::new();
    for r in &scales {
        let (glued, mismatch) = match glue_outputs(p, &cover, &runs, r)? {
            Ok(g) => (Some(FanDump::of(&g)), None),
            Err(m) => (None, Some(m.to_string())),
        };
        let base_change = cover
            .patches
            .iter()
            .map(|patch| base_change_check(p, &a, patch, r))
            .collect::<Result<_>>()?;
        out.push(GlueScale { r: fmt_rat(r), glued, mismatch, base_change });
    }
    Ok(Report::Glue(GlueReport { patches: cover.patches.clone(), scales: out }))
}

/// `r = 0` reports the last model of the full run.
pub fn output(inst: &Instance, r: Option<Rat>) -> Result<Report> {
    let a = inst.scaling()?;
    let r = match r {
        Some(r) => r,
        None => match &inst.file.params.r {
            Some(x) => x.value()?,
            None => Rat::zero(),
        },
    };
    let (model, steps_used) = if r.is_zero() {
        let trace = run_mmp_with_scaling(&inst.pair, &a)?;
        let birational = trace.steps.iter().filter(|s| s.kind != mmp_core::mmp::ContractionKind::MoriFiber).count();
        (trace.final_pair, birational)
    } else {
        let o = output_at_scale(&inst.pair, &a, &r)?;
        (o.pair, o.steps_used)
    };
    Ok(Report::OutputAtScale(OutputReport { r: fmt_rat(&r), steps_used, model: FanDump::of(&model) }))
}
