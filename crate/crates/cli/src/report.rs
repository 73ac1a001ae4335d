//! Machine-readable reports. Every report serializes with a `"format"` field and a `"command"` tag.

use mmp_core::{fmt_rat, Pair};
use serde::{Deserialize, Serialize};

use crate::instance::FORMAT;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanDump {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub boundary: Vec<String>,
}

impl FanDump {
    pub fn of(p: &Pair) -> FanDump {
        FanDump {
            rank: p.fan.rank,
            rays: p.fan.rays.clone(),
            cones: p.fan.cones.clone(),
            boundary: p.boundary.coeffs.iter().map(fmt_rat).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub valuations: usize,
    pub non_decreasing: bool,
    pub strict: bool,
    pub potential_before: String,
    pub potential_after: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub kind: String,
    pub lambda: String,
    /// Ray-index sets of the walls spanning the contracted ray.
    pub walls: Vec<Vec<usize>>,
    pub rank_before: usize,
    pub rank_after: usize,
    pub ledger: Option<LedgerSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub steps: Vec<StepReport>,
    pub outcome: String,
    pub final_model: FanDump,
    pub fibration_base: Option<FanDump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub lambda: String,
    /// Denominator data; absent when `K+Δ` is already nef.
    pub rationality: Option<RationalityReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalityReport {
    pub h_multiple: String,
    pub r: String,
    pub a: String,
    pub b: usize,
    pub v: String,
    pub bound: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub rays: Vec<Vec<String>>,
    /// Linear form of each valuation's order on the cell.
    pub forms: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChambersReport {
    pub divisors: Vec<String>,
    pub valuations: Vec<Vec<String>>,
    pub support: Vec<Vec<String>>,
    pub cells: Vec<CellReport>,
    pub nef_cell: Option<usize>,
    pub coarsest: bool,
    pub subdivision: bool,
    pub seed: u64,
    pub verified_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingReport {
    pub label: String,
    pub terminal: bool,
    pub canonical: bool,
    pub klt: bool,
    pub lc: bool,
    pub min_log_discrepancy: Option<String>,
    pub attained_at: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueScale {
    pub r: String,
    pub glued: Option<FanDump>,
    pub mismatch: Option<String>,
    pub base_change: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueReport {
    pub patches: Vec<Vec<Vec<usize>>>,
    pub scales: Vec<GlueScale>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputReport {
    pub r: String,
    pub steps_used: usize,
    pub model: FanDump,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Run(TraceReport),
    Threshold(ThresholdReport),
    Chambers(ChambersReport),
    Sing(SingReport),
    Glue(GlueReport),
    OutputAtScale(OutputReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub format: u32,
    #[serde(flatten)]
    pub report: Report,
}

impl Envelope {
    pub fn new(report: Report) -> Envelope {
        Envelope { format: FORMAT, report }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Envelope> {
        serde_json::from_str(s)
    }
}

fn dump_line(f: &FanDump) -> String {
    format!("{} rays, {} maximal cones in rank {}", f.rays.len(), f.cones.len(), f.rank)
}

impl Report {
    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = Vec::new();
        match self {
            Report::Run(t) => {
                for (i, s) in t.steps.iter().enumerate() {
                    let ledger = match &s.ledger {
                        Some(l) => format!(", ledger {} valuations, non-decreasing {}", l.valuations, l.non_decreasing),
                        None => String::new(),
                    };
                    out.push(format!(
                        "step {}: {} at lambda = {}, rank {} -> {}{ledger}",
                        i + 1,
                        s.kind,
                        s.lambda,
                        s.rank_before,
                        s.rank_after
                    ));
                }
                out.push(format!("outcome: {}", t.outcome));
                out.push(format!("final model: {}", dump_line(&t.final_model)));
            }
            Report::Threshold(t) => {
                out.push(format!("nef threshold: {}", t.lambda));
                if let Some(q) = &t.rationality {
                    out.push(format!("denominator {} <= {}: {}", q.v, q.bound, q.holds));
                }
            }
            Report::Chambers(c) => {
                out.push(format!("support cone with {} rays, {} cells", c.support.len(), c.cells.len()));
                match c.nef_cell {
                    Some(i) => out.push(format!("nef chamber: cell {i}")),
                    None => out.push("no cell meets the ample cone".to_string()),
                }
                out.push(format!("coarsest: {}, samples checked: {}", c.coarsest, c.verified_samples));
            }
            Report::Sing(s) => {
                out.push(format!("pair is {}", s.label));
                if let (Some(a), Some(v)) = (&s.min_log_discrepancy, &s.attained_at) {
                    out.push(format!("least exceptional log discrepancy {a} at {v:?}"));
                }
            }
            Report::Glue(g) => {
                out.push(format!("{} patches", g.patches.len()));
                for s in &g.scales {
                    match (&s.glued, &s.mismatch) {
                        (Some(f), _) => out.push(format!("r = {}: glued {}", s.r, dump_line(f))),
                        (None, Some(m)) => out.push(format!("r = {}: mismatch, {m}", s.r)),
                        _ => out.push(format!("r = {}: no result", s.r)),
                    }
                    out.push(format!("  base change per patch: {:?}", s.base_change));
                }
            }
            Report::OutputAtScale(o) => {
                out.push(format!("output at r = {} after {} steps: {}", o.r, o.steps_used, dump_line(&o.model)));
            }
        }
        out.join("\n")
    }
}
