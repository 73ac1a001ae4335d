use std::collections::BTreeSet;

use num::{Signed, Zero};

use super::contract::{Contraction, ContractionKind};
use crate::cones::NumSpace;
use crate::error::{Error, Result};
use crate::exactla::Rat;
use crate::toric::fan::{is_q_factorial, validate_fan, Fan, LatticeMap};
use crate::toric::pair::{Base, Pair};

/// Bistellar exchange across the circuit of the contracted wall: cones `I \ {j}` for `j` with a
/// positive relation coefficient are replaced by the cones with `j` negative.
pub fn flip(p: &Pair, c: &Contraction) -> Result<Pair> {
    if c.kind != ContractionKind::Flip {
        return Err(Error::Precondition(format!("{} contraction cannot be flipped", c.kind.label())));
    }
    let curve = c.ray.curve();
    let kc = curve.degree(&p.k_plus_delta());
    if kc.is_zero() {
        return Err(Error::Precondition("K+Δ is numerically trivial on the ray: a flop, not a flip".into()));
    }
    if kc.is_positive() {
        return Err(Error::Precondition("K+Δ is positive on the ray".into()));
    }
    let f = &p.fan;
    let support: Vec<usize> = (0..f.n_rays()).filter(|&i| !curve.degrees[i].is_zero()).collect();
    let plus: BTreeSet<usize> = support.iter().copied().filter(|&i| curve.degrees[i].is_positive()).collect();
    let minus: BTreeSet<usize> = support.iter().copied().filter(|&i| curve.degrees[i].is_negative()).collect();
    let circuit: BTreeSet<usize> = support.iter().copied().collect();
    let touched: BTreeSet<usize> = c.groups.iter().filter(|g| g.len() > 1).flatten().copied().collect();
    let mut links: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for (i, cone) in f.cones.iter().enumerate() {
        if !touched.contains(&i) {
            cones.push(cone.clone());
            continue;
        }
        let set: BTreeSet<usize> = cone.iter().copied().collect();
        let missing: Vec<usize> = circuit.difference(&set).copied().collect();
        if missing.len() != 1 || !plus.contains(&missing[0]) {
            return Err(Error::Unsupported("flipping locus is not a single circuit".into()));
        }
        links.insert(set.difference(&circuit).copied().collect());
    }
    for link in &links {
        for &j in &minus {
            let mut cone: Vec<usize> = circuit.iter().copied().filter(|&i| i != j).collect();
            cone.extend(link.iter().copied());
            cones.push(cone);
        }
    }
    let fan = Fan::new(f.rank, f.rays.clone(), cones)?;
    let report = validate_fan(&fan);
    if !report.is_valid() {
        return Err(Error::Invariant(format!("flipped fan is invalid: {:?}", report.errors)));
    }
    let out = Pair::relative(fan, p.boundary.clone(), p.base.clone())?;
    let check = check_flip_axioms(p, &out, &c.y_fan)?;
    if !check.all_pass() {
        return Err(Error::Invariant(format!("flip axioms fail: {}", check.summary())));
    }
    Ok(out)
}

/// Pass/fail of the flip axioms with exact certificates.
#[derive(Clone, Debug)]
pub struct FlipAxiomReport {
    /// The new model is a valid `Q`-factorial fan over `Y`.
    pub normal: bool,
    pub q_factorial: bool,
    /// No divisor is contracted by `X⁺ -> Y` and it is not an isomorphism.
    pub small: bool,
    pub not_isomorphism: bool,
    /// `K⁺+Δ⁺` is `Q`-Cartier and positive on every curve contracted to `Y`.
    pub q_cartier: bool,
    pub ample: bool,
    /// `((K⁺+Δ⁺)·C)` for each contracted curve of `X⁺ -> Y`.
    pub degrees: Vec<Rat>,
    /// `-(K+Δ)` was ample over `Y` on the source side.
    pub source_anti_ample: bool,
}

impl FlipAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.normal && self.q_factorial && self.small && self.not_isomorphism && self.q_cartier && self.ample && self.source_anti_ample
    }

    pub fn summary(&self) -> String {
        let item = |name: &str, ok: bool| format!("{name}={}", if ok { "pass" } else { "fail" });
        [
            item("normal", self.normal),
            item("q_factorial", self.q_factorial),
            item("small", self.small),
            item("not_isomorphism", self.not_isomorphism),
            item("q_cartier", self.q_cartier),
            item("relatively_ample", self.ample),
            item("source_anti_ample", self.source_anti_ample),
        ]
        .join(" ")
    }
}

fn over_y(p: &Pair, y: &Fan) -> Result<Pair> {
    Pair::relative(p.fan.clone(), p.boundary.clone(), Some(Base { fan: y.clone(), map: LatticeMap::identity(p.fan.rank) }))
}

fn degrees_over_y(p: &Pair, y: &Fan) -> Result<Option<Vec<Rat>>> {
    let rel = over_y(p, y)?;
    let ns = NumSpace::build(&rel)?;
    let kd = rel.k_plus_delta();
    if crate::toric::divisor::cartier_data(&kd, &rel.fan).is_err() {
        return Ok(None);
    }
    Ok(Some(ns.curves.iter().map(|c| c.degree(&kd)).collect()))
}

/// Checks a candidate diagram `X -> Y <- X⁺`. Both models must be in the lattice of `Y`.
pub fn check_flip_axioms(x: &Pair, xplus: &Pair, y: &Fan) -> Result<FlipAxiomReport> {
    let report = validate_fan(&xplus.fan);
    let normal = report.is_valid() && over_y(xplus, y).is_ok();
    let q_factorial = is_q_factorial(&xplus.fan);
    let rays = |f: &Fan| -> BTreeSet<Vec<i64>> { f.used_rays().into_iter().map(|i| f.rays[i].clone()).collect() };
    let small = rays(&xplus.fan) == rays(y) && rays(&x.fan) == rays(y);
    let not_isomorphism = !xplus.fan.same_as(y);
    let (q_cartier, degrees) = if normal {
        match degrees_over_y(xplus, y)? {
            Some(d) => (true, d),
            None => (false, vec![]),
        }
    } else {
        (false, vec![])
    };
    let ample = q_cartier && !degrees.is_empty() && degrees.iter().all(|d| d.is_positive());
    let source_anti_ample = match degrees_over_y(x, y) {
        Ok(Some(d)) => !d.is_empty() && d.iter().all(|v| v.is_negative()),
        _ => false,
    };
    Ok(FlipAxiomReport { normal, q_factorial, small, not_isomorphism, q_cartier, ample, degrees, source_anti_ample })
}
