//! Scaled MMP over a torus-invariant affine cover of the base, glued back together.

use std::collections::{BTreeMap, BTreeSet};

use crate::cones::{restrict_to_open, Restriction};
use crate::error::{Error, Result};
use crate::exactla::lattice::IVec;
use crate::exactla::{linalg, QVec, Rat};
use crate::mmp::{output_at_scale, run_mmp_with_scaling, verify_output_characterization, MMPTrace};
use crate::toric::divisor::TDivisor;
use crate::toric::fan::{validate_fan, Fan};
use crate::toric::pair::Pair;

/// A base cone written by its sorted ray vectors, so that charts and the global base agree.
pub type BaseCone = Vec<IVec>;

/// Faces as sorted ray-vector lists, and boundary coefficients by ray vector.
pub type FacesOver = (BTreeSet<Vec<IVec>>, BTreeMap<IVec, Rat>);

/// Torus-invariant affine opens of the base, each given by one or more base cones.
#[derive(Clone, Debug)]
pub struct BaseCover {
    pub base: Fan,
    pub patches: Vec<Vec<Vec<usize>>>,
}

impl BaseCover {
    pub fn new(base: &Fan, patches: Vec<Vec<Vec<usize>>>) -> Result<BaseCover> {
        let cover = BaseCover { base: base.clone(), patches };
        let faces: BTreeSet<Vec<usize>> = base.all_faces().into_iter().collect();
        let mut covered: BTreeSet<BaseCone> = BTreeSet::new();
        for (i, patch) in cover.patches.iter().enumerate() {
            if patch.is_empty() {
                return Err(Error::Precondition(format!("patch {i} is empty")));
            }
            for c in patch {
                let mut c = c.clone();
                c.sort_unstable();
                if !faces.contains(&c) {
                    return Err(Error::Precondition(format!("patch {i}: {c:?} is not a base cone")));
                }
            }
            covered.extend(cover.allowed(i));
        }
        for c in &base.cones {
            if !covered.contains(&vectors(base, c)) {
                return Err(Error::Precondition(format!("base cone {c:?} is not covered")));
            }
        }
        Ok(cover)
    }

    /// The charts of a complete base: one patch per maximal cone.
    pub fn charts(base: &Fan) -> Result<BaseCover> {
        BaseCover::new(base, base.cones.iter().map(|c| vec![c.clone()]).collect())
    }

    /// Every base cone inside patch `i`.
    pub fn allowed(&self, i: usize) -> BTreeSet<BaseCone> {
        let mut out = BTreeSet::new();
        for c in &self.patches[i] {
            for f in self.base.with_cones(vec![c.clone()]).all_faces() {
                out.insert(vectors(&self.base, &f));
            }
        }
        out
    }

    /// Base cones common to patches `i` and `j`.
    pub fn overlap(&self, i: usize, j: usize) -> BTreeSet<BaseCone> {
        self.allowed(i).intersection(&self.allowed(j)).cloned().collect()
    }
}

fn vectors(f: &Fan, idx: &[usize]) -> BaseCone {
    let mut v: Vec<IVec> = idx.iter().map(|&i| f.rays[i].clone()).collect();
    v.sort();
    v
}

/// Nonempty faces of `p` lying over the given base cones, as sorted ray-vector lists, together
/// with the boundary coefficient of every ray among them.
pub fn faces_over(p: &Pair, allowed: &BTreeSet<BaseCone>) -> Result<FacesOver> {
    let base = p.base.as_ref().ok_or_else(|| Error::Precondition("pair has no base".into()))?;
    let mut faces = BTreeSet::new();
    let mut coeffs = BTreeMap::new();
    for face in p.fan.all_faces() {
        if face.is_empty() {
            continue;
        }
        let v = QVec::sum(&p.fan.ray_vectors(&face), p.fan.rank);
        let bc = vectors(&base.fan, &p.base_cone_of(&v)?);
        if allowed.contains(&bc) {
            for &i in &face {
                coeffs.insert(p.fan.rays[i].clone(), p.boundary.coeffs[i].clone());
            }
            faces.insert(vectors(&p.fan, &face));
        }
    }
    Ok((faces, coeffs))
}

/// `X_U -> U` for a patch, with the surjectivity of `N¹(X/Z) -> N¹(X_U/U)` checked.
pub fn restrict_family(p: &Pair, patch: &[Vec<usize>]) -> Result<Restriction> {
    if patch.is_empty() {
        return Err(Error::Precondition("empty patch".into()));
    }
    let r = restrict_to_open(p, patch)?;
    if linalg::rank(&r.n1_map) != r.local.rank {
        return Err(Error::Invariant("restriction of divisor classes is not surjective".into()));
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct LocalRun {
    pub patch: usize,
    pub pair: Pair,
    pub scaling: TDivisor,
    pub trace: MMPTrace,
    pub outputs: Vec<(Rat, Pair)>,
}

impl LocalRun {
    pub fn output(&self, r: &Rat) -> Option<&Pair> {
        self.outputs.iter().find(|(s, _)| s == r).map(|(_, p)| p)
    }
}

fn tag(i: usize, e: Error) -> Error {
    match e {
        Error::Precondition(m) => Error::Precondition(format!("patch {i}: {m}")),
        Error::Invariant(m) => Error::Invariant(format!("patch {i}: {m}")),
        Error::Unsupported(m) => Error::Unsupported(format!("patch {i}: {m}")),
        other => other,
    }
}

/// Runs the scaled MMP on every patch and certifies each requested output by its
/// characterization.
pub fn run_local_mmps(p: &Pair, a: &TDivisor, cover: &BaseCover, rs: &[Rat]) -> Result<Vec<LocalRun>> {
    let mut runs = Vec::new();
    for (i, patch) in cover.patches.iter().enumerate() {
        let res = restrict_family(p, patch).map_err(|e| tag(i, e))?;
        let local = res.local.pair.clone();
        let scaling = res.restrict_divisor(a);
        let trace = run_mmp_with_scaling(&local, &scaling).map_err(|e| tag(i, e))?;
        let mut outputs = Vec::new();
        for r in rs {
            let out = output_at_scale(&local, &scaling, r).map_err(|e| tag(i, e))?;
            let report = verify_output_characterization(&local, &out.pair, &scaling, r).map_err(|e| tag(i, e))?;
            if !report.all_pass() {
                return Err(Error::Invariant(format!("patch {i}: local output at {r} fails its characterization")));
            }
            outputs.push((r.clone(), out.pair));
        }
        runs.push(LocalRun { patch: i, pair: local, scaling, trace, outputs });
    }
    Ok(runs)
}

/// Two local outputs disagree over a common open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MismatchReport {
    pub patches: (usize, usize),
    pub overlap: Vec<BaseCone>,
    pub left: Vec<Vec<IVec>>,
    pub right: Vec<Vec<IVec>>,
}

impl std::fmt::Display for MismatchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "patches {} and {} disagree over {} base cones ({} vs {} faces)",
            self.patches.0,
            self.patches.1,
            self.overlap.len(),
            self.left.len(),
            self.right.len()
        )
    }
}

/// Compares local outputs on overlaps and assembles the global model. The result is independent
/// of the order of `runs`.
pub fn glue_outputs(p: &Pair, cover: &BaseCover, runs: &[LocalRun], r: &Rat) -> Result<std::result::Result<Pair, MismatchReport>> {
    let mut sorted: Vec<&LocalRun> = runs.iter().collect();
    sorted.sort_by_key(|run| run.patch);
    let outs: Vec<(usize, &Pair)> = sorted
        .iter()
        .map(|run| run.output(r).map(|o| (run.patch, o)).ok_or_else(|| Error::Precondition(format!("patch {} has no output at {r}", run.patch))))
        .collect::<Result<_>>()?;
    for (x, &(i, pi)) in outs.iter().enumerate() {
        for &(j, pj) in &outs[x + 1..] {
            let ov = cover.overlap(i, j);
            let (fi, ci) = faces_over(pi, &ov)?;
            let (fj, cj) = faces_over(pj, &ov)?;
            if fi != fj || ci != cj {
                return Ok(Err(MismatchReport {
                    patches: (i, j),
                    overlap: ov.into_iter().collect(),
                    left: fi.into_iter().collect(),
                    right: fj.into_iter().collect(),
                }));
            }
        }
    }
    let base = p.base.clone().ok_or_else(|| Error::Precondition("pair has no base".into()))?;
    let rank = p.fan.rank;
    let mut rays: BTreeSet<IVec> = BTreeSet::new();
    let mut coeff: BTreeMap<IVec, Rat> = BTreeMap::new();
    let mut cones: BTreeSet<Vec<IVec>> = BTreeSet::new();
    for &(_, o) in &outs {
        for c in &o.fan.cones {
            cones.insert(vectors(&o.fan, c));
        }
        for (i, v) in o.fan.rays.iter().enumerate() {
            if o.fan.used_rays().contains(&i) {
                rays.insert(v.clone());
                coeff.insert(v.clone(), o.boundary.coeffs[i].clone());
            }
        }
    }
    let rays: Vec<IVec> = rays.into_iter().collect();
    let cones: Vec<Vec<usize>> = cones
        .iter()
        .map(|c| c.iter().map(|v| rays.iter().position(|w| w == v).expect("ray collected")).collect())
        .collect();
    let boundary = TDivisor::new(rays.iter().map(|v| coeff[v].clone()).collect());
    let fan = Fan::new(rank, rays, cones)?;
    if !validate_fan(&fan).is_valid() {
        return Err(Error::Invariant("glued cones do not form a fan".into()));
    }
    let glued = Pair::relative(fan, boundary, Some(base))?;
    for &(i, o) in &outs {
        let allowed = cover.allowed(i);
        if faces_over(&glued, &allowed)? != faces_over(o, &allowed)? {
            return Err(Error::Invariant(format!("glued model does not restrict to the output of patch {i}")));
        }
    }
    Ok(Ok(glued))
}

/// The output of the restricted input equals the restriction of the global output.
pub fn base_change_check(p: &Pair, a: &TDivisor, patch: &[Vec<usize>], r: &Rat) -> Result<bool> {
    let global = output_at_scale(p, a, r)?.pair;
    let res = restrict_family(p, patch)?;
    let local = output_at_scale(&res.local.pair, &res.restrict_divisor(a), r)?.pair;
    let base = p.base.as_ref().ok_or_else(|| Error::Precondition("pair has no base".into()))?;
    let mut allowed = BTreeSet::new();
    for c in patch {
        for f in base.fan.with_cones(vec![c.clone()]).all_faces() {
            allowed.insert(vectors(&base.fan, &f));
        }
    }
    Ok(faces_over(&global, &allowed)? == faces_over(&local, &allowed)?)
}
