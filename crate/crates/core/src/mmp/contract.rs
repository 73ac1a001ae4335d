use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};

use super::threshold::ExtremalRay;
use crate::error::{Error, Result};
use crate::exactla::lattice::{self, IVec};
use crate::exactla::{linalg, PolyCone, QVec, Rat};
use crate::toric::divisor::{cartier_data, linearly_equivalent, pullback_divisor, TDivisor};
use crate::toric::fan::{validate_fan, Fan, LatticeMap};
use crate::toric::pair::{Base, Pair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContractionKind {
    MoriFiber,
    Divisorial,
    Flip,
}

impl ContractionKind {
    pub fn label(self) -> &'static str {
        match self {
            ContractionKind::MoriFiber => "MoriFiber",
            ContractionKind::Divisorial => "Divisorial",
            ContractionKind::Flip => "Flip",
        }
    }
}

/// The contraction of an extremal ray. For a small ray only `y_fan` is set; the flip then
/// supplies the new model.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub kind: ContractionKind,
    pub ray: ExtremalRay,
    /// Maximal cones of `X` glued together, one group per cone of `Y`.
    pub groups: Vec<Vec<usize>>,
    /// The (possibly non-simplicial) fan of `Y` in the lattice of `X`, before any quotient.
    pub y_fan: Fan,
    pub target: Option<Pair>,
    pub removed_ray: Option<usize>,
    /// `N_X -> N_Y`.
    pub map: LatticeMap,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

/// Sign pattern of the wall relation: numbers of negative coefficients among the wall rays.
fn negative_count(c: &crate::cones::CurveClass) -> usize {
    c.wall.rays.iter().filter(|&&i| c.degrees[i].is_negative()).count()
}

pub fn contract_ray(p: &Pair, ray: &ExtremalRay) -> Result<Contraction> {
    let f = &p.fan;
    let nc = f.cones.len();
    let mut parent: Vec<usize> = (0..nc).collect();
    for c in &ray.curves {
        let (a, b) = (find(&mut parent, c.wall.left), find(&mut parent, c.wall.right));
        parent[a] = b;
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nc {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = by_root.into_values().collect();

    let mut lineality: Vec<IVec> = Vec::new();
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    let mut y_cones: Vec<Vec<usize>> = Vec::new();
    for g in &groups {
        let rays: BTreeSet<usize> = g.iter().flat_map(|&c| f.cones[c].iter().copied()).collect();
        let rays: Vec<usize> = rays.into_iter().collect();
        let pc = PolyCone::from_generators(f.rank, &f.ray_vectors(&rays))?;
        lineality.extend(pc.lineality.iter().map(lattice::primitive_of));
        let kept: Vec<usize> = if pc.is_pointed() {
            rays.iter().copied().filter(|&i| pc.rays.iter().any(|r| r.primitive() == f.u(i).primitive())).collect()
        } else {
            rays.clone()
        };
        removed.extend(rays.iter().copied().filter(|i| !kept.contains(i)));
        y_cones.push(kept);
    }
    let reid = negative_count(ray.curve());
    let kind = if !lineality.is_empty() {
        ContractionKind::MoriFiber
    } else if removed.len() == 1 {
        ContractionKind::Divisorial
    } else if removed.is_empty() {
        ContractionKind::Flip
    } else {
        return Err(Error::Precondition("contracting the ray removes several divisors; it is not extremal".into()));
    };
    let expected = match reid {
        0 => ContractionKind::MoriFiber,
        1 => ContractionKind::Divisorial,
        _ => ContractionKind::Flip,
    };
    if kind != expected {
        return Err(Error::Invariant(format!(
            "contraction looks {} but the wall relation predicts {}",
            kind.label(),
            expected.label()
        )));
    }
    let y_fan = Fan::new(f.rank, f.rays.clone(), y_cones.clone())?;
    let mut out = Contraction {
        kind,
        ray: ray.clone(),
        groups,
        y_fan,
        target: None,
        removed_ray: removed.iter().next().copied(),
        map: LatticeMap::identity(f.rank),
    };
    match kind {
        ContractionKind::Flip => {}
        ContractionKind::Divisorial => {
            let (fan, kept) = out.y_fan.compact();
            let boundary = p.boundary.reindex(&kept);
            let target = Pair::relative(fan, boundary, p.base.clone())?;
            if !target.is_projective()? {
                return Err(Error::NotProjective("divisorial contraction target".into()));
            }
            out.target = Some(target);
        }
        ContractionKind::MoriFiber => {
            let (fan, map) = quotient_fan(f, &y_cones, &lineality)?;
            let base = match &p.base {
                None => None,
                Some(b) => Some(Base { fan: b.fan.clone(), map: factor_through(&b.map, &map)? }),
            };
            let target = Pair::relative(fan.clone(), TDivisor::zero(fan.n_rays()), base)?;
            out.target = Some(target);
            out.map = map;
        }
    }
    Ok(out)
}

/// Image of the glued cones in `N / (saturated lineality)`.
fn quotient_fan(f: &Fan, cones: &[Vec<usize>], lineality: &[IVec]) -> Result<(Fan, LatticeMap)> {
    let sat = lattice::saturated_basis(lineality, f.rank);
    let rows = lattice::integer_kernel(&sat, f.rank);
    let map = LatticeMap::new(f.rank, rows)?;
    let mut rays: Vec<IVec> = Vec::new();
    let mut out_cones = Vec::new();
    for c in cones {
        let mut idx = Vec::new();
        for &i in c {
            let w = map.apply(&f.rays[i]);
            if lattice::is_zero(&w) {
                continue;
            }
            let w = lattice::primitive(&w);
            let k = match rays.iter().position(|r| *r == w) {
                Some(k) => k,
                None => {
                    rays.push(w);
                    rays.len() - 1
                }
            };
            idx.push(k);
        }
        out_cones.push(idx);
    }
    let all: Vec<QVec> = rays.iter().map(|r| QVec::from_ints(r)).collect();
    // Keep only extremal rays of each image cone.
    let target_rank = map.target_rank;
    let out_cones: Vec<Vec<usize>> = out_cones
        .into_iter()
        .map(|idx: Vec<usize>| {
            let gens: Vec<QVec> = idx.iter().map(|&k| all[k].clone()).collect();
            match PolyCone::from_generators(target_rank, &gens) {
                Ok(pc) => idx.into_iter().filter(|&k| pc.rays.iter().any(|r| r.primitive() == all[k].primitive())).collect(),
                Err(_) => idx,
            }
        })
        .collect();
    let fan = Fan::new(target_rank, rays, out_cones)?;
    let (fan, _) = fan.compact();
    if !validate_fan(&fan).is_valid() {
        return Err(Error::Invariant("image of a fibre-type contraction is not a fan".into()));
    }
    Ok((fan, map))
}

/// `B'` with `B = B' ∘ Q`, where `Q` is a surjective lattice map.
fn factor_through(b: &LatticeMap, q: &LatticeMap) -> Result<LatticeMap> {
    let qrows: Vec<QVec> = q.matrix.iter().map(|r| QVec::from_ints(r)).collect();
    let cols = linalg::transpose(&qrows, q.source_rank);
    let mut out = Vec::new();
    for row in &b.matrix {
        let rhs: Vec<Rat> = row.iter().map(|&x| Rat::from_integer(x.into())).collect();
        let sol = linalg::solve(&cols, &rhs, q.target_rank)
            .ok_or_else(|| Error::Precondition("structure map does not factor through the fibration".into()))?;
        out.push(sol.to_i64().ok_or_else(|| Error::Invariant("factored structure map is not integral".into()))?);
    }
    LatticeMap::new(q.target_rank, out)
}

/// Certificates of a good contraction: divisors orthogonal to the ray descend, the scaling
/// direction `-(K+Δ)` does not.
#[derive(Clone, Debug)]
pub struct GoodnessReport {
    pub descending_checked: usize,
    pub all_descend: bool,
    pub negative_does_not_descend: bool,
}

impl GoodnessReport {
    pub fn ok(&self) -> bool {
        self.all_descend && self.negative_does_not_descend
    }
}

/// Whether `L` is the pullback of a `Q`-Cartier divisor from the target.
pub fn descends(p: &Pair, c: &Contraction, l: &TDivisor) -> Result<bool> {
    let f = &p.fan;
    let cd = cartier_data(l, f)?;
    match c.kind {
        ContractionKind::Divisorial => {
            let target = c.target.as_ref().expect("divisorial target");
            let (_, kept) = c.y_fan.compact();
            let pushed = l.reindex(&kept);
            let Ok(back) = pullback_divisor(&LatticeMap::identity(f.rank), f, &target.fan, &pushed) else {
                return Ok(false);
            };
            Ok(linearly_equivalent(&back, l, f).is_some())
        }
        _ => {
            for g in &c.groups {
                for &s in &g[1..] {
                    if cd.m[s] != cd.m[g[0]] {
                        return Ok(false);
                    }
                }
            }
            if c.kind == ContractionKind::MoriFiber {
                let q: Vec<QVec> = c.map.matrix.iter().map(|r| QVec::from_ints(r)).collect();
                // Each slope must vanish on the kernel of the quotient, i.e. lie in the row space.
                let m0 = &cd.m[c.groups[0][0]];
                for g in &c.groups {
                    let d = &cd.m[g[0]] - m0;
                    if !linalg::in_span(&q, &d) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

pub fn check_good_contraction(p: &Pair, c: &Contraction) -> Result<GoodnessReport> {
    let curve = c.ray.curve();
    let h = p.k_plus_delta().neg();
    let hc = curve.degree(&h);
    if !hc.is_positive() {
        return Err(Error::Precondition("-(K+Δ) is not positive on the ray".into()));
    }
    let mut all = true;
    let mut n = 0;
    for i in 0..p.n_rays() {
        let d = TDivisor::prime(p.n_rays(), i);
        let l = d.sub(&h.scale(&(curve.degree(&d) / &hc)));
        debug_assert!(curve.degree(&l).is_zero());
        n += 1;
        if !descends(p, c, &l)? {
            all = false;
        }
    }
    Ok(GoodnessReport { descending_checked: n, all_descend: all, negative_does_not_descend: !descends(p, c, &h)? })
}
