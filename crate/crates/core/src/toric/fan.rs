use std::collections::BTreeSet;

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactla::cone::{pull, PolyCone};
use crate::exactla::lattice::{self, IVec};
use crate::exactla::{linalg, QVec, Rat};

/// A fan given by primitive rays and its maximal cones (sorted ray-index sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub rank: usize,
    pub rays: Vec<IVec>,
    pub cones: Vec<Vec<usize>>,
}

/// A codimension-one cone shared by two full-dimensional maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub left: usize,
    pub right: usize,
    pub rays: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanReport {
    pub simplicial: bool,
    pub complete: bool,
    pub errors: Vec<String>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Fan up to reordering: sorted ray vectors and sorted cones of sorted ray vectors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalFan {
    pub rank: usize,
    pub rays: Vec<IVec>,
    pub cones: Vec<Vec<IVec>>,
}

impl Fan {
    /// Builds a fan, keeping only inclusion-maximal cones. Geometry is not validated here.
    pub fn new(rank: usize, rays: Vec<IVec>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        if let Some(r) = rays.iter().find(|r| r.len() != rank) {
            return Err(Error::DimensionMismatch { expected: rank, got: r.len() });
        }
        let mut cs: Vec<Vec<usize>> = cones
            .into_iter()
            .map(|mut c| {
                c.sort();
                c.dedup();
                c
            })
            .collect();
        if let Some(&bad) = cs.iter().flatten().find(|&&i| i >= rays.len()) {
            return Err(Error::InvalidFan(format!("cone refers to missing ray {bad}")));
        }
        cs.sort();
        cs.dedup();
        let maximal: Vec<Vec<usize>> = cs
            .iter()
            .filter(|c| !cs.iter().any(|d| d != *c && c.iter().all(|i| d.contains(i))))
            .cloned()
            .collect();
        Ok(Fan { rank, rays, cones: maximal })
    }

    pub fn u(&self, i: usize) -> QVec {
        QVec::from_ints(&self.rays[i])
    }

    pub fn ray_vectors(&self, idx: &[usize]) -> Vec<QVec> {
        idx.iter().map(|&i| self.u(i)).collect()
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cone(&self, idx: &[usize]) -> PolyCone {
        PolyCone::from_generators(self.rank, &self.ray_vectors(idx)).expect("rays have the fan rank")
    }

    pub fn cone_dim(&self, idx: &[usize]) -> usize {
        linalg::rank_in(&self.ray_vectors(idx), self.rank)
    }

    pub fn is_full_dim_cone(&self, c: usize) -> bool {
        self.cone_dim(&self.cones[c]) == self.rank
    }

    pub fn ray_index(&self, v: &[i64]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| self.cone_dim(c) == c.len())
    }

    /// Index of the first maximal cone containing `v`.
    pub fn cone_containing(&self, v: &QVec) -> Option<usize> {
        (0..self.cones.len()).find(|&c| self.cone(&self.cones[c]).contains(v))
    }

    pub fn in_support(&self, v: &QVec) -> bool {
        self.cone_containing(v).is_some()
    }

    /// Rays of the smallest cone of the fan containing `v`.
    pub fn minimal_cone_containing(&self, v: &QVec) -> Option<Vec<usize>> {
        let c = self.cone_containing(v)?;
        let idx = &self.cones[c];
        let pc = self.cone(idx);
        let tight: Vec<&QVec> = pc.facets.iter().filter(|f| f.dot(v).is_zero()).collect();
        Some(
            idx.iter()
                .copied()
                .filter(|&i| tight.iter().all(|f| f.dot(&self.u(i)).is_zero()))
                .collect(),
        )
    }

    /// Walls between full-dimensional maximal cones.
    pub fn walls(&self) -> Vec<Wall> {
        let full: Vec<usize> = (0..self.cones.len()).filter(|&c| self.is_full_dim_cone(c)).collect();
        let mut out = Vec::new();
        for (a, &i) in full.iter().enumerate() {
            for &j in &full[a + 1..] {
                let common: Vec<usize> = self.cones[i].iter().copied().filter(|r| self.cones[j].contains(r)).collect();
                if common.len() + 1 >= self.rank && self.cone_dim(&common) + 1 == self.rank {
                    out.push(Wall { left: i, right: j, rays: common });
                }
            }
        }
        out
    }

    /// Rays of cone `c` that are not on the wall.
    pub fn off_wall(&self, c: usize, wall: &Wall) -> Vec<usize> {
        self.cones[c].iter().copied().filter(|r| !wall.rays.contains(r)).collect()
    }

    pub fn canonical(&self) -> CanonicalFan {
        let mut rays = self.rays.clone();
        rays.sort();
        let mut cones: Vec<Vec<IVec>> = self
            .cones
            .iter()
            .map(|c| {
                let mut v: Vec<IVec> = c.iter().map(|&i| self.rays[i].clone()).collect();
                v.sort();
                v
            })
            .collect();
        cones.sort();
        CanonicalFan { rank: self.rank, rays, cones }
    }

    pub fn same_as(&self, other: &Fan) -> bool {
        self.canonical() == other.canonical()
    }

    /// Rays that appear in at least one cone.
    pub fn used_rays(&self) -> BTreeSet<usize> {
        self.cones.iter().flatten().copied().collect()
    }

    /// Drops rays not used by any cone and renumbers. Returns the old index of each kept ray.
    pub fn compact(&self) -> (Fan, Vec<usize>) {
        let used: Vec<usize> = self.used_rays().into_iter().collect();
        let rays = used.iter().map(|&i| self.rays[i].clone()).collect();
        let cones = self
            .cones
            .iter()
            .map(|c| c.iter().map(|i| used.iter().position(|u| u == i).unwrap()).collect())
            .collect();
        (Fan::new(self.rank, rays, cones).expect("renumbering keeps dimensions"), used)
    }

    /// Same rays, different cones.
    pub fn with_cones(&self, cones: Vec<Vec<usize>>) -> Fan {
        Fan::new(self.rank, self.rays.clone(), cones).expect("same rays")
    }

    /// All faces of all maximal cones, as ray-index sets.
    pub fn all_faces(&self) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.cones {
            let pc = self.cone(c);
            for k in 0..=pc.cone_dim() {
                for f in pc.faces_of_codim(k).expect("codim within range") {
                    let idx: Vec<usize> = c.iter().copied().filter(|&i| f.contains(&self.u(i))).collect();
                    out.insert(idx);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Checks the fan axioms and derives the simplicial and complete flags.
pub fn validate_fan(f: &Fan) -> FanReport {
    let mut errors = Vec::new();
    for (i, r) in f.rays.iter().enumerate() {
        if lattice::is_zero(r) {
            errors.push(format!("ray {i} is zero"));
        } else if !lattice::is_primitive(r) {
            errors.push(format!("ray {i} = {r:?} is not primitive"));
        }
    }
    if !errors.is_empty() {
        return FanReport { simplicial: false, complete: false, errors };
    }
    let pcs: Vec<PolyCone> = f.cones.iter().map(|c| f.cone(c)).collect();
    for (c, pc) in f.cones.iter().zip(&pcs) {
        if !pc.is_pointed() {
            errors.push(format!("cone {c:?} is not strongly convex"));
            continue;
        }
        if pc.rays.len() != c.len() {
            errors.push(format!("cone {c:?} lists a non-extremal ray"));
        }
    }
    for a in 0..f.cones.len() {
        for b in (a + 1)..f.cones.len() {
            let common: Vec<usize> = f.cones[a].iter().copied().filter(|r| f.cones[b].contains(r)).collect();
            let meet = pcs[a].intersect(&pcs[b]);
            let face = f.cone(&common);
            let is_face = |pc: &PolyCone, idx: &[usize]| {
                let m = pc.face_containing(&face.relint_point());
                let rays_of_m: Vec<usize> = idx.iter().copied().filter(|&i| m.contains(&f.u(i))).collect();
                rays_of_m == common
            };
            if !meet.set_eq(&face) || !is_face(&pcs[a], &f.cones[a]) || !is_face(&pcs[b], &f.cones[b]) {
                errors.push(format!("cones {:?} and {:?} do not meet in a common face", f.cones[a], f.cones[b]));
            }
        }
    }
    let simplicial = f.is_simplicial();
    let complete = errors.is_empty() && is_complete(f, &pcs);
    FanReport { simplicial, complete, errors }
}

fn is_complete(f: &Fan, pcs: &[PolyCone]) -> bool {
    if f.rank == 0 {
        return true;
    }
    if f.cones.is_empty() || pcs.iter().any(|p| !p.is_full_dim()) {
        return false;
    }
    // Every facet of every maximal cone must be shared with another maximal cone.
    for (i, (c, pc)) in f.cones.iter().zip(pcs).enumerate() {
        for n in &pc.facets {
            let facet: Vec<usize> = c.iter().copied().filter(|&r| n.dot(&f.u(r)).is_zero()).collect();
            let shared = f
                .cones
                .iter()
                .enumerate()
                .any(|(j, d)| j != i && facet.iter().all(|r| d.contains(r)));
            if !shared {
                return false;
            }
        }
    }
    // Sampling cross-check.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..64 {
        let v: Vec<i64> = (0..f.rank).map(|_| rng.gen_range(-50..=50)).collect();
        if !pcs.iter().any(|p| p.contains(&QVec::from_ints(&v))) {
            return false;
        }
    }
    true
}

/// Star subdivision at a primitive vector `v` in the support. The new ray is appended last.
pub fn star_subdivision(f: &Fan, v: &[i64]) -> Result<(Fan, LatticeMap)> {
    if !lattice::is_primitive(v) {
        return Err(Error::Precondition(format!("{v:?} is not primitive")));
    }
    if f.ray_index(v).is_some() {
        return Err(Error::Precondition(format!("{v:?} is already a ray")));
    }
    let vq = QVec::from_ints(v);
    if !f.in_support(&vq) {
        return Err(Error::Precondition(format!("{v:?} lies outside the support")));
    }
    let new = f.rays.len();
    let mut rays = f.rays.clone();
    rays.push(v.to_vec());
    let mut cones = Vec::new();
    for c in &f.cones {
        let pc = f.cone(c);
        if !pc.contains(&vq) {
            cones.push(c.clone());
            continue;
        }
        for n in &pc.facets {
            if n.dot(&vq).is_zero() {
                continue;
            }
            let mut facet: Vec<usize> = c.iter().copied().filter(|&r| n.dot(&f.u(r)).is_zero()).collect();
            facet.push(new);
            cones.push(facet);
        }
        if pc.facets.is_empty() {
            cones.push(vec![new]);
        }
    }
    let g = Fan::new(f.rank, rays, cones)?;
    Ok((g, LatticeMap::identity(f.rank)))
}

/// Simplicial refinement using only existing rays (pulling triangulation in ray-index order).
pub fn q_factorialize(f: &Fan) -> Result<(Fan, LatticeMap)> {
    let all: Vec<QVec> = (0..f.n_rays()).map(|i| f.u(i)).collect();
    let mut cones = Vec::new();
    for c in &f.cones {
        if f.cone_dim(c) == c.len() {
            cones.push(c.clone());
        } else {
            cones.extend(pull(&all, c)?);
        }
    }
    Ok((Fan::new(f.rank, f.rays.clone(), cones)?, LatticeMap::identity(f.rank)))
}

pub fn is_q_factorial(f: &Fan) -> bool {
    f.is_simplicial()
}

/// Integer matrix from a source lattice to a target lattice (rows = target coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    pub source_rank: usize,
    pub target_rank: usize,
    pub matrix: Vec<IVec>,
}

impl LatticeMap {
    pub fn new(source_rank: usize, matrix: Vec<IVec>) -> Result<LatticeMap> {
        if let Some(r) = matrix.iter().find(|r| r.len() != source_rank) {
            return Err(Error::DimensionMismatch { expected: source_rank, got: r.len() });
        }
        Ok(LatticeMap { source_rank, target_rank: matrix.len(), matrix })
    }

    pub fn identity(n: usize) -> LatticeMap {
        let matrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        LatticeMap { source_rank: n, target_rank: n, matrix }
    }

    /// The map to the zero lattice (structure map to a point).
    pub fn to_point(n: usize) -> LatticeMap {
        LatticeMap { source_rank: n, target_rank: 0, matrix: vec![] }
    }

    pub fn apply(&self, v: &[i64]) -> IVec {
        self.matrix.iter().map(|r| lattice::dot(r, v)).collect()
    }

    pub fn apply_q(&self, v: &QVec) -> QVec {
        QVec(
            self.matrix
                .iter()
                .map(|r| QVec::from_ints(r).dot(v))
                .collect(),
        )
    }

    pub fn compose(&self, first: &LatticeMap) -> LatticeMap {
        let matrix = self
            .matrix
            .iter()
            .map(|r| (0..first.source_rank).map(|j| (0..first.target_rank).map(|k| r[k] * first.matrix[k][j]).sum()).collect())
            .collect();
        LatticeMap { source_rank: first.source_rank, target_rank: self.target_rank, matrix }
    }

    pub fn is_identity(&self) -> bool {
        *self == LatticeMap::identity(self.source_rank)
    }

    pub fn is_invertible_over_q(&self) -> bool {
        self.source_rank == self.target_rank
            && linalg::rank_in(&self.matrix.iter().map(|r| QVec::from_ints(r)).collect::<Vec<_>>(), self.source_rank)
                == self.source_rank
    }

    /// Whether every cone of `source` maps into some cone of `target`.
    pub fn is_compatible(&self, source: &Fan, target: &Fan) -> bool {
        source.cones.iter().all(|c| {
            let imgs: Vec<QVec> = c.iter().map(|&i| self.apply_q(&source.u(i))).collect();
            target.cones.iter().any(|d| {
                let pc = target.cone(d);
                imgs.iter().all(|x| pc.contains(x))
            }) || (target.rank == 0)
        })
    }
}

/// Projectivity test relative to a base: a piecewise linear function, linear on each cone,
/// strictly convex across every wall that the base contracts. Returns the slopes on success.
pub fn strictly_convex_support(f: &Fan, contracted: &[bool]) -> Option<Vec<QVec>> {
    use crate::exactla::lp::{solve_general, LpOutcome, Sense};
    let walls = f.walls();
    let nc = f.cones.len();
    let n = f.rank;
    let nv = nc * n;
    let var = |c: usize, k: usize| c * n + k;
    let mut eqs: Vec<(QVec, Rat)> = Vec::new();
    let mut ineqs: Vec<(QVec, Rat)> = Vec::new();
    for (w, wall) in walls.iter().enumerate() {
        for &r in &wall.rays {
            let mut a = QVec::zeros(nv);
            for k in 0..n {
                a[var(wall.left, k)] = Rat::from_integer(f.rays[r][k].into());
                a[var(wall.right, k)] = -Rat::from_integer(f.rays[r][k].into());
            }
            eqs.push((a, Rat::from_integer(0.into())));
        }
        if contracted[w] {
            // <m_left - m_right, u_b> >= 1 for an off-wall ray u_b of the right cone.
            let b = f.off_wall(wall.right, wall)[0];
            let mut a = QVec::zeros(nv);
            for k in 0..n {
                a[var(wall.left, k)] = Rat::from_integer(f.rays[b][k].into());
                a[var(wall.right, k)] = -Rat::from_integer(f.rays[b][k].into());
            }
            ineqs.push((a, Rat::from_integer(1.into())));
        }
    }
    match solve_general(&QVec::zeros(nv), &ineqs, &eqs, nv, Sense::Min) {
        LpOutcome::Optimal { witness, .. } => Some((0..nc).map(|c| QVec(witness[c * n..(c + 1) * n].to_vec())).collect()),
        _ => None,
    }
}

/// Sign of `x` as -1, 0 or 1.
pub fn sign(x: &Rat) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn p2_is_complete_and_simplicial() {
        let r = validate_fan(&p2());
        assert!(r.is_valid() && r.simplicial && r.complete);
        assert_eq!(p2().walls().len(), 3);
    }

    #[test]
    fn quadrant_is_not_complete() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        let r = validate_fan(&f);
        assert!(r.is_valid() && !r.complete);
    }

    #[test]
    fn non_primitive_ray_rejected() {
        let f = Fan::new(2, vec![vec![2, 0]], vec![vec![0]]).unwrap();
        assert!(!validate_fan(&f).is_valid());
    }

    #[test]
    fn overlapping_cones_rejected() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]], vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(!validate_fan(&f).is_valid());
    }

    #[test]
    fn star_subdivision_of_p2_is_f1() {
        let (g, _) = star_subdivision(&p2(), &[1, 1]).unwrap();
        let r = validate_fan(&g);
        assert!(r.is_valid() && r.complete);
        assert_eq!(g.cones.len(), 4);
        assert!(star_subdivision(&p2(), &[1, 0]).is_err());
    }

    #[test]
    fn quadric_cone_q_factorialization() {
        let f = Fan::new(3, vec![vec![0, 0, 1], vec![1, 0, 1], vec![1, 1, 1], vec![0, 1, 1]], vec![vec![0, 1, 2, 3]]).unwrap();
        assert!(!is_q_factorial(&f));
        let (g, _) = q_factorialize(&f).unwrap();
        assert_eq!(g.cones, vec![vec![0, 1, 2], vec![0, 2, 3]]);
        assert!(is_q_factorial(&g));
    }

    #[test]
    fn p2_is_projective() {
        let f = p2();
        assert!(strictly_convex_support(&f, &[true, true, true]).is_some());
    }
}
