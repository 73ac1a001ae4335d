//! Rational polyhedral cones with both descriptions kept in canonical form.
//!
//! A cone is `cone(rays) + span(lineality)`, equivalently
//! `{x : <n,x> >= 0 for n in facets, <e,x> = 0 for e in equations}`.
//! Facet normals are chosen inside the linear span of the cone, rays inside the orthogonal
//! complement of the lineality space, and every vector is a primitive integer vector.

use itertools::Itertools;
use num::{BigInt, Integer, Signed, ToPrimitive, Zero};

use super::lattice;
use super::linalg;
use super::qvec::QVec;
use super::rat::Rat;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PolyCone {
    pub dim: usize,
    pub rays: Vec<QVec>,
    pub lineality: Vec<QVec>,
    pub facets: Vec<QVec>,
    pub equations: Vec<QVec>,
}

/// Canonical basis of a subspace: reduced row echelon rows scaled to primitive integers.
pub fn canonical_basis(vs: &[QVec], n: usize) -> Vec<QVec> {
    let (r, _) = linalg::rref(vs, n);
    r.iter().map(|v| v.primitive()).collect()
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`.
pub fn project_out(v: &QVec, basis: &[QVec]) -> QVec {
    if basis.is_empty() {
        return v.clone();
    }
    let gram: Vec<QVec> = basis
        .iter()
        .map(|b| QVec(basis.iter().map(|c| b.dot(c)).collect()))
        .collect();
    let rhs: Vec<Rat> = basis.iter().map(|b| b.dot(v)).collect();
    let coef = linalg::solve(&gram, &rhs, basis.len()).expect("gram matrix of a basis is invertible");
    let mut out = v.clone();
    for (c, b) in coef.iter().zip(basis) {
        out = out.axpy(&-c.clone(), b);
    }
    out
}

fn dedup_primitive(vs: impl IntoIterator<Item = QVec>) -> Vec<QVec> {
    let mut out: Vec<QVec> = vs
        .into_iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.primitive())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Facet normals (inside `span(gens)`) of `cone(gens)`, by enumerating hyperplanes through
/// independent subsets. `equations` must be a basis of `span(gens)^⊥`.
fn brute_force_facets(gens: &[QVec], equations: &[QVec], n: usize, rank: usize) -> Vec<QVec> {
    if rank == 0 {
        return vec![];
    }
    let mut found: Vec<QVec> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for subset in (0..gens.len()).combinations(rank - 1) {
        let mut rows: Vec<QVec> = subset.iter().map(|&i| gens[i].clone()).collect();
        if linalg::rank_in(&rows, n) != rank - 1 {
            continue;
        }
        rows.extend(equations.iter().cloned());
        let ns = linalg::nullspace(&rows, n);
        if ns.len() != 1 {
            continue;
        }
        let normal = ns[0].primitive();
        if seen.contains(&normal) {
            continue;
        }
        let mut pos = false;
        let mut neg = false;
        for g in gens {
            let s = normal.dot(g);
            if s.is_positive() {
                pos = true;
            } else if s.is_negative() {
                neg = true;
            }
            if pos && neg {
                break;
            }
        }
        let chosen = match (pos, neg) {
            (true, false) => normal.clone(),
            (false, true) => -&normal,
            _ => {
                seen.insert(normal);
                continue;
            }
        };
        seen.insert(normal.clone());
        seen.insert(-&normal);
        found.push(chosen);
    }
    found.sort();
    found
}

impl PolyCone {
    /// `cone(gens)` in ambient dimension `dim`.
    pub fn from_generators(dim: usize, gens: &[QVec]) -> Result<PolyCone> {
        if let Some(g) = gens.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: g.dim() });
        }
        let gens = dedup_primitive(gens.iter().cloned());
        let equations = canonical_basis(&linalg::nullspace(&gens, dim), dim);
        let rank = dim - equations.len();
        let facets = brute_force_facets(&gens, &equations, dim, rank);
        let mut lin_rows = facets.clone();
        lin_rows.extend(equations.iter().cloned());
        let lineality = canonical_basis(&linalg::nullspace(&lin_rows, dim), dim);
        let target = rank - lineality.len();
        let mut rays = Vec::new();
        if target > 0 {
            for g in &gens {
                let tight: Vec<QVec> = facets.iter().filter(|f| f.dot(g).is_zero()).cloned().collect();
                if linalg::rank_in(&tight, dim) + 1 == target {
                    let p = project_out(g, &lineality);
                    if !p.is_zero() {
                        rays.push(p);
                    }
                }
            }
        }
        let rays = dedup_primitive(rays);
        Ok(PolyCone { dim, rays, lineality, facets, equations })
    }

    /// `{x : <n,x> >= 0 for all n}`.
    pub fn from_inequalities(dim: usize, normals: &[QVec]) -> Result<PolyCone> {
        Ok(Self::from_generators(dim, normals)?.dual())
    }

    /// `{x : <n,x> >= 0 for n in ineqs, <e,x> = 0 for e in eqs}`.
    pub fn from_constraints(dim: usize, ineqs: &[QVec], eqs: &[QVec]) -> Result<PolyCone> {
        let mut all: Vec<QVec> = ineqs.to_vec();
        for e in eqs {
            all.push(e.clone());
            all.push(-e);
        }
        Self::from_inequalities(dim, &all)
    }

    pub fn zero(dim: usize) -> PolyCone {
        Self::from_generators(dim, &[]).expect("empty generator list")
    }

    pub fn whole(dim: usize) -> PolyCone {
        Self::zero(dim).dual()
    }

    pub fn dual(&self) -> PolyCone {
        PolyCone {
            dim: self.dim,
            rays: self.facets.clone(),
            lineality: self.equations.clone(),
            facets: self.rays.clone(),
            equations: self.lineality.clone(),
        }
    }

    /// All generators as a plain list, lineality contributing both signs.
    pub fn generators(&self) -> Vec<QVec> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(-l);
        }
        g
    }

    /// All inequality normals, equations contributing both signs.
    pub fn normals(&self) -> Vec<QVec> {
        let mut g = self.facets.clone();
        for e in &self.equations {
            g.push(e.clone());
            g.push(-e);
        }
        g
    }

    /// Dimension of the linear span.
    pub fn cone_dim(&self) -> usize {
        self.dim - self.equations.len()
    }

    pub fn is_full_dim(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_zero_cone(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_pointed() && self.rays.len() == self.cone_dim()
    }

    pub fn contains(&self, x: &QVec) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
            && self.facets.iter().all(|f| !f.dot(x).is_negative())
    }

    pub fn contains_cone(&self, other: &PolyCone) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    /// Membership in the relative interior.
    pub fn contains_relint(&self, x: &QVec) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
            && self.facets.iter().all(|f| f.dot(x).is_positive())
    }

    /// Membership in the topological interior of the ambient space.
    pub fn contains_interior(&self, x: &QVec) -> bool {
        self.is_full_dim() && self.contains_relint(x)
    }

    pub fn set_eq(&self, other: &PolyCone) -> bool {
        self.dim == other.dim && self.contains_cone(other) && other.contains_cone(self)
    }

    pub fn intersect(&self, other: &PolyCone) -> PolyCone {
        let mut normals = self.normals();
        normals.extend(other.normals());
        Self::from_inequalities(self.dim, &normals).expect("dimensions agree")
    }

    /// A point in the relative interior: the sum of all generators.
    pub fn relint_point(&self) -> QVec {
        QVec::sum(&self.rays, self.dim)
    }

    /// Faces of codimension `k` (relative to the cone's own dimension).
    pub fn faces_of_codim(&self, k: usize) -> Result<Vec<PolyCone>> {
        let d = self.cone_dim();
        if k > d {
            return Err(Error::Precondition(format!("codimension {k} exceeds cone dimension {d}")));
        }
        if !self.is_pointed() && k > d - self.lineality.len() {
            return Ok(vec![]);
        }
        let mut level: Vec<(Vec<usize>, PolyCone)> = vec![((0..self.rays.len()).collect(), self.clone())];
        for _ in 0..k {
            let mut next: Vec<(Vec<usize>, PolyCone)> = Vec::new();
            for (idx, face) in &level {
                for n in &face.facets {
                    let sub: Vec<usize> = idx
                        .iter()
                        .copied()
                        .filter(|&i| n.dot(&self.rays[i]).is_zero())
                        .collect();
                    if next.iter().any(|(s, _)| *s == sub) {
                        continue;
                    }
                    let mut gens: Vec<QVec> = sub.iter().map(|&i| self.rays[i].clone()).collect();
                    for l in &self.lineality {
                        gens.push(l.clone());
                        gens.push(-l);
                    }
                    let f = PolyCone::from_generators(self.dim, &gens)?;
                    next.push((sub, f));
                }
            }
            level = next;
        }
        Ok(level.into_iter().map(|(_, f)| f).collect())
    }

    /// Smallest face containing `x` (which must lie in the cone).
    pub fn face_containing(&self, x: &QVec) -> PolyCone {
        let tight: Vec<&QVec> = self.facets.iter().filter(|f| f.dot(x).is_zero()).collect();
        let mut gens: Vec<QVec> = self
            .rays
            .iter()
            .filter(|r| tight.iter().all(|f| f.dot(r).is_zero()))
            .cloned()
            .collect();
        for l in &self.lineality {
            gens.push(l.clone());
            gens.push(-l);
        }
        PolyCone::from_generators(self.dim, &gens).expect("dimensions agree")
    }

    /// Triangulation of a pointed cone into simplicial cones using only its rays.
    pub fn triangulate(&self) -> Result<Vec<Vec<QVec>>> {
        if !self.is_pointed() {
            return Err(Error::Unsupported("triangulating a cone with lineality".into()));
        }
        let simplices = pulling_triangulation(&self.rays)?;
        Ok(simplices
            .into_iter()
            .map(|s| s.into_iter().map(|i| self.rays[i].clone()).collect())
            .collect())
    }

    /// Minimal generating set of the semigroup of lattice points of a pointed cone.
    pub fn hilbert_basis(&self, cap: usize) -> Result<Vec<QVec>> {
        if !self.is_pointed() {
            return Err(Error::Unsupported("Hilbert basis of a cone with lineality".into()));
        }
        let mut cands: Vec<QVec> = self.rays.clone();
        for simplex in self.triangulate()? {
            for p in fundamental_box_points(&simplex, cap)? {
                cands.push(p);
            }
        }
        cands.sort();
        cands.dedup();
        let basis: Vec<QVec> = cands
            .iter()
            .filter(|x| {
                !cands
                    .iter()
                    .any(|y| *y != **x && {
                        let d = &**x - y;
                        !d.is_zero() && self.contains(&d)
                    })
            })
            .cloned()
            .collect();
        Ok(basis)
    }
}

/// Nonzero lattice points of the half-open parallelotope `{Σ λ_i g_i : 0 <= λ_i < 1}`
/// for linearly independent integer vectors `g`.
pub fn fundamental_box_points(g: &[QVec], cap: usize) -> Result<Vec<QVec>> {
    if g.is_empty() {
        return Ok(vec![]);
    }
    let n = g[0].dim();
    let ints: Vec<Vec<i64>> = g
        .iter()
        .map(|v| v.to_i64().ok_or_else(|| Error::Precondition("box generators must be integral".into())))
        .collect::<Result<_>>()?;
    let sat = lattice::saturated_basis(&ints, n);
    let sat_q: Vec<QVec> = sat.iter().map(|v| lattice::to_qvec(v)).collect();
    // Coordinates of each generator in the saturated basis.
    let coords: Vec<QVec> = g
        .iter()
        .map(|v| linalg::coordinates(&sat_q, v).expect("generator in saturation"))
        .collect();
    let d = sat.len();
    let mult = linalg::abs_det(&coords);
    if mult > Rat::from_integer(BigInt::from(cap)) {
        return Err(Error::Unsupported(format!("fundamental box of size {mult} exceeds cap {cap}")));
    }
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for c in &coords {
        for j in 0..d {
            let x = c[j].to_integer().to_i64().expect("small coordinate");
            if x < 0 {
                lo[j] += x;
            } else {
                hi[j] += x;
            }
        }
    }
    // lambda = y * coords^{-1}; coords rows are the generators.
    let inv = linalg::inverse(&coords).ok_or_else(|| Error::Precondition("box generators dependent".into()))?;
    let mut out = Vec::new();
    let ranges: Vec<Vec<i64>> = (0..d).map(|j| (lo[j]..=hi[j]).collect()).collect();
    for y in ranges.into_iter().multi_cartesian_product() {
        if y.iter().all(|v| *v == 0) {
            continue;
        }
        let yq = QVec::from_ints(&y);
        let lambda: Vec<Rat> = (0..d)
            .map(|i| (0..d).fold(Rat::zero(), |acc, k| acc + &yq[k] * &inv[k][i]))
            .collect();
        if lambda.iter().all(|l| !l.is_negative() && l < &Rat::from_integer(1.into())) {
            let mut p = QVec::zeros(n);
            for (k, yk) in y.iter().enumerate() {
                if *yk != 0 {
                    p = p.axpy(&Rat::from_integer((*yk).into()), &sat_q[k]);
                }
            }
            out.push(p);
        }
    }
    Ok(out)
}

/// Pulling triangulation of `cone(vs)` where every vector spans an extremal ray.
/// Returns index sets into `vs`; the first vector of each recursive call is pulled.
pub fn pulling_triangulation(vs: &[QVec]) -> Result<Vec<Vec<usize>>> {
    let idx: Vec<usize> = (0..vs.len()).collect();
    pull(vs, &idx)
}

pub fn pull(vs: &[QVec], idx: &[usize]) -> Result<Vec<Vec<usize>>> {
    if idx.is_empty() {
        return Ok(vec![vec![]]);
    }
    let n = vs[0].dim();
    let gens: Vec<QVec> = idx.iter().map(|&i| vs[i].clone()).collect();
    let r = linalg::rank_in(&gens, n);
    if r == idx.len() {
        return Ok(vec![idx.to_vec()]);
    }
    let c = PolyCone::from_generators(n, &gens)?;
    if !c.is_pointed() {
        return Err(Error::Unsupported("triangulating a cone with lineality".into()));
    }
    let apex = idx[0];
    let mut out = Vec::new();
    for f in &c.facets {
        if f.dot(&vs[apex]).is_zero() {
            continue;
        }
        let sub: Vec<usize> = idx.iter().copied().filter(|&i| f.dot(&vs[i]).is_zero()).collect();
        for mut s in pull(vs, &sub)? {
            s.insert(0, apex);
            s.sort();
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

/// A subdivision of a cone: a list of cells of equal dimension.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub cells: Vec<PolyCone>,
}

impl Subdivision {
    pub fn new(cells: Vec<PolyCone>) -> Self {
        Subdivision { cells }
    }

    pub fn support(&self) -> Result<PolyCone> {
        let first = self.cells.first().ok_or_else(|| Error::Precondition("empty subdivision".into()))?;
        let gens: Vec<QVec> = self.cells.iter().flat_map(|c| c.generators()).collect();
        PolyCone::from_generators(first.dim, &gens)
    }

    /// Same cells as sets, in any order.
    pub fn set_eq(&self, other: &Subdivision) -> bool {
        self.cells.len() == other.cells.len()
            && self.cells.iter().all(|c| other.cells.iter().any(|d| d.set_eq(c)))
    }
}

/// Common refinement of subdivisions with a common support.
pub fn common_refinement(subs: &[Subdivision]) -> Result<Subdivision> {
    let first = subs.first().ok_or_else(|| Error::Precondition("no subdivisions".into()))?;
    let support = first.support()?;
    for s in &subs[1..] {
        if !s.support()?.set_eq(&support) {
            return Err(Error::Precondition("subdivisions have different supports".into()));
        }
    }
    let d = support.cone_dim();
    let mut cells = first.cells.clone();
    for s in &subs[1..] {
        let mut next: Vec<PolyCone> = Vec::new();
        for a in &cells {
            for b in &s.cells {
                let c = a.intersect(b);
                if c.cone_dim() == d && !next.iter().any(|x| x.set_eq(&c)) {
                    next.push(c);
                }
            }
        }
        cells = next;
    }
    Ok(Subdivision { cells })
}

/// Integer gcd of the numerators after clearing denominators (used for normalization checks).
pub fn content(v: &QVec) -> BigInt {
    v.primitive_integer().iter().fold(BigInt::zero(), |acc, x| acc.gcd(&x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qv;

    #[test]
    fn quadrant_is_self_dual() {
        let c = PolyCone::from_generators(2, &[qv![1, 0], qv![0, 1]]).unwrap();
        assert_eq!(c.facets, vec![qv![0, 1], qv![1, 0]]);
        assert!(c.dual().set_eq(&c));
    }

    #[test]
    fn zero_cone_has_four_normals() {
        let c = PolyCone::zero(2);
        assert_eq!(c.normals().len(), 4);
        assert!(c.contains(&qv![0, 0]));
        assert!(!c.contains(&qv![1, 0]));
    }

    #[test]
    fn skew_cone_facets() {
        let c = PolyCone::from_generators(2, &[qv![1, 0], qv![1, 2]]).unwrap();
        assert_eq!(c.facets, vec![qv![0, 1], qv![2, -1]]);
        let d = c.dual();
        assert!(d.set_eq(&PolyCone::from_generators(2, &[qv![0, 1], qv![2, -1]]).unwrap()));
    }

    #[test]
    fn halfline_dual_is_halfplane() {
        let c = PolyCone::from_generators(2, &[qv![1, 1]]).unwrap();
        let d = c.dual();
        assert_eq!(d.rays, vec![qv![1, 1]]);
        assert_eq!(d.lineality.len(), 1);
        assert!(d.contains(&qv![1, -1]) && d.contains(&qv![-1, 1]));
        assert!(!d.contains(&qv![-1, 0]));
    }

    #[test]
    fn faces() {
        let q = PolyCone::from_generators(2, &[qv![1, 0], qv![0, 1]]).unwrap();
        let f1 = q.faces_of_codim(1).unwrap();
        assert_eq!(f1.len(), 2);
        let f2 = q.faces_of_codim(2).unwrap();
        assert_eq!(f2.len(), 1);
        assert!(f2[0].is_zero_cone());
        assert!(q.faces_of_codim(3).is_err());
    }

    #[test]
    fn quadric_cone_triangulation() {
        let vs = vec![qv![0, 0, 1], qv![1, 0, 1], qv![1, 1, 1], qv![0, 1, 1]];
        let t = pulling_triangulation(&vs).unwrap();
        assert_eq!(t, vec![vec![0, 1, 2], vec![0, 2, 3]]);
    }

    #[test]
    fn hilbert_basis_of_skew_cone() {
        let c = PolyCone::from_generators(2, &[qv![1, 0], qv![1, 2]]).unwrap();
        assert_eq!(c.hilbert_basis(1000).unwrap(), vec![qv![1, 0], qv![1, 1], qv![1, 2]]);
    }

    #[test]
    fn refinement_of_halfplane() {
        let h1 = Subdivision::new(vec![
            PolyCone::from_generators(2, &[qv![1, 0], qv![0, 1]]).unwrap(),
            PolyCone::from_generators(2, &[qv![1, 0], qv![0, -1]]).unwrap(),
        ]);
        let h2 = Subdivision::new(vec![
            PolyCone::from_generators(2, &[qv![1, 1], qv![0, 1]]).unwrap(),
            PolyCone::from_generators(2, &[qv![1, 1], qv![0, -1]]).unwrap(),
        ]);
        let r = common_refinement(&[h1.clone(), h2]).unwrap();
        assert_eq!(r.cells.len(), 3);
        let same = common_refinement(&[h1.clone(), h1.clone()]).unwrap();
        assert!(same.set_eq(&h1));
    }
}
