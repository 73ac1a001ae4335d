//! Polyhedra `{x : <a,x> >= b, <c,x> = d}` with vertex/ray descriptions via homogenization.

use itertools::Itertools;
use num::{BigInt, Signed, ToPrimitive, Zero};

use super::cone::{pulling_triangulation, PolyCone};
use super::linalg;
use super::lp::{lp_optimize, solve_general, LpOutcome, Sense};
use super::qvec::QVec;
use super::rat::{int, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Polyhedron {
    pub dim: usize,
    pub ineqs: Vec<(QVec, Rat)>,
    pub eqs: Vec<(QVec, Rat)>,
}

/// Vertex/ray description. `vertices` is empty iff the polyhedron is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRep {
    pub vertices: Vec<QVec>,
    pub rays: Vec<QVec>,
    pub lineality: Vec<QVec>,
}

impl Polyhedron {
    pub fn new(dim: usize, ineqs: Vec<(QVec, Rat)>, eqs: Vec<(QVec, Rat)>) -> Self {
        debug_assert!(ineqs.iter().chain(&eqs).all(|(a, _)| a.dim() == dim));
        Polyhedron { dim, ineqs, eqs }
    }

    pub fn whole(dim: usize) -> Self {
        Self::new(dim, vec![], vec![])
    }

    pub fn empty(dim: usize) -> Self {
        Self::new(dim, vec![(QVec::zeros(dim), int(1))], vec![])
    }

    /// The unit cube `[0,1]^p`.
    pub fn unit_cube(p: usize) -> Self {
        let mut ineqs = Vec::new();
        for i in 0..p {
            ineqs.push((QVec::unit(p, i), int(0)));
            ineqs.push((-&QVec::unit(p, i), int(-1)));
        }
        Self::new(p, ineqs, vec![])
    }

    pub fn point(p: &QVec) -> Self {
        let n = p.dim();
        Self::new(n, vec![], (0..n).map(|i| (QVec::unit(n, i), p[i].clone())).collect())
    }

    pub fn contains(&self, x: &QVec) -> bool {
        self.ineqs.iter().all(|(a, b)| a.dot(x) >= *b) && self.eqs.iter().all(|(a, b)| a.dot(x) == *b)
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        let mut p = self.clone();
        p.ineqs.extend(other.ineqs.iter().cloned());
        p.eqs.extend(other.eqs.iter().cloned());
        p
    }

    pub fn with_ineq(&self, a: QVec, b: Rat) -> Polyhedron {
        let mut p = self.clone();
        p.ineqs.push((a, b));
        p
    }

    pub fn with_eq(&self, a: QVec, b: Rat) -> Polyhedron {
        let mut p = self.clone();
        p.eqs.push((a, b));
        p
    }

    pub fn optimize(&self, objective: &QVec, sense: Sense) -> LpOutcome {
        lp_optimize(objective, self, sense)
    }

    pub fn is_empty(&self) -> bool {
        !solve_general(&QVec::zeros(self.dim), &self.ineqs, &self.eqs, self.dim, Sense::Min).is_feasible()
    }

    /// A point satisfying strictly every inequality that is not an implicit equality.
    pub fn relative_interior_point(&self) -> Option<QVec> {
        let base = solve_general(&QVec::zeros(self.dim), &self.ineqs, &self.eqs, self.dim, Sense::Min);
        let LpOutcome::Optimal { witness: start, .. } = base else {
            return None;
        };
        let mut pts = vec![start];
        for (a, b) in &self.ineqs {
            if a.dot(pts.last().unwrap()) > *b || pts.iter().any(|p| a.dot(p) > *b) {
                continue;
            }
            let capped = self.with_ineq(-a, -(b + int(1)));
            if let LpOutcome::Optimal { value, witness } = capped.optimize(a, Sense::Max) {
                if value > *b {
                    pts.push(witness);
                }
            }
        }
        let k = Rat::from_integer(BigInt::from(pts.len()));
        Some(QVec::sum(&pts, self.dim).scale(&k.recip()))
    }

    /// Inequalities tight on the whole polyhedron (evaluated at a relative interior point).
    pub fn implicit_equalities(&self) -> Vec<(QVec, Rat)> {
        let Some(p) = self.relative_interior_point() else {
            return vec![];
        };
        self.ineqs.iter().filter(|(a, b)| a.dot(&p) == *b).cloned().collect()
    }

    /// Dimension of the affine hull, `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        let p = self.relative_interior_point()?;
        let mut rows: Vec<QVec> = self.eqs.iter().map(|(a, _)| a.clone()).collect();
        rows.extend(self.ineqs.iter().filter(|(a, b)| a.dot(&p) == *b).map(|(a, _)| a.clone()));
        Some(self.dim - linalg::rank_in(&rows, self.dim))
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dimension() == Some(self.dim)
    }

    /// Homogenization `{(x,t) : <a,x> - b t >= 0, t >= 0}`.
    pub fn homogenization(&self) -> PolyCone {
        let n = self.dim;
        let lift = |a: &QVec, b: &Rat| {
            let mut v = a.0.clone();
            v.push(-b.clone());
            QVec(v)
        };
        let mut ineqs: Vec<QVec> = self.ineqs.iter().map(|(a, b)| lift(a, b)).collect();
        ineqs.push(QVec::unit(n + 1, n));
        let eqs: Vec<QVec> = self.eqs.iter().map(|(a, b)| lift(a, b)).collect();
        PolyCone::from_constraints(n + 1, &ineqs, &eqs).expect("dimensions agree")
    }

    pub fn vrep(&self) -> VRep {
        let n = self.dim;
        let h = self.homogenization();
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for g in &h.rays {
            let t = &g[n];
            let x = QVec(g.0[..n].to_vec());
            if t.is_zero() {
                rays.push(x);
            } else {
                vertices.push(x.scale(&t.recip()));
            }
        }
        if vertices.is_empty() && !h.lineality.is_empty() {
            // Polyhedron with lineality: the minimal face is an affine subspace through any point.
            if let Some(p) = self.relative_interior_point() {
                let lin: Vec<QVec> = h.lineality.iter().map(|l| QVec(l.0[..n].to_vec())).collect();
                vertices.push(super::cone::project_out(&p, &lin));
            }
        }
        if vertices.is_empty() {
            return VRep { vertices, rays: vec![], lineality: vec![] };
        }
        vertices.sort();
        let lineality = h.lineality.iter().map(|l| QVec(l.0[..n].to_vec())).collect();
        VRep { vertices, rays, lineality }
    }

    /// Polyhedron with the given vertex/ray/lineality description.
    pub fn from_vrep(dim: usize, v: &VRep) -> Polyhedron {
        if v.vertices.is_empty() {
            return Polyhedron::empty(dim);
        }
        let mut gens: Vec<QVec> = v.vertices.iter().map(|x| x.concat(&QVec::from_ints(&[1]))).collect();
        gens.extend(v.rays.iter().map(|r| r.concat(&QVec::zeros(1))));
        for l in &v.lineality {
            let l1 = l.concat(&QVec::zeros(1));
            gens.push(-&l1);
            gens.push(l1);
        }
        let c = PolyCone::from_generators(dim + 1, &gens).expect("dimensions agree");
        let split = |w: &QVec| (QVec(w.0[..dim].to_vec()), -w[dim].clone());
        let ineqs: Vec<(QVec, Rat)> = c
            .facets
            .iter()
            .map(split)
            .filter(|(a, _)| !a.is_zero())
            .collect();
        let eqs: Vec<(QVec, Rat)> = c.equations.iter().map(split).collect();
        Polyhedron::new(dim, ineqs, eqs)
    }

    /// Image under the coordinate projection onto `coords`.
    pub fn project(&self, coords: &[usize]) -> Polyhedron {
        let v = self.vrep();
        let pick = |x: &QVec| QVec(coords.iter().map(|&i| x[i].clone()).collect());
        let w = VRep {
            vertices: v.vertices.iter().map(pick).collect(),
            rays: v.rays.iter().map(pick).collect(),
            lineality: v.lineality.iter().map(pick).collect(),
        };
        Polyhedron::from_vrep(coords.len(), &w)
    }

    pub fn is_bounded(&self) -> bool {
        let v = self.vrep();
        v.rays.is_empty() && v.lineality.is_empty()
    }

    /// Same set as another polyhedron (compared through vertex descriptions).
    pub fn set_eq(&self, other: &Polyhedron) -> bool {
        let a = self.vrep();
        let b = other.vrep();
        if a.vertices.is_empty() || b.vertices.is_empty() {
            return a.vertices.is_empty() && b.vertices.is_empty();
        }
        let inside = |p: &Polyhedron, v: &VRep| {
            v.vertices.iter().all(|x| p.contains(x))
                && v.rays.iter().chain(&v.lineality).all(|r| {
                    p.ineqs.iter().all(|(a, _)| !a.dot(r).is_negative())
                        && p.eqs.iter().all(|(a, _)| a.dot(r).is_zero())
                })
                && v.lineality.iter().all(|r| p.ineqs.iter().all(|(a, _)| a.dot(r).is_zero()))
        };
        inside(other, &a) && inside(self, &b)
    }

    /// Lattice points of a bounded polyhedron.
    pub fn lattice_points(&self, cap: usize) -> Result<Vec<QVec>> {
        let v = self.vrep();
        if v.vertices.is_empty() {
            return Ok(vec![]);
        }
        if !v.rays.is_empty() || !v.lineality.is_empty() {
            return Err(Error::Unsupported("lattice points of an unbounded polyhedron".into()));
        }
        let n = self.dim;
        let mut ranges = Vec::with_capacity(n);
        let mut total: usize = 1;
        for i in 0..n {
            let lo = v.vertices.iter().map(|x| x[i].clone()).min().unwrap().ceil();
            let hi = v.vertices.iter().map(|x| x[i].clone()).max().unwrap().floor();
            let lo = lo.to_integer().to_i64().unwrap();
            let hi = hi.to_integer().to_i64().unwrap();
            if hi < lo {
                return Ok(vec![]);
            }
            total = total.saturating_mul((hi - lo + 1) as usize);
            ranges.push((lo..=hi).collect::<Vec<i64>>());
        }
        if total > cap {
            return Err(Error::Unsupported(format!("lattice point box of size {total} exceeds cap {cap}")));
        }
        if n == 0 {
            return Ok(if self.contains(&QVec::zeros(0)) { vec![QVec::zeros(0)] } else { vec![] });
        }
        Ok(ranges
            .into_iter()
            .multi_cartesian_product()
            .map(|p| QVec::from_ints(&p))
            .filter(|p| self.contains(p))
            .collect())
    }

    /// `dim! * volume` for a bounded polyhedron; zero when not full-dimensional.
    pub fn normalized_volume(&self) -> Result<Rat> {
        let v = self.vrep();
        if v.vertices.is_empty() {
            return Ok(Rat::zero());
        }
        if !v.rays.is_empty() || !v.lineality.is_empty() {
            return Err(Error::Unsupported("volume of an unbounded polyhedron".into()));
        }
        if !self.is_full_dimensional() {
            return Ok(Rat::zero());
        }
        let lifted: Vec<QVec> = v.vertices.iter().map(|x| x.concat(&QVec::from_ints(&[1]))).collect();
        let mut total = Rat::zero();
        for s in pulling_triangulation(&lifted)? {
            let rows: Vec<QVec> = s.iter().map(|&i| lifted[i].clone()).collect();
            total += linalg::abs_det(&rows);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat::rat;
    use crate::qv;

    fn interval(lo: i64, hi: i64) -> Polyhedron {
        Polyhedron::new(1, vec![(qv![1], int(lo)), (qv![-1], int(-hi))], vec![])
    }

    #[test]
    fn relative_interior() {
        let p = interval(0, 1).relative_interior_point().unwrap();
        assert!(p[0] > int(0) && p[0] < int(1));
        assert_eq!(interval(3, 3).relative_interior_point(), Some(qv![3]));
        assert_eq!(interval(3, 1).relative_interior_point(), None);
    }

    #[test]
    fn triangle_volume_and_points() {
        // m1 >= -1, m2 >= 0, -m1 - m2 >= 0: triangle with vertices (-1,0),(0,0),(-1,1)
        let p = Polyhedron::new(2, vec![(qv![1, 0], int(-1)), (qv![0, 1], int(0)), (qv![-1, -1], int(0))], vec![]);
        assert_eq!(p.normalized_volume().unwrap(), int(1));
        assert_eq!(p.lattice_points(100).unwrap().len(), 3);
        assert_eq!(p.dimension(), Some(2));
    }

    #[test]
    fn projection_of_square() {
        let sq = Polyhedron::unit_cube(2);
        let cut = sq.with_ineq(qv![-1, -2], int(-1));
        let pr = cut.project(&[0]);
        assert!(pr.set_eq(&interval(0, 1)));
        let pr2 = cut.project(&[1]);
        assert!(pr2.set_eq(&Polyhedron::new(1, vec![(qv![1], int(0)), (qv![-1], rat(-1, 2))], vec![])));
    }

    #[test]
    fn vrep_of_halfline() {
        let v = Polyhedron::new(1, vec![(qv![1], int(3))], vec![]).vrep();
        assert_eq!(v.vertices, vec![qv![3]]);
        assert_eq!(v.rays, vec![qv![1]]);
    }
}
