use num::{BigInt, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactla::lattice;
use crate::exactla::{linalg, PolyCone, QVec, Rat};
use crate::toric::divisor::{cartier_data, TDivisor};
use crate::toric::fan::Wall;
use crate::toric::pair::Pair;

/// A contracted torus-invariant curve (a wall) with its intersection numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    pub wall: Wall,
    /// `(D_ρ · C)` for every ray `ρ`.
    pub degrees: Vec<Rat>,
    /// Coordinates in `N₁`: intersection numbers with the basis divisors.
    pub class: QVec,
}

impl CurveClass {
    pub fn degree(&self, d: &TDivisor) -> Rat {
        d.coeffs.iter().zip(&self.degrees).fold(Rat::zero(), |acc, (a, b)| acc + a * b)
    }
}

/// Intersection numbers `(D_ρ · C)` for the curve of a simplicial wall, from the wall relation
/// normalized so that the off-wall coefficients are `mult τ / mult σ` and `mult τ / mult σ'`.
pub fn wall_degrees(p: &Pair, wall: &Wall) -> Result<Vec<Rat>> {
    let f = &p.fan;
    let n = f.rank;
    let left = &f.cones[wall.left];
    let right = &f.cones[wall.right];
    if left.len() != n || right.len() != n || wall.rays.len() + 1 != n {
        return Err(Error::Precondition(format!("wall {:?} is not simplicial", wall.rays)));
    }
    let a = f.off_wall(wall.left, wall)[0];
    let b = f.off_wall(wall.right, wall)[0];
    let tau: Vec<Vec<i64>> = wall.rays.iter().map(|&i| f.rays[i].clone()).collect();
    let mult_tau = lattice::multiplicity(&tau, n);
    let sig: Vec<Vec<i64>> = left.iter().map(|&i| f.rays[i].clone()).collect();
    let sig2: Vec<Vec<i64>> = right.iter().map(|&i| f.rays[i].clone()).collect();
    let mult_s = lattice::multiplicity(&sig, n);
    let mult_s2 = lattice::multiplicity(&sig2, n);
    // Relation c_a u_a + c_b u_b + Σ c_ρ u_ρ = 0.
    let mut cols: Vec<usize> = vec![a, b];
    cols.extend(wall.rays.iter().copied());
    let rows: Vec<QVec> = (0..n)
        .map(|k| QVec(cols.iter().map(|&i| Rat::from_integer(f.rays[i][k].into())).collect()))
        .collect();
    let ns = linalg::nullspace(&rows, cols.len());
    if ns.len() != 1 {
        return Err(Error::Invariant(format!("wall {:?} has no unique relation", wall.rays)));
    }
    let rel = &ns[0];
    let ca = Rat::new(BigInt::from(mult_tau), BigInt::from(mult_s));
    let scale = &ca / &rel[0];
    let rel = rel.scale(&scale);
    let cb = Rat::new(BigInt::from(mult_tau), BigInt::from(mult_s2));
    if rel[1] != cb {
        return Err(Error::Invariant(format!("wall relation for {:?} violates the multiplicity convention", wall.rays)));
    }
    let mut deg = vec![Rat::zero(); f.n_rays()];
    for (k, &i) in cols.iter().enumerate() {
        deg[i] = rel[k].clone();
    }
    Ok(deg)
}

/// Independent oracle: `(D · C) = k` where `m_σ - m_σ' = k n_τ`, with `n_τ` the primitive normal
/// of the wall that is positive on the off-wall ray of `σ'`.
pub fn cartier_degree(p: &Pair, wall: &Wall, d: &TDivisor) -> Result<Rat> {
    let f = &p.fan;
    let cd = cartier_data(d, f)?;
    let tau: Vec<Vec<i64>> = wall.rays.iter().map(|&i| f.rays[i].clone()).collect();
    let ker = lattice::integer_kernel(&tau, f.rank);
    if ker.len() != 1 {
        return Err(Error::Precondition("wall does not have codimension one".into()));
    }
    let b = f.off_wall(wall.right, wall)[0];
    let mut normal = QVec::from_ints(&ker[0]);
    if normal.dot(&f.u(b)).is_negative() {
        normal = -&normal;
    }
    let diff = &cd.m[wall.left] - &cd.m[wall.right];
    let k = normal
        .iter()
        .zip(diff.iter())
        .find(|(x, _)| !x.is_zero())
        .map(|(x, y)| y / x)
        .unwrap_or_else(Rat::zero);
    if diff != normal.scale(&k) {
        return Err(Error::Invariant("Cartier data do not agree on a wall".into()));
    }
    Ok(k)
}

/// `N¹(X/Z)` and `N₁(X/Z)` built from contracted wall curves.
#[derive(Clone, Debug)]
pub struct NumSpace {
    pub pair: Pair,
    pub rank: usize,
    pub basis_rays: Vec<usize>,
    pub curves: Vec<CurveClass>,
    pub basis_curves: Vec<usize>,
    pub mori: PolyCone,
}

impl NumSpace {
    pub fn build(p: &Pair) -> Result<NumSpace> {
        let walls = p.contracted_walls()?;
        let mut degs = Vec::with_capacity(walls.len());
        for w in &walls {
            degs.push(wall_degrees(p, w)?);
        }
        let nr = p.n_rays();
        let columns: Vec<QVec> = (0..nr).map(|j| QVec(degs.iter().map(|d| d[j].clone()).collect())).collect();
        let basis_rays = linalg::independent_subset(&columns);
        let rank = basis_rays.len();
        let curves: Vec<CurveClass> = walls
            .into_iter()
            .zip(degs)
            .map(|(wall, degrees)| {
                let class = QVec(basis_rays.iter().map(|&j| degrees[j].clone()).collect());
                CurveClass { wall, degrees, class }
            })
            .collect();
        let classes: Vec<QVec> = curves.iter().map(|c| c.class.clone()).collect();
        let basis_curves = linalg::independent_subset(&classes);
        if basis_curves.len() != rank {
            return Err(Error::Invariant("intersection pairing is degenerate".into()));
        }
        let mori = PolyCone::from_generators(rank, &classes)?;
        Ok(NumSpace { pair: p.clone(), rank, basis_rays, curves, basis_curves, mori })
    }

    /// Matrix of `(D_{b_i} · C_{c_k})` over the basis divisors and basis curves.
    pub fn pairing_matrix(&self) -> Vec<QVec> {
        (0..self.rank)
            .map(|i| QVec(self.basis_curves.iter().map(|&k| self.curves[k].class[i].clone()).collect()))
            .collect()
    }

    pub fn intersection(&self, d: &TDivisor, c: &CurveClass) -> Result<Rat> {
        if d.len() != self.pair.n_rays() {
            return Err(Error::DimensionMismatch { expected: self.pair.n_rays(), got: d.len() });
        }
        Ok(c.degree(d))
    }

    /// Numerical class of `D` in basis-divisor coordinates, so that `D · C = class(D) · C.class`.
    pub fn divisor_class(&self, d: &TDivisor) -> Result<QVec> {
        if d.len() != self.pair.n_rays() {
            return Err(Error::DimensionMismatch { expected: self.pair.n_rays(), got: d.len() });
        }
        let rows: Vec<QVec> = self.curves.iter().map(|c| c.class.clone()).collect();
        let rhs: Vec<Rat> = self.curves.iter().map(|c| c.degree(d)).collect();
        linalg::solve(&rows, &rhs, self.rank).ok_or_else(|| Error::Invariant("divisor class equation inconsistent".into()))
    }

    /// A divisor (supported on basis rays) with the given class.
    pub fn divisor_with_class(&self, x: &QVec) -> TDivisor {
        let mut d = TDivisor::zero(self.pair.n_rays());
        for (i, &j) in self.basis_rays.iter().enumerate() {
            d.coeffs[j] = x[i].clone();
        }
        d
    }

    pub fn prime_class(&self, i: usize) -> QVec {
        self.divisor_class(&TDivisor::prime(self.pair.n_rays(), i)).expect("prime divisors have classes")
    }

    pub fn mori_cone(&self) -> &PolyCone {
        &self.mori
    }

    pub fn nef_cone(&self) -> PolyCone {
        self.mori.dual()
    }

    /// Curves whose classes span the given ray of the Mori cone.
    pub fn curves_on_ray(&self, ray: &QVec) -> Vec<usize> {
        (0..self.curves.len())
            .filter(|&c| {
                let y = &self.curves[c].class;
                !y.is_zero() && y.primitive() == ray.primitive()
            })
            .collect()
    }

    /// Curves whose classes lie in the given cone.
    pub fn curves_in(&self, cone: &PolyCone) -> Vec<usize> {
        (0..self.curves.len()).filter(|&c| cone.contains(&self.curves[c].class)).collect()
    }

    /// Basis divisors and curves as human-readable data.
    pub fn describe(&self) -> String {
        format!("rank {} with {} contracted curves", self.rank, self.curves.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat::int;
    use crate::toric::fan::Fan;

    fn f1() -> Pair {
        let f = Fan::new(
            2,
            vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        Pair::new(f, TDivisor::zero(4)).unwrap()
    }

    #[test]
    fn f1_intersections() {
        let p = f1();
        let ns = NumSpace::build(&p).unwrap();
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.curves.len(), 4);
        let e = TDivisor::prime(4, 1);
        let ec = ns.curves.iter().find(|c| c.wall.rays == vec![1]).unwrap();
        assert_eq!(ec.degree(&e), int(-1));
        let fc = ns.curves.iter().find(|c| c.wall.rays == vec![0]).unwrap();
        assert_eq!(fc.degree(&p.k()), int(-2));
        for c in &ns.curves {
            for i in 0..4 {
                let d = TDivisor::prime(4, i);
                assert_eq!(c.degree(&d), cartier_degree(&p, &c.wall, &d).unwrap());
            }
        }
    }

    #[test]
    fn p2_rank_one() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let ns = NumSpace::build(&Pair::new(f, TDivisor::zero(3)).unwrap()).unwrap();
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.mori.rays.len(), 1);
        assert_eq!(ns.nef_cone().rays.len(), 1);
    }
}
