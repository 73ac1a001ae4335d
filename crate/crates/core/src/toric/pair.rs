use std::collections::BTreeSet;

use num::{Signed, Zero};

use super::divisor::{canonical_divisor, cartier_data, pullback_divisor, CartierData, TDivisor};
use super::fan::{star_subdivision, strictly_convex_support, Fan, LatticeMap, Wall};
use crate::error::{Error, Result};
use crate::exactla::cone::{fundamental_box_points, pull};
use crate::exactla::lattice::{self, IVec};
use crate::exactla::rat::int;
use crate::exactla::{linalg, QVec, Rat};

/// Toric base of a relative setting together with the structure map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Base {
    pub fan: Fan,
    pub map: LatticeMap,
}

/// A toric pair `(X, Δ)`, optionally over a toric base (otherwise over a point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub fan: Fan,
    pub boundary: TDivisor,
    pub base: Option<Base>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SingularityClass {
    pub terminal: bool,
    pub canonical: bool,
    pub klt: bool,
    pub lc: bool,
}

impl SingularityClass {
    pub fn label(&self) -> &'static str {
        if self.terminal {
            "terminal"
        } else if self.canonical {
            "canonical"
        } else if self.klt {
            "klt"
        } else if self.lc {
            "lc"
        } else {
            "none"
        }
    }
}

impl Pair {
    pub fn new(fan: Fan, boundary: TDivisor) -> Result<Pair> {
        Self::relative(fan, boundary, None)
    }

    pub fn relative(fan: Fan, boundary: TDivisor, base: Option<Base>) -> Result<Pair> {
        if boundary.len() != fan.n_rays() {
            return Err(Error::DimensionMismatch { expected: fan.n_rays(), got: boundary.len() });
        }
        if !boundary.is_effective() {
            return Err(Error::Precondition("boundary has a negative coefficient".into()));
        }
        if let Some(b) = &base {
            if b.map.source_rank != fan.rank || b.map.target_rank != b.fan.rank {
                return Err(Error::DimensionMismatch { expected: fan.rank, got: b.map.source_rank });
            }
            if !b.map.is_compatible(&fan, &b.fan) {
                return Err(Error::Precondition("structure map does not send cones into cones".into()));
            }
        }
        Ok(Pair { fan, boundary, base })
    }

    pub fn with_fan(&self, fan: Fan, boundary: TDivisor) -> Pair {
        Pair { fan, boundary, base: self.base.clone() }
    }

    pub fn n_rays(&self) -> usize {
        self.fan.n_rays()
    }

    pub fn k(&self) -> TDivisor {
        canonical_divisor(&self.fan)
    }

    pub fn k_plus_delta(&self) -> TDivisor {
        self.k().add(&self.boundary)
    }

    pub fn base_rank(&self) -> usize {
        self.base.as_ref().map_or(0, |b| b.fan.rank)
    }

    /// Image of a lattice vector in the base lattice.
    pub fn to_base(&self, v: &QVec) -> QVec {
        match &self.base {
            Some(b) => b.map.apply_q(v),
            None => QVec::zeros(0),
        }
    }

    /// Rays of the smallest base cone containing the image of `v`.
    pub fn base_cone_of(&self, v: &QVec) -> Result<Vec<usize>> {
        match &self.base {
            None => Ok(vec![]),
            Some(b) => b
                .fan
                .minimal_cone_containing(&b.map.apply_q(v))
                .ok_or_else(|| Error::Precondition("image lies outside the base fan".into())),
        }
    }

    /// A wall curve is contracted iff `N/span τ -> N_Z/span τ_Z` is zero.
    pub fn wall_is_contracted(&self, wall: &Wall) -> Result<bool> {
        let Some(b) = &self.base else {
            return Ok(true);
        };
        let interior = QVec::sum(&self.fan.ray_vectors(&wall.rays), self.fan.rank);
        let tz = self.base_cone_of(&interior)?;
        let off = self.fan.off_wall(wall.right, wall)[0];
        let img = b.map.apply_q(&self.fan.u(off));
        Ok(linalg::in_span(&b.fan.ray_vectors(&tz), &img))
    }

    pub fn contracted_walls(&self) -> Result<Vec<Wall>> {
        let mut out = Vec::new();
        for w in self.fan.walls() {
            if self.wall_is_contracted(&w)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// Projective over the base: a piecewise linear function strictly convex on contracted walls.
    pub fn is_projective(&self) -> Result<bool> {
        let walls = self.fan.walls();
        let flags: Vec<bool> = walls.iter().map(|w| self.wall_is_contracted(w)).collect::<Result<_>>()?;
        Ok(strictly_convex_support(&self.fan, &flags).is_some())
    }

    /// Maximal dimension of a fibre of the structure map.
    pub fn fiber_dimension(&self) -> Result<usize> {
        let n = self.fan.rank;
        let dz = self.base_rank();
        let mut best = 0usize;
        for face in self.fan.all_faces() {
            let ds = self.fan.cone_dim(&face);
            let v = QVec::sum(&self.fan.ray_vectors(&face), n);
            let tz = self.base_cone_of(&v)?;
            let dt = match &self.base {
                Some(b) => b.fan.cone_dim(&tz),
                None => 0,
            };
            let d = (n - ds) as i64 - (dz - dt) as i64;
            best = best.max(d.max(0) as usize);
        }
        Ok(best)
    }

    /// Cartier data of `K + Δ`; its support function is `ψ` with `ψ(u_ρ) = 1 - δ_ρ`.
    pub fn log_canonical_data(&self) -> Result<CartierData> {
        cartier_data(&self.k_plus_delta(), &self.fan)
    }
}

fn check_valuation(f: &Fan, v: &[i64]) -> Result<QVec> {
    if v.len() != f.rank {
        return Err(Error::DimensionMismatch { expected: f.rank, got: v.len() });
    }
    if !lattice::is_primitive(v) {
        return Err(Error::Precondition(format!("{v:?} is not a primitive nonzero vector")));
    }
    let vq = QVec::from_ints(v);
    if !f.in_support(&vq) {
        return Err(Error::Precondition(format!("{v:?} lies outside the fan support")));
    }
    Ok(vq)
}

/// `ψ(v)` for the log canonical support function.
pub fn log_discrepancy(p: &Pair, v: &[i64]) -> Result<Rat> {
    let vq = check_valuation(&p.fan, v)?;
    p.log_canonical_data()?.eval(&p.fan, &vq)
}

/// Discrepancy `a(v, X, Δ) = ψ(v) - 1`.
pub fn discrepancy(p: &Pair, v: &[i64]) -> Result<Rat> {
    Ok(log_discrepancy(p, v)? - int(1))
}

/// Discrepancy read off a star subdivision at `v` followed by pulling back `K + Δ`.
pub fn discrepancy_by_subdivision(p: &Pair, v: &[i64]) -> Result<Rat> {
    check_valuation(&p.fan, v)?;
    if let Some(i) = p.fan.ray_index(v) {
        return Ok(-p.boundary.coeffs[i].clone());
    }
    let (g, map) = star_subdivision(&p.fan, v)?;
    let pulled = pullback_divisor(&map, &g, &p.fan, &p.k_plus_delta())?;
    let new = g.n_rays() - 1;
    // K_Y + Δ_Y = f*(K+Δ) with K_Y = -Σ D, so the coefficient of Δ_Y at v is pulled + 1.
    Ok(-(&pulled.coeffs[new] + int(1)))
}

/// Simplicial cones covering the fan, using a pulling triangulation for non-simplicial cones.
pub fn simplicial_pieces(f: &Fan) -> Result<Vec<Vec<usize>>> {
    let all: Vec<QVec> = (0..f.n_rays()).map(|i| f.u(i)).collect();
    let mut out = Vec::new();
    for c in &f.cones {
        if f.cone_dim(c) == c.len() {
            out.push(c.clone());
        } else {
            out.extend(pull(&all, c)?);
        }
    }
    Ok(out)
}

/// Exceptional primitive vectors where `ψ` can attain its minimum: nonzero lattice points of the
/// fundamental parallelotopes and sums of two distinct rays of a cone.
pub fn exceptional_test_vectors(f: &Fan) -> Result<Vec<IVec>> {
    let mut out: BTreeSet<IVec> = BTreeSet::new();
    for c in simplicial_pieces(f)? {
        let gens = f.ray_vectors(&c);
        for b in fundamental_box_points(&gens, 100_000)? {
            out.insert(b.to_i64().expect("integral box point"));
        }
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a + 1..] {
                let s: IVec = f.rays[i].iter().zip(&f.rays[j]).map(|(x, y)| x + y).collect();
                out.insert(lattice::primitive(&s));
            }
        }
    }
    Ok(out
        .into_iter()
        .filter(|v| lattice::is_primitive(v) && f.ray_index(v).is_none())
        .collect())
}

/// Minimal log discrepancy over exceptional toric valuations, with a minimizer.
pub fn min_exceptional_log_discrepancy(p: &Pair) -> Result<Option<(Rat, IVec)>> {
    let cd = p.log_canonical_data()?;
    let mut best: Option<(Rat, IVec)> = None;
    for v in exceptional_test_vectors(&p.fan)? {
        let psi = cd.eval(&p.fan, &QVec::from_ints(&v))?;
        let better = match &best {
            None => true,
            Some((b, w)) => psi < *b || (psi == *b && v < *w),
        };
        if better {
            best = Some((psi, v));
        }
    }
    Ok(best)
}

pub fn classify_pair(p: &Pair) -> Result<SingularityClass> {
    p.log_canonical_data()?;
    let one = int(1);
    let klt = p.boundary.coeffs.iter().all(|d| *d < one);
    let lc = p.boundary.coeffs.iter().all(|d| *d <= one);
    let (terminal, canonical) = if !lc {
        (false, false)
    } else {
        match min_exceptional_log_discrepancy(p)? {
            None => (true, true),
            Some((psi, _)) => (psi > one, psi >= one),
        }
    };
    Ok(SingularityClass { terminal, canonical, klt, lc })
}

/// Crepant extraction of every toric valuation with non-positive discrepancy.
pub fn terminalize(p: &Pair) -> Result<(Pair, LatticeMap)> {
    let class = classify_pair(p)?;
    if !class.klt {
        return Err(Error::Precondition("terminalization needs a klt pair".into()));
    }
    if !p.fan.is_simplicial() {
        return Err(Error::Precondition("terminalization needs a Q-factorial pair".into()));
    }
    let mut cur = p.clone();
    let cap = 64 * (p.n_rays() + 1);
    for _ in 0..cap {
        match min_exceptional_log_discrepancy(&cur)? {
            Some((psi, v)) if psi <= int(1) => {
                let (g, _) = star_subdivision(&cur.fan, &v)?;
                let delta = cur.boundary.extended(int(1) - psi);
                cur = cur.with_fan(g, delta);
            }
            _ => return Ok((cur, LatticeMap::identity(p.fan.rank))),
        }
    }
    Err(Error::IterationCap(cap))
}

/// Sum of boundary coefficients, used as a sanity measure in tests.
pub fn boundary_weight(p: &Pair) -> Rat {
    p.boundary.coeffs.iter().fold(Rat::zero(), |a, b| a + b)
}

/// Whether `K + Δ` pulled back along `map` equals `K' + Δ'`.
pub fn is_crepant(map: &LatticeMap, upstairs: &Pair, downstairs: &Pair) -> Result<bool> {
    let pulled = pullback_divisor(map, &upstairs.fan, &downstairs.fan, &downstairs.k_plus_delta())?;
    Ok(pulled == upstairs.k_plus_delta())
}

pub fn all_coefficients_below_one(d: &TDivisor) -> bool {
    d.coeffs.iter().all(|c| *c < int(1) && !c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat::rat;

    fn p2() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn discrepancies_on_p2() {
        let p = Pair::new(p2(), TDivisor::zero(3)).unwrap();
        assert_eq!(discrepancy(&p, &[1, 1]).unwrap(), int(1));
        assert_eq!(discrepancy_by_subdivision(&p, &[1, 1]).unwrap(), int(1));
        let q = Pair::new(p2(), TDivisor::new(vec![rat(1, 2), rat(1, 2), int(0)])).unwrap();
        assert_eq!(discrepancy(&q, &[1, 1]).unwrap(), int(0));
        assert_eq!(discrepancy_by_subdivision(&q, &[1, 1]).unwrap(), int(0));
        assert_eq!(discrepancy(&q, &[1, 0]).unwrap(), rat(-1, 2));
    }

    #[test]
    fn classification() {
        let p = Pair::new(p2(), TDivisor::zero(3)).unwrap();
        assert_eq!(classify_pair(&p).unwrap().label(), "terminal");
        let q = Pair::new(p2(), TDivisor::new(vec![rat(1, 2), rat(1, 2), int(0)])).unwrap();
        let c = classify_pair(&q).unwrap();
        assert!(c.canonical && !c.terminal);
        let r = Pair::new(p2(), TDivisor::prime(3, 0)).unwrap();
        let c = classify_pair(&r).unwrap();
        assert!(c.lc && !c.klt);
    }

    #[test]
    fn terminalization_extracts_diagonal() {
        let q = Pair::new(p2(), TDivisor::new(vec![rat(1, 2), rat(1, 2), int(0)])).unwrap();
        let (t, map) = terminalize(&q).unwrap();
        assert_eq!(t.fan.rays.last().unwrap(), &vec![1, 1]);
        assert_eq!(t.boundary.coeffs.last().unwrap(), &int(0));
        assert!(classify_pair(&t).unwrap().terminal);
        assert!(is_crepant(&map, &t, &q).unwrap());
    }

    #[test]
    fn fiber_dimension_over_point() {
        let p = Pair::new(p2(), TDivisor::zero(3)).unwrap();
        assert_eq!(p.fiber_dimension().unwrap(), 2);
    }
}
