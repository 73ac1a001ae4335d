use std::fmt;

use num::{Signed, Zero};

use super::fan::{Fan, LatticeMap};
use crate::error::{Error, Result};
use crate::exactla::lp::Sense;
use crate::exactla::rat::{fmt_rat, int};
use crate::exactla::{linalg, Polyhedron, QVec, Rat};

/// Torus-invariant Q-divisor: one coefficient per ray of a fan.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TDivisor {
    pub coeffs: Vec<Rat>,
}

impl fmt::Debug for TDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rat(c))?;
        }
        write!(f, "]")
    }
}

impl TDivisor {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        TDivisor { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        TDivisor { coeffs: vec![Rat::zero(); n] }
    }

    pub fn prime(n: usize, i: usize) -> Self {
        let mut d = Self::zero(n);
        d.coeffs[i] = int(1);
        d
    }

    pub fn from_ints(c: &[i64]) -> Self {
        TDivisor { coeffs: c.iter().map(|&x| int(x)).collect() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.coeffs[i]
    }

    pub fn as_qvec(&self) -> QVec {
        QVec(self.coeffs.clone())
    }

    pub fn add(&self, o: &TDivisor) -> TDivisor {
        TDivisor { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &TDivisor) -> TDivisor {
        TDivisor { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: &Rat) -> TDivisor {
        TDivisor { coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn neg(&self) -> TDivisor {
        self.scale(&int(-1))
    }

    pub fn floor(&self) -> TDivisor {
        TDivisor { coeffs: self.coeffs.iter().map(|a| a.floor()).collect() }
    }

    pub fn ceil(&self) -> TDivisor {
        TDivisor { coeffs: self.coeffs.iter().map(|a| a.ceil()).collect() }
    }

    pub fn frac(&self) -> TDivisor {
        self.sub(&self.floor())
    }

    /// Componentwise minimum.
    pub fn meet(&self, o: &TDivisor) -> TDivisor {
        TDivisor { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.min(b).clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn leq(&self, o: &TDivisor) -> bool {
        self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a <= b)
    }

    /// Coefficients reindexed by `old_index[new] = old`.
    pub fn reindex(&self, old_index: &[usize]) -> TDivisor {
        TDivisor { coeffs: old_index.iter().map(|&i| self.coeffs[i].clone()).collect() }
    }

    /// Appends a coefficient for a new ray.
    pub fn extended(&self, c: Rat) -> TDivisor {
        let mut d = self.clone();
        d.coeffs.push(c);
        d
    }
}

pub fn canonical_divisor(f: &Fan) -> TDivisor {
    TDivisor { coeffs: vec![int(-1); f.n_rays()] }
}

/// `div(chi^m) = Σ <m, u_ρ> D_ρ`.
pub fn principal_divisor(f: &Fan, m: &QVec) -> TDivisor {
    TDivisor { coeffs: (0..f.n_rays()).map(|i| m.dot(&f.u(i))).collect() }
}

/// Local linear functionals `m_σ` with `<m_σ, u_ρ> = -d_ρ` for every ray of `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub m: Vec<QVec>,
}

impl CartierData {
    /// Value of the support function at `v`, using the first cone containing it.
    pub fn eval(&self, f: &Fan, v: &QVec) -> Result<Rat> {
        let c = f
            .cone_containing(v)
            .ok_or_else(|| Error::Precondition(format!("{v} is outside the fan support")))?;
        Ok(self.m[c].dot(v))
    }

    /// Least positive integer `k` with every `k m_σ` integral.
    pub fn index(&self) -> num::BigInt {
        self.m.iter().fold(num::BigInt::from(1), |acc, m| num::Integer::lcm(&acc, &m.lcm_denominator()))
    }
}

pub fn cartier_data(d: &TDivisor, f: &Fan) -> Result<CartierData> {
    if d.len() != f.n_rays() {
        return Err(Error::DimensionMismatch { expected: f.n_rays(), got: d.len() });
    }
    let mut ms = Vec::with_capacity(f.cones.len());
    for c in &f.cones {
        let rows = f.ray_vectors(c);
        let rhs: Vec<Rat> = c.iter().map(|&i| -d.coeffs[i].clone()).collect();
        match linalg::solve(&rows, &rhs, f.rank) {
            Some(m) => ms.push(m),
            None => return Err(Error::NotQCartier { cone: c.clone() }),
        }
    }
    Ok(CartierData { m: ms })
}

pub fn is_q_cartier(d: &TDivisor, f: &Fan) -> bool {
    cartier_data(d, f).is_ok()
}

/// Some `m` with `D1 - D2 = div(chi^m)`.
pub fn linearly_equivalent(d1: &TDivisor, d2: &TDivisor, f: &Fan) -> Option<QVec> {
    let diff = d1.sub(d2);
    let rows: Vec<QVec> = (0..f.n_rays()).map(|i| f.u(i)).collect();
    linalg::solve(&rows, &diff.coeffs, f.rank)
}

/// Pullback of a Q-Cartier divisor on `target` along a toric morphism from `source`.
pub fn pullback_divisor(map: &LatticeMap, source: &Fan, target: &Fan, d: &TDivisor) -> Result<TDivisor> {
    let cd = cartier_data(d, target)?;
    let mut coeffs = Vec::with_capacity(source.n_rays());
    for i in 0..source.n_rays() {
        let w = map.apply_q(&source.u(i));
        coeffs.push(-cd.eval(target, &w)?);
    }
    Ok(TDivisor { coeffs })
}

/// Pushforward of a divisor along a birational map: coefficients follow matching rays,
/// rays of the target without a source counterpart get coefficient zero.
pub fn birational_transform(map: &LatticeMap, source: &Fan, target: &Fan, d: &TDivisor) -> Result<TDivisor> {
    if !map.is_invertible_over_q() {
        return Err(Error::Precondition("map is not birational".into()));
    }
    let images: Vec<Vec<i64>> = (0..source.n_rays()).map(|i| map.apply(&source.rays[i])).collect();
    let coeffs = (0..target.n_rays())
        .map(|j| match images.iter().position(|v| *v == target.rays[j]) {
            Some(i) => d.coeffs[i].clone(),
            None => Rat::zero(),
        })
        .collect();
    Ok(TDivisor { coeffs })
}

/// `P_D = {m : <m, u_ρ> >= -d_ρ}`.
pub fn section_polyhedron(d: &TDivisor, f: &Fan) -> Polyhedron {
    let ineqs = (0..f.n_rays()).map(|i| (f.u(i), -d.coeffs[i].clone())).collect();
    Polyhedron::new(f.rank, ineqs, vec![])
}

pub fn effectivity_test(d: &TDivisor, f: &Fan) -> bool {
    !section_polyhedron(d, f).is_empty()
}

/// Fixed part of `|D|` computed from the lattice points of a bounded `P_D`.
pub fn fixed_part(d: &TDivisor, f: &Fan) -> Result<TDivisor> {
    let p = section_polyhedron(d, f);
    if !p.is_bounded() {
        return Err(Error::Unsupported("fixed part of a divisor with unbounded section polyhedron".into()));
    }
    let pts = p.lattice_points(1 << 20)?;
    if pts.is_empty() {
        return Err(Error::Precondition("|D| has no integral members".into()));
    }
    let coeffs = (0..f.n_rays())
        .map(|i| {
            pts.iter()
                .map(|m| m.dot(&f.u(i)) + &d.coeffs[i])
                .min()
                .expect("nonempty")
        })
        .collect();
    Ok(TDivisor { coeffs })
}

/// `rank! * vol(P_D)`.
pub fn volume(d: &TDivisor, f: &Fan) -> Result<Rat> {
    section_polyhedron(d, f).normalized_volume()
}

/// Minimum of `<m, v>` over `P_D`, or `None` if `P_D` is empty.
pub fn min_over_sections(d: &TDivisor, f: &Fan, v: &QVec) -> Result<Option<Rat>> {
    use crate::exactla::LpOutcome;
    match section_polyhedron(d, f).optimize(v, Sense::Min) {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Invariant(format!("<m,{v}> unbounded below on a section polyhedron"))),
    }
}
