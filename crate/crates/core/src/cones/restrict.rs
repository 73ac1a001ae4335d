use std::collections::BTreeSet;

use super::numspace::NumSpace;
use crate::error::{Error, Result};
use crate::exactla::{linalg, QVec, Rat};
use crate::toric::divisor::TDivisor;
use crate::toric::fan::Fan;
use crate::toric::pair::{Base, Pair};

/// The restriction `X_U -> U` of a relative pair over an open torus-invariant `U ⊂ Z`,
/// with the induced maps on numerical classes.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub global: NumSpace,
    pub local: NumSpace,
    /// Global index of every ray kept in the restricted fan.
    pub ray_index: Vec<usize>,
    /// `N¹(X/Z) -> N¹(X_U/U)`, one row per local coordinate.
    pub n1_map: Vec<QVec>,
    /// `N₁(X_U/U) -> N₁(X/Z)`, one row per global coordinate.
    pub curve_map: Vec<QVec>,
}

impl Restriction {
    pub fn restrict_divisor(&self, d: &TDivisor) -> TDivisor {
        TDivisor::new(self.ray_index.iter().map(|&i| d.coeffs[i].clone()).collect())
    }

    pub fn map_divisor_class(&self, x: &QVec) -> QVec {
        QVec(self.n1_map.iter().map(|row| row.dot(x)).collect())
    }

    pub fn map_curve_class(&self, y: &QVec) -> QVec {
        QVec(self.curve_map.iter().map(|row| row.dot(y)).collect())
    }
}

/// Restricts to the open subset of the base given by the cones `u` (ray-index sets of the base
/// fan) and all their faces.
pub fn restrict_to_open(p: &Pair, u: &[Vec<usize>]) -> Result<Restriction> {
    let base = p
        .base
        .as_ref()
        .ok_or_else(|| Error::Precondition("restriction needs a base fan".into()))?;
    let base_faces: BTreeSet<Vec<usize>> = base.fan.all_faces().into_iter().collect();
    let mut allowed: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in u {
        let mut c = c.clone();
        c.sort_unstable();
        if !base_faces.contains(&c) {
            return Err(Error::Precondition(format!("{c:?} is not a cone of the base fan")));
        }
        let sub = base.fan.with_cones(vec![c]);
        allowed.extend(sub.all_faces());
    }
    let mut kept = Vec::new();
    for face in p.fan.all_faces() {
        let v = QVec::sum(&p.fan.ray_vectors(&face), p.fan.rank);
        if !face.is_empty() && allowed.contains(&p.base_cone_of(&v)?) {
            kept.push(face);
        }
    }
    if kept.is_empty() {
        return Err(Error::Precondition("open subset has empty preimage".into()));
    }
    let (fan, ray_index) = p.fan.with_cones(kept).compact();
    let (base_fan, _) = base.fan.with_cones(allowed.iter().filter(|c| !c.is_empty()).cloned().collect()).compact();
    let boundary = TDivisor::new(ray_index.iter().map(|&i| p.boundary.coeffs[i].clone()).collect());
    let local_pair = Pair::relative(fan, boundary, Some(Base { fan: base_fan, map: base.map.clone() }))?;

    let global = NumSpace::build(p)?;
    let local = NumSpace::build(&local_pair)?;
    let mut r = Restriction { global, local, ray_index, n1_map: vec![], curve_map: vec![] };

    // Columns: local classes of the restricted global basis divisors.
    let cols: Vec<QVec> = r
        .global
        .basis_rays
        .iter()
        .map(|&j| r.local.divisor_class(&r.restrict_divisor(&TDivisor::prime(p.n_rays(), j))))
        .collect::<Result<_>>()?;
    r.n1_map = (0..r.local.rank).map(|i| QVec(cols.iter().map(|c| c[i].clone()).collect())).collect();

    // Each local curve is a global wall curve; solve `M y_loc = y_glob`.
    let mut matched = Vec::with_capacity(r.local.curves.len());
    for c in &r.local.curves {
        let rays: BTreeSet<usize> = c.wall.rays.iter().map(|&i| r.ray_index[i]).collect();
        let g = r
            .global
            .curves
            .iter()
            .position(|gc| gc.wall.rays.iter().copied().collect::<BTreeSet<_>>() == rays)
            .ok_or_else(|| Error::Invariant("local curve is not contracted globally".into()))?;
        matched.push(g);
    }
    let loc_rows: Vec<QVec> = r.local.curves.iter().map(|c| c.class.clone()).collect();
    let mut curve_map = Vec::with_capacity(r.global.rank);
    for i in 0..r.global.rank {
        let rhs: Vec<Rat> = matched.iter().map(|&g| r.global.curves[g].class[i].clone()).collect();
        let row = linalg::solve(&loc_rows, &rhs, r.local.rank)
            .ok_or_else(|| Error::Invariant("curve classes do not map linearly".into()))?;
        curve_map.push(row);
    }
    r.curve_map = curve_map;
    Ok(r)
}

/// The fan of `X_U` for callers that only need the geometry.
pub fn preimage_fan(r: &Restriction) -> &Fan {
    &r.local.pair.fan
}
