use std::collections::BTreeSet;

use crate::cones::NumSpace;
use crate::error::{Error, Result};
use crate::exactla::QVec;
use crate::toric::divisor::{birational_transform, cartier_data, TDivisor};
use crate::toric::fan::{Fan, LatticeMap};
use crate::toric::pair::Pair;

use super::orders::asymptotic_order;

fn require_small(a: &Fan, b: &Fan) -> Result<()> {
    let rays = |f: &Fan| -> BTreeSet<Vec<i64>> { f.used_rays().into_iter().map(|i| f.rays[i].clone()).collect() };
    if a.rank != b.rank || rays(a) != rays(b) {
        return Err(Error::Precondition("the map is not an isomorphism in codimension one".into()));
    }
    Ok(())
}

/// Compares `o_v(D)` on `X_1` with `o_v(g_* D)` on `X_2` for a toric small modification `g`
/// (identity on the lattice). Equality holds for divisorial `v`; for `v` whose centre lies in the
/// modified locus the two pullbacks of `D` differ and the orders can differ.
pub fn transform_order_invariance(x1: &Pair, x2: &Pair, v: &QVec, d: &TDivisor) -> Result<bool> {
    require_small(&x1.fan, &x2.fan)?;
    let id = LatticeMap::identity(x1.fan.rank);
    let pushed = birational_transform(&id, &x1.fan, &x2.fan, d)?;
    let before = asymptotic_order(v, d, x1)?;
    let after = asymptotic_order(v, &pushed, x2)?;
    if before.is_some() != after.is_some() {
        return Err(Error::Invariant("effectivity changed under a small modification".into()));
    }
    Ok(before == after)
}

/// For `A` ample on `X_1` with `g_* A` nef on `X_2`, the inverse of `g` is a morphism; for toric
/// small maps this forces the fans to coincide, which is checked.
pub fn inverse_is_morphism(x1: &Pair, x2: &Pair, a: &TDivisor) -> Result<bool> {
    require_small(&x1.fan, &x2.fan)?;
    if !NumSpace::build(x1)?.is_ample(a)? {
        return Err(Error::Precondition("A is not ample on the source".into()));
    }
    let id = LatticeMap::identity(x1.fan.rank);
    let b = birational_transform(&id, &x1.fan, &x2.fan, a)?;
    cartier_data(&b, &x2.fan)?;
    let nef = NumSpace::build(x2)?.is_nef(&b)?;
    if nef && !x1.fan.same_as(&x2.fan) {
        return Err(Error::Invariant("transformed ample divisor is nef but the fans differ".into()));
    }
    Ok(nef)
}
