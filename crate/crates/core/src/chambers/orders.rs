use num::{Signed, Zero};

use crate::cones::NumSpace;
use crate::error::{Error, Result};
use crate::exactla::lp::{solve_general, LpOutcome, Sense};
use crate::exactla::rat::int;
use crate::exactla::{PolyCone, Polyhedron, QVec, Rat};
use crate::toric::divisor::{cartier_data, min_over_sections, TDivisor};
use crate::toric::fan::Fan;
use crate::toric::pair::{exceptional_test_vectors, Pair};

/// `o_v(D) = c_v(D) + min_{m ∈ P_D} <m, v>`, where `c_v(D) = -ψ_D(v)` is the coefficient of the
/// divisor of `v` in the pullback of `D`. `None` when `|D|_Q` is empty.
pub fn asymptotic_order(v: &QVec, d: &TDivisor, p: &Pair) -> Result<Option<Rat>> {
    if !p.fan.in_support(v) {
        return Err(Error::Precondition(format!("{v} is outside the fan support")));
    }
    let cd = cartier_data(d, &p.fan)?;
    let c = -cd.eval(&p.fan, v)?;
    Ok(min_over_sections(d, &p.fan, v)?.map(|m| c + m))
}

/// Rays of the fan together with the fundamental-box points of its cones.
pub fn default_valuations(f: &Fan) -> Result<Vec<QVec>> {
    let mut out: Vec<QVec> = (0..f.n_rays()).map(|i| f.u(i)).collect();
    for w in exceptional_test_vectors(f)? {
        let q = QVec::from_ints(&w);
        if !out.contains(&q) {
            out.push(q);
        }
    }
    Ok(out)
}

fn combine(ds: &[TDivisor], t: &QVec, n: usize) -> TDivisor {
    ds.iter().zip(t.iter()).fold(TDivisor::zero(n), |acc, (d, ti)| acc.add(&d.scale(ti)))
}

/// `{t ≥ 0 : |Σ t_i D_i|_Q ≠ ∅}` as the projection of the cone of pairs `(t, m)` with
/// `m ∈ P_{Σ t_i D_i}`.
pub fn support_cone(ds: &[TDivisor], p: &Pair) -> Result<PolyCone> {
    if ds.is_empty() {
        return Err(Error::Precondition("empty divisor list".into()));
    }
    let k = ds.len();
    let cone = adjoint_pairs(ds, p)?;
    let gens: Vec<QVec> = cone.generators().iter().map(|g| QVec(g.0[..k].to_vec())).collect();
    PolyCone::from_generators(k, &gens)
}

/// Cone of `(t, m)` with `t ≥ 0` and `m ∈ P_{Σ t_i D_i}`.
pub(crate) fn adjoint_pairs(ds: &[TDivisor], p: &Pair) -> Result<PolyCone> {
    let k = ds.len();
    let n = p.fan.rank;
    let mut ineqs: Vec<QVec> = (0..k).map(|i| QVec::unit(k + n, i)).collect();
    for r in 0..p.n_rays() {
        let t = QVec(ds.iter().map(|d| d.coeffs[r].clone()).collect());
        ineqs.push(t.concat(&p.fan.u(r)));
    }
    for d in ds {
        if d.len() != p.n_rays() {
            return Err(Error::DimensionMismatch { expected: p.n_rays(), got: d.len() });
        }
    }
    PolyCone::from_inequalities(k + n, &ineqs)
}

/// Linear pieces of `t -> o_v(Σ t_i D_i)` on a support cone: by duality the minimum over
/// `P_D` is a maximum over the vertices of `{y ≥ 0 : Σ y_ρ u_ρ = v}`.
fn order_forms(v: &QVec, ds: &[TDivisor], p: &Pair) -> Result<Vec<QVec>> {
    let nr = p.n_rays();
    let n = p.fan.rank;
    let ineqs: Vec<(QVec, Rat)> = (0..nr).map(|i| (QVec::unit(nr, i), int(0))).collect();
    let eqs: Vec<(QVec, Rat)> = (0..n)
        .map(|j| (QVec((0..nr).map(|i| int(p.fan.rays[i][j])).collect()), v[j].clone()))
        .collect();
    let dual = Polyhedron::new(nr, ineqs, eqs);
    let cv: Vec<Rat> = ds
        .iter()
        .map(|d| Ok(-cartier_data(d, &p.fan)?.eval(&p.fan, v)?))
        .collect::<Result<_>>()?;
    Ok(dual
        .vrep()
        .vertices
        .iter()
        .map(|y| QVec(ds.iter().zip(&cv).map(|(d, c)| c - y.dot(&d.as_qvec())).collect()))
        .collect())
}

/// Subdivision of a support cone into the coarsest cells on which every tested `o_v` is linear.
#[derive(Clone, Debug)]
pub struct ChamberDecomposition {
    pub support: PolyCone,
    pub divisors: Vec<TDivisor>,
    pub valuations: Vec<QVec>,
    pub cells: Vec<PolyCone>,
    /// `forms[c][j]`: the linear form of `o_{v_j}` on cell `c`.
    pub forms: Vec<Vec<QVec>>,
}

impl ChamberDecomposition {
    pub fn divisor_at(&self, t: &QVec) -> TDivisor {
        let n = self.divisors.first().map_or(0, |d| d.len());
        combine(&self.divisors, t, n)
    }

    pub fn locate(&self, t: &QVec) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(t))
    }

    fn same_on_support(&self, a: &QVec, b: &QVec) -> bool {
        same_on(&self.support, a, b)
    }

    /// Adjacent cells (sharing a facet) differ in some linear form.
    pub fn is_coarsest(&self) -> bool {
        let d = self.support.cone_dim();
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                let shared = self.cells[i].intersect(&self.cells[j]);
                if d > 0 && shared.cone_dim() + 1 == d {
                    let differ = self.forms[i].iter().zip(&self.forms[j]).any(|(a, b)| !self.same_on_support(a, b));
                    if !differ {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Cells cover the support and meet only along lower-dimensional faces.
    pub fn is_subdivision(&self) -> bool {
        let d = self.support.cone_dim();
        let cover = PolyCone::from_generators(
            self.support.dim,
            &self.cells.iter().flat_map(|c| c.generators()).collect::<Vec<_>>(),
        );
        let covers = cover.is_ok_and(|c| c.set_eq(&self.support));
        let inside = self.cells.iter().all(|c| self.support.contains_cone(c) && c.cone_dim() == d);
        let disjoint = (0..self.cells.len())
            .all(|i| (i + 1..self.cells.len()).all(|j| self.cells[i].intersect(&self.cells[j]).cone_dim() < d));
        covers && inside && disjoint
    }
}

fn same_on(c: &PolyCone, a: &QVec, b: &QVec) -> bool {
    c.generators().iter().all(|g| a.dot(g) == b.dot(g))
}

/// Common refinement of the domains of linearity of `o_v` for every `v` in `valuations`,
/// cells indexed by their tuple of linear forms.
pub fn chamber_decomposition(
    sc: &PolyCone,
    ds: &[TDivisor],
    valuations: &[QVec],
    p: &Pair,
) -> Result<ChamberDecomposition> {
    if sc.dim != ds.len() {
        return Err(Error::DimensionMismatch { expected: ds.len(), got: sc.dim });
    }
    let full = support_cone(ds, p)?;
    if !full.contains_cone(sc) {
        return Err(Error::Precondition("cone is not inside the support cone".into()));
    }
    let d = sc.cone_dim();
    let mut cells: Vec<(PolyCone, Vec<QVec>)> = vec![(sc.clone(), vec![])];
    for v in valuations {
        let mut forms: Vec<QVec> = Vec::new();
        for f in order_forms(v, ds, p)? {
            if !forms.iter().any(|g| same_on(sc, g, &f)) {
                forms.push(f);
            }
        }
        let mut next = Vec::new();
        for (cell, tuple) in &cells {
            for f in &forms {
                let normals: Vec<QVec> = forms.iter().filter(|g| *g != f).map(|g| f - g).collect();
                let piece = if normals.is_empty() {
                    cell.clone()
                } else {
                    cell.intersect(&PolyCone::from_inequalities(sc.dim, &normals)?)
                };
                if piece.cone_dim() == d {
                    let mut t = tuple.clone();
                    t.push(f.clone());
                    next.push((piece, t));
                }
            }
        }
        cells = next;
    }
    cells.sort_by_key(|a| a.0.relint_point());
    let (cells, forms) = cells.into_iter().unzip();
    Ok(ChamberDecomposition {
        support: sc.clone(),
        divisors: ds.to_vec(),
        valuations: valuations.to_vec(),
        cells,
        forms,
    })
}

/// The cell meeting the preimage of the ample cone; it equals the preimage of the nef cone
/// and every tested order vanishes on it.
pub fn nef_chamber(cd: &ChamberDecomposition, p: &Pair) -> Result<Option<usize>> {
    let ns = NumSpace::build(p)?;
    let mut hits = Vec::new();
    for (i, c) in cd.cells.iter().enumerate() {
        if ns.is_ample(&cd.divisor_at(&c.relint_point()))? {
            hits.push(i);
        }
    }
    match hits.as_slice() {
        [] => Ok(None),
        [i] => {
            let normals: Vec<QVec> = ns
                .curves
                .iter()
                .map(|c| QVec(cd.divisors.iter().map(|d| c.degree(d)).collect()))
                .collect();
            let nef = PolyCone::from_inequalities(cd.support.dim, &normals)?.intersect(&cd.support);
            if !nef.set_eq(&cd.cells[*i]) {
                return Err(Error::Invariant("ample cell differs from the nef preimage".into()));
            }
            if cd.forms[*i].iter().any(|f| !same_on(&cd.cells[*i], f, &QVec::zeros(f.dim()))) {
                return Err(Error::Invariant("an asymptotic order is nonzero on the nef cell".into()));
            }
            Ok(Some(*i))
        }
        _ => Err(Error::Invariant("several cells meet the ample cone".into())),
    }
}

/// The box `x ± r` in class coordinates.
pub fn box_around(x: &QVec, r: &Rat) -> Polyhedron {
    let n = x.dim();
    let mut ineqs = Vec::new();
    for i in 0..n {
        ineqs.push((QVec::unit(n, i), &x[i] - r));
        ineqs.push((-&QVec::unit(n, i), -(&x[i] + r)));
    }
    Polyhedron::new(n, ineqs, vec![])
}

/// Facets of the nef cone (given by their dual curve classes) whose hyperplanes meet the
/// interior of `poly` inside the nef cone. `poly` lives in class coordinates.
pub fn boundary_structure(poly: &Polyhedron, u: &TDivisor, p: &Pair) -> Result<Vec<QVec>> {
    let ns = NumSpace::build(p)?;
    let x = ns.divisor_class(u)?;
    if !ns.class_is_nef(&x) {
        return Err(Error::Precondition("class is not nef".into()));
    }
    if poly.dim != ns.rank {
        return Err(Error::DimensionMismatch { expected: ns.rank, got: poly.dim });
    }
    let nef = ns.nef_cone();
    let r = ns.rank;
    let lift = |a: &QVec, s: i64| a.concat(&QVec::from_ints(&[s]));
    let mut out = Vec::new();
    for gamma in &nef.facets {
        let mut ineqs: Vec<(QVec, Rat)> = poly.ineqs.iter().map(|(a, b)| (lift(a, -1), b.clone())).collect();
        ineqs.extend(nef.facets.iter().map(|f| (lift(f, 0), Rat::zero())));
        ineqs.push((-&QVec::unit(r + 1, r), int(-1)));
        let mut eqs: Vec<(QVec, Rat)> = poly.eqs.iter().map(|(a, b)| (lift(a, 0), b.clone())).collect();
        eqs.extend(nef.equations.iter().map(|e| (lift(e, 0), Rat::zero())));
        eqs.push((lift(gamma, 0), Rat::zero()));
        if let LpOutcome::Optimal { value, .. } = solve_general(&QVec::unit(r + 1, r), &ineqs, &eqs, r + 1, Sense::Max) {
            if value.is_positive() {
                out.push(gamma.clone());
            }
        }
    }
    Ok(out)
}
