use num::{Signed, Zero};

use crate::cones::{restrict_to_open, NumSpace};
use crate::error::{Error, Result};
use crate::exactla::lp::{solve_general, LpOutcome, Sense};
use crate::exactla::rat::int;
use crate::exactla::{QVec, Rat};
use crate::toric::divisor::TDivisor;
use crate::toric::pair::{classify_pair, Pair};

/// One patch of a cover of the base: the restricted pair, the global index of each of its rays
/// and, optionally, a finite list of admissible boundaries. `None` lets any torus-invariant klt
/// boundary be used.
#[derive(Clone, Debug)]
pub struct AmpleShiftPatch {
    pub pair: Pair,
    pub ray_index: Vec<usize>,
    pub candidates: Option<Vec<TDivisor>>,
}

/// `u = c [K + Δ_a] + [w]` on a patch with `c > 0`, `(X, Δ_a)` klt and `w` ample.
#[derive(Clone, Debug)]
pub struct AmpleShiftWitness {
    pub c: Rat,
    pub delta: TDivisor,
    pub ample: TDivisor,
}

#[derive(Clone, Debug)]
pub struct AmpleShiftPredicate {
    pub patches: Vec<AmpleShiftPatch>,
}

impl AmpleShiftPredicate {
    /// The trivial cover.
    pub fn single(p: &Pair, candidates: Option<Vec<TDivisor>>) -> AmpleShiftPredicate {
        AmpleShiftPredicate {
            patches: vec![AmpleShiftPatch { pair: p.clone(), ray_index: (0..p.n_rays()).collect(), candidates }],
        }
    }

    /// Patches over the torus-invariant opens of the base given by cone lists.
    pub fn over_cover(p: &Pair, cover: &[Vec<Vec<usize>>]) -> Result<AmpleShiftPredicate> {
        let mut patches = Vec::new();
        for u in cover {
            let r = restrict_to_open(p, u)?;
            patches.push(AmpleShiftPatch { pair: r.local.pair.clone(), ray_index: r.ray_index.clone(), candidates: None });
        }
        Ok(AmpleShiftPredicate { patches })
    }

    /// Witnesses for every patch, or `None` if some patch has none. `fixed_c` pins `c`.
    pub fn witnesses(&self, u: &TDivisor, fixed_c: Option<&Rat>) -> Result<Option<Vec<AmpleShiftWitness>>> {
        let mut out = Vec::new();
        for patch in &self.patches {
            let local = TDivisor::new(patch.ray_index.iter().map(|&i| u.coeffs[i].clone()).collect());
            match patch_witness(patch, &local, fixed_c)? {
                Some(w) => out.push(w),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

pub fn in_ample_shifted_set(
    pred: &AmpleShiftPredicate,
    u: &TDivisor,
    fixed_c: Option<&Rat>,
) -> Result<Option<Vec<AmpleShiftWitness>>> {
    pred.witnesses(u, fixed_c)
}

/// Independent check of one witness on one patch.
pub fn verify_witness(p: &Pair, u: &TDivisor, w: &AmpleShiftWitness) -> Result<bool> {
    if !w.c.is_positive() {
        return Ok(false);
    }
    let with_delta = p.with_fan(p.fan.clone(), w.delta.clone());
    if !w.delta.is_effective() || !classify_pair(&with_delta)?.klt {
        return Ok(false);
    }
    let ns = NumSpace::build(p)?;
    let rest = u.sub(&with_delta.k_plus_delta().scale(&w.c)).sub(&w.ample);
    Ok(ns.is_ample(&w.ample)? && ns.curves.iter().all(|c| c.degree(&rest).is_zero()))
}

fn patch_witness(patch: &AmpleShiftPatch, u: &TDivisor, fixed_c: Option<&Rat>) -> Result<Option<AmpleShiftWitness>> {
    let p = &patch.pair;
    if !p.fan.is_simplicial() {
        return Err(Error::Unsupported("ample-shift test on a non-simplicial patch".into()));
    }
    let ns = NumSpace::build(p)?;
    let found = match &patch.candidates {
        None => free_boundary(&ns, u, fixed_c),
        Some(list) => {
            let mut hit = None;
            for delta in list {
                let q = p.with_fan(p.fan.clone(), delta.clone());
                if !delta.is_effective() || !classify_pair(&q)?.klt {
                    continue;
                }
                if let Some(c) = scale_for(&ns, u, &q.k_plus_delta(), fixed_c) {
                    hit = Some((c, delta.clone()));
                    break;
                }
            }
            hit
        }
    };
    Ok(found.map(|(c, delta)| {
        let kd = p.with_fan(p.fan.clone(), delta.clone()).k_plus_delta();
        let ample = u.sub(&kd.scale(&c));
        AmpleShiftWitness { c, delta, ample }
    }))
}

/// Maximizes a margin `t` with `c ≥ t` and `(u - cK_a)·C ≥ t` on every curve.
fn scale_for(ns: &NumSpace, u: &TDivisor, ka: &TDivisor, fixed_c: Option<&Rat>) -> Option<Rat> {
    // Variables (c, t).
    let mut ineqs: Vec<(QVec, Rat)> = vec![(QVec(vec![int(1), int(-1)]), int(0)), (QVec(vec![int(0), int(-1)]), int(-1))];
    for cv in &ns.curves {
        ineqs.push((QVec(vec![-cv.degree(ka), int(-1)]), -cv.degree(u)));
    }
    let eqs: Vec<(QVec, Rat)> = fixed_c.map(|c| (QVec(vec![int(1), int(0)]), c.clone())).into_iter().collect();
    match solve_general(&QVec::unit(2, 1), &ineqs, &eqs, 2, Sense::Max) {
        LpOutcome::Optimal { value, witness } if value.is_positive() => Some(witness[0].clone()),
        _ => None,
    }
}

/// Free choice of a klt boundary: with `e = cΔ_a` the conditions are linear in `(e, c)`.
fn free_boundary(ns: &NumSpace, u: &TDivisor, fixed_c: Option<&Rat>) -> Option<(Rat, TDivisor)> {
    let p = &ns.pair;
    let nr = p.n_rays();
    let k = p.k();
    let (ci, ti) = (nr, nr + 1);
    let nv = nr + 2;
    let mut ineqs: Vec<(QVec, Rat)> = Vec::new();
    for j in 0..nr {
        ineqs.push((QVec::unit(nv, j), int(0)));
        let mut row = QVec::zeros(nv);
        row[ci] = int(1);
        row[j] = int(-1);
        row[ti] = int(-1);
        ineqs.push((row, int(0)));
    }
    let mut row = QVec::unit(nv, ci);
    row[ti] = int(-1);
    ineqs.push((row, int(0)));
    ineqs.push((-&QVec::unit(nv, ti), int(-1)));
    for cv in &ns.curves {
        let mut row = QVec::zeros(nv);
        for j in 0..nr {
            row[j] = -cv.degrees[j].clone();
        }
        row[ci] = -cv.degree(&k);
        row[ti] = int(-1);
        ineqs.push((row, -cv.degree(u)));
    }
    let eqs: Vec<(QVec, Rat)> = fixed_c.map(|c| (QVec::unit(nv, ci), c.clone())).into_iter().collect();
    match solve_general(&QVec::unit(nv, ti), &ineqs, &eqs, nv, Sense::Max) {
        LpOutcome::Optimal { value, witness } if value.is_positive() => {
            let c = witness[ci].clone();
            let delta = TDivisor::new((0..nr).map(|j| &witness[j] / &c).collect());
            Some((c, delta))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::mmp::run_mmp_with_scaling;
    use crate::toric::fan::Fan;

    fn check_all(pred: &AmpleShiftPredicate, u: &TDivisor, ws: &[AmpleShiftWitness]) {
        for (patch, w) in pred.patches.iter().zip(ws) {
            let local = TDivisor::new(patch.ray_index.iter().map(|&i| u.coeffs[i].clone()).collect());
            assert!(verify_witness(&patch.pair, &local, w).unwrap());
        }
    }

    #[test]
    fn mmp_states_belong_with_unit_scale() {
        let p = gallery::f1();
        let a = TDivisor::from_ints(&[0, 0, 1, 3]);
        let trace = run_mmp_with_scaling(&p, &a).unwrap();
        for step in &trace.steps {
            let u = step.source.k_plus_delta().add(&step.scaling.scale(&step.lambda));
            let pred = AmpleShiftPredicate::single(&step.source, None);
            let ws = in_ample_shifted_set(&pred, &u, Some(&int(1))).unwrap().unwrap();
            assert_eq!(ws[0].c, int(1));
            check_all(&pred, &u, &ws);
        }
    }

    #[test]
    fn ample_with_zero_boundary() {
        let p = gallery::p2();
        let h = TDivisor::from_ints(&[1, 0, 0]);
        let pred = AmpleShiftPredicate::single(&p, Some(vec![TDivisor::zero(3)]));
        let ws = in_ample_shifted_set(&pred, &h, None).unwrap().unwrap();
        check_all(&pred, &h, &ws);
    }

    #[test]
    fn far_class_is_excluded() {
        // On F_3 the negative section has K·E = 1 > 0, so -f is no K-translate of an ample class.
        let f3 = Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 3], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap();
        let p = Pair::new(f3, TDivisor::zero(4)).unwrap();
        let pred = AmpleShiftPredicate::single(&p, Some(vec![TDivisor::zero(4)]));
        let minus_f = TDivisor::prime(4, 0).neg();
        assert!(in_ample_shifted_set(&pred, &minus_f, None).unwrap().is_none());
        assert!(!NumSpace::build(&p).unwrap().is_pseudoeffective(&minus_f).unwrap());
    }

    #[test]
    fn cover_of_a_fibration() {
        let p = gallery::f1_times_p1();
        let pred = AmpleShiftPredicate::over_cover(&p, &[vec![vec![0]], vec![vec![1]]]).unwrap();
        assert_eq!(pred.patches.len(), 2);
        let u = p.k_plus_delta().add(&TDivisor::from_ints(&[0, 0, 1, 3, 0, 0]));
        let ws = in_ample_shifted_set(&pred, &u, None).unwrap().unwrap();
        check_all(&pred, &u, &ws);
    }
}
