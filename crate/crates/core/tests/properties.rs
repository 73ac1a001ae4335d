mod common;

use mmp_core::chambers::{asymptotic_order, chamber_decomposition, default_valuations, nef_chamber, support_cone};
use mmp_core::cones::NumSpace;
use mmp_core::exactla::lattice::primitive;
use mmp_core::exactla::linalg::rank;
use mmp_core::exactla::rat::{int, rat};
use mmp_core::exactla::{LpOutcome, Sense};
use mmp_core::gallery::{self, random_pair};
use mmp_core::gluing::{glue_outputs, restrict_family, run_local_mmps, BaseCover};
use mmp_core::mmp::{output_at_scale, run_mmp_with_scaling};
use mmp_core::toric::{classify_pair, discrepancy, principal_divisor, pullback_divisor, star_subdivision};
use mmp_core::{Pair, PolyCone, QVec, Rat, TDivisor};
use num::{Signed, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn divisor(n: usize) -> impl Strategy<Value = TDivisor> {
    prop::collection::vec(small_rat(), n).prop_map(TDivisor::new)
}

fn effective(n: usize) -> impl Strategy<Value = TDivisor> {
    prop::collection::vec((0i64..=8, 1i64..=3).prop_map(|(a, b)| rat(a, b)), n).prop_map(TDivisor::new)
}

/// A star subdivision at the sum of two rays of some cone, with the pair it refines.
fn blow_up(seed: u64, pick: usize) -> (Pair, Pair, mmp_core::LatticeMap) {
    let y = random_pair(seed, 3, 4);
    let c = &y.fan.cones[pick % y.fan.cones.len()];
    let v: Vec<i64> = y.fan.rays[c[0]].iter().zip(&y.fan.rays[c[1]]).map(|(a, b)| a + b).collect();
    let (x, h) = star_subdivision(&y.fan, &primitive(&v)).unwrap();
    let xp = Pair::new(x, TDivisor::zero(y.n_rays() + 1)).unwrap();
    (y, xp, h)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 24,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0),
        ..ProptestConfig::default()
    })]

    #[test]
    fn double_dual_is_identity(dim in 2usize..=4, gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..6)) {
        let gens: Vec<QVec> = gens.iter().map(|g| QVec::from_ints(&g[..dim])).collect();
        let c = PolyCone::from_generators(dim, &gens).unwrap();
        let back = c.dual().dual();
        prop_assert!(back.set_eq(&c));
        prop_assert!(gens.iter().all(|g| back.contains(g)));
    }

    #[test]
    fn lp_strong_duality(
        a in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 2..5),
        b in prop::collection::vec(0i64..=6, 5),
        c in prop::collection::vec(-3i64..=5, 3),
    ) {
        // max c.x, A x <= b, 0 <= x <= 5; dual min b.y + 5 sum(z), A^T y + z >= c, y, z >= 0
        let (m, n) = (a.len(), 3);
        let mut primal = Vec::new();
        for (row, bi) in a.iter().zip(&b) {
            primal.push((-&QVec::from_ints(row), int(-bi)));
        }
        for j in 0..n {
            primal.push((QVec::unit(n, j), int(0)));
            primal.push((-&QVec::unit(n, j), int(-5)));
        }
        let LpOutcome::Optimal { value: p, .. } = mmp_core::exactla::lp::solve_general(&QVec::from_ints(&c), &primal, &[], n, Sense::Max) else {
            return Err(TestCaseError::fail("primal not optimal"));
        };
        let nv = m + n;
        let mut dual = Vec::new();
        for j in 0..n {
            let mut row = QVec::zeros(nv);
            for i in 0..m {
                row[i] = int(a[i][j]);
            }
            row[m + j] = int(1);
            dual.push((row, int(c[j])));
        }
        for k in 0..nv {
            dual.push((QVec::unit(nv, k), int(0)));
        }
        let obj = QVec((0..nv).map(|k| if k < m { int(b[k]) } else { int(5) }).collect());
        let LpOutcome::Optimal { value: d, .. } = mmp_core::exactla::lp::solve_general(&obj, &dual, &[], nv, Sense::Min) else {
            return Err(TestCaseError::fail("dual not optimal"));
        };
        prop_assert_eq!(p, d);
    }

    #[test]
    fn pullback_commutes_with_principal(seed in 0u64..40, pick in 0usize..8, d in divisor(8), m in prop::collection::vec(small_rat(), 3)) {
        let (y, x, h) = blow_up(seed, pick);
        let d = TDivisor::new(d.coeffs[..y.n_rays()].to_vec());
        let m = QVec(m[..y.fan.rank].to_vec());
        let lhs = pullback_divisor(&h, &x.fan, &y.fan, &d.add(&principal_divisor(&y.fan, &m))).unwrap();
        let rhs = pullback_divisor(&h, &x.fan, &y.fan, &d).unwrap().add(&principal_divisor(&x.fan, &m));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn floor_frac_and_meet(a in divisor(6), b in divisor(6)) {
        prop_assert_eq!(a.floor().add(&a.frac()), a.clone());
        prop_assert!(a.meet(&b).leq(&a) && a.meet(&b).leq(&b));
    }

    #[test]
    fn singularity_class_bounds_discrepancies(seed in 0u64..200, vs in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 8)) {
        let p = random_pair(seed, 4, 6);
        let class = classify_pair(&p).unwrap();
        for v in vs {
            let v = &v[..p.fan.rank];
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let v = primitive(v);
            let a = discrepancy(&p, &v).unwrap();
            if class.klt {
                prop_assert!(a > int(-1));
            }
            if class.terminal && p.fan.ray_index(&v).is_none() {
                prop_assert!(a.is_positive());
            }
        }
    }

    #[test]
    fn kleiman_equivalence(seed in 0u64..200, d in divisor(8)) {
        let p = random_pair(seed, 4, 6);
        let ns = NumSpace::build(&p).unwrap();
        let d = TDivisor::new(d.coeffs[..p.n_rays()].to_vec());
        let a = ns.is_ample(&d).unwrap();
        prop_assert_eq!(a, ns.is_ample_by_interior(&d).unwrap());
        prop_assert_eq!(a, ns.curves.iter().all(|c| c.degree(&d).is_positive()));
    }

    #[test]
    fn perfect_pairing(seed in 0u64..200) {
        let ns = NumSpace::build(&random_pair(seed, 4, 6)).unwrap();
        prop_assert_eq!(rank(&ns.pairing_matrix()), ns.rank);
    }

    #[test]
    fn big_plus_nef_is_big(seed in 0u64..200, e in effective(8), w in prop::collection::vec(0i64..=3, 6)) {
        let p = random_pair(seed, 4, 6);
        let ns = NumSpace::build(&p).unwrap();
        let big = common::ample(&p).add(&TDivisor::new(e.coeffs[..p.n_rays()].to_vec()));
        prop_assert!(ns.is_big(&big).unwrap());
        let nef_rays = ns.nef_cone().rays;
        let x = nef_rays.iter().zip(&w).fold(QVec::zeros(ns.rank), |acc, (r, &k)| acc.axpy(&int(k), r));
        let nef = ns.divisor_with_class(&x);
        prop_assert!(ns.is_nef(&nef).unwrap());
        prop_assert!(ns.is_big(&big.add(&nef)).unwrap());
    }

    #[test]
    fn pullback_preserves_nef(seed in 0u64..40, pick in 0usize..8, w in prop::collection::vec(0i64..=3, 6)) {
        let (y, x, h) = blow_up(seed, pick);
        let ns = NumSpace::build(&y).unwrap();
        let cls = ns.nef_cone().rays.iter().zip(&w).fold(QVec::zeros(ns.rank), |acc, (r, &k)| acc.axpy(&int(k), r));
        let d = ns.divisor_with_class(&cls);
        let pulled = pullback_divisor(&h, &x.fan, &y.fan, &d).unwrap();
        prop_assert!(NumSpace::build(&x).unwrap().is_nef(&pulled).unwrap());
    }

    #[test]
    fn volume_is_homogeneous(seed in 0u64..200, e in effective(8)) {
        let p = random_pair(seed, 4, 6);
        let d = common::ample(&p).add(&TDivisor::new(e.coeffs[..p.n_rays()].to_vec()));
        let v1 = mmp_core::toric::volume(&d, &p.fan).unwrap();
        for n in 2..=3i64 {
            let vn = mmp_core::toric::volume(&d.scale(&int(n)), &p.fan).unwrap();
            prop_assert_eq!(vn, &v1 * int(n.pow(p.fan.rank as u32)));
        }
    }

    #[test]
    fn traces_keep_their_books(seed in 0u64..200) {
        let p = random_pair(seed, 4, 6);
        let t = run_mmp_with_scaling(&p, &common::scaling(&p)).unwrap();
        prop_assert!(t.check_invariants().is_ok(), "{:?}", t.check_invariants());
    }

    #[test]
    fn output_at_scale_is_deterministic(seed in 0u64..200, r in (1i64..=8, 1i64..=4)) {
        let p = random_pair(seed, 4, 6);
        let a = common::scaling(&p);
        let r = rat(r.0, r.1);
        match (output_at_scale(&p, &a, &r), output_at_scale(&p, &a, &r)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x.pair.fan.canonical(), y.pair.fan.canonical()),
            (Err(x), Err(y)) => prop_assert_eq!(x.to_string(), y.to_string()),
            _ => prop_assert!(false, "outputs differ in success"),
        }
    }

    #[test]
    fn orders_are_homogeneous_and_subadditive(seed in 0u64..200, d1 in effective(8), d2 in effective(8), t in 1i64..=4) {
        let p = random_pair(seed, 4, 6);
        let n = p.n_rays();
        let (d1, d2) = (TDivisor::new(d1.coeffs[..n].to_vec()), TDivisor::new(d2.coeffs[..n].to_vec()));
        for v in default_valuations(&p.fan).unwrap() {
            let o1 = asymptotic_order(&v, &d1, &p).unwrap().unwrap();
            let o2 = asymptotic_order(&v, &d2, &p).unwrap().unwrap();
            prop_assert!(!o1.is_negative());
            prop_assert_eq!(asymptotic_order(&v, &d1.scale(&int(t)), &p).unwrap().unwrap(), &o1 * int(t));
            prop_assert!(asymptotic_order(&v, &d1.add(&d2), &p).unwrap().unwrap() <= &o1 + &o2);
        }
    }
}

#[test]
fn orders_vanish_exactly_on_the_nef_chamber() {
    let p = gallery::f1();
    let ds = vec![TDivisor::prime(4, 0), TDivisor::prime(4, 1)];
    let sc = support_cone(&ds, &p).unwrap();
    let vals = default_valuations(&p.fan).unwrap();
    let cd = chamber_decomposition(&sc, &ds, &vals, &p).unwrap();
    let nef = nef_chamber(&cd, &p).unwrap().unwrap();
    for (i, cell) in cd.cells.iter().enumerate() {
        let t = cell.relint_point();
        let d = cd.divisor_at(&t);
        let orders: Vec<Rat> = vals.iter().map(|v| asymptotic_order(v, &d, &p).unwrap().unwrap()).collect();
        if i == nef {
            assert!(orders.iter().all(|o| o.is_zero()));
        } else {
            assert!(orders.iter().any(|o| o.is_positive()));
        }
    }
    // every pseudoeffective nonnegative combination lies in the support cone
    let ns = NumSpace::build(&p).unwrap();
    for a in -3..=3 {
        for b in -3..=3 {
            let t = QVec::from_ints(&[a, b]);
            let d = cd.divisor_at(&t);
            if a >= 0 && b >= 0 && ns.is_pseudoeffective(&d).unwrap() {
                assert!(sc.contains(&t), "{t}");
            }
        }
    }
}

#[test]
fn glued_outputs_restrict_back() {
    let p = gallery::f1_times_p1();
    let a = TDivisor::from_ints(&[0, 0, 1, 3, 0, 0]);
    let cover = BaseCover::charts(&p.base.as_ref().unwrap().fan).unwrap();
    let rs = [rat(4, 5), int(1), int(3)];
    let runs = run_local_mmps(&p, &a, &cover, &rs).unwrap();
    for r in &rs {
        let glued = glue_outputs(&p, &cover, &runs, r).unwrap().unwrap();
        for run in &runs {
            let back = restrict_family(&glued, &cover.patches[run.patch]).unwrap();
            assert!(back.local.pair.fan.same_as(&run.output(r).unwrap().fan), "r = {r}, patch {}", run.patch);
        }
    }
}
