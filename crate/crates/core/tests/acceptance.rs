//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use mmp_core::chambers::{
    asymptotic_order, chamber_decomposition, compute_eav, default_valuations, nef_chamber, support_cone,
    DivisorSpan, HilbertWitness,
};
use mmp_core::cones::{cartier_degree, wall_degrees, NumSpace};
use mmp_core::exactla::rat::{int, rat};
use mmp_core::gallery::{self, random_qvec, rng};
use mmp_core::gluing::{base_change_check, glue_outputs, run_local_mmps, BaseCover};
use mmp_core::mmp::run::iteration_cap;
use mmp_core::mmp::{
    check_flip_axioms, contract_ray, flip, is_semiample, nef_threshold, negativity_check, output_at_scale, rationality_check,
    run_mmp_with_scaling, select_extremal_ray, ContractionKind, MMPTrace, Outcome,
};
use mmp_core::toric::{discrepancy, discrepancy_by_subdivision, effectivity_test, pullback_divisor, star_subdivision};
use mmp_core::{Pair, PolyCone, QVec, Rat, TDivisor};
use num::{Signed, Zero};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn half_on(n: usize, i: usize) -> TDivisor {
    let mut d = TDivisor::zero(n);
    d.coeffs[i] = rat(1, 2);
    d
}

fn kleiman() -> Check {
    let start = Instant::now();
    let mut g = rng(11);
    let mut checked = 0;
    let mut ample_seen = 0;
    let pairs = common::instances(30);
    for (s, p) in pairs.iter().enumerate() {
        let ns = NumSpace::build(p).map_err(e)?;
        ensure(p.fan.rank <= 3 && ns.rank <= 4, || format!("instance {s} out of range"))?;
        let h = common::ample(p);
        for j in 0..50 {
            let noise = TDivisor::new(random_qvec(&mut g, p.n_rays()).0);
            let d = if j % 2 == 0 { noise } else { h.scale(&int(g.gen_range(1..=3))).add(&noise.scale(&rat(1, 4))) };
            let a = ns.is_ample(&d).map_err(e)?;
            let interior = ns.is_ample_by_interior(&d).map_err(e)?;
            let convex = ns.is_ample_by_convexity(&d).map_err(e)?;
            let curves = ns.curves.iter().all(|c| c.degree(&d).is_positive());
            ensure(a == interior && a == convex && a == curves, || format!("instance {s} class {j}: {a} {interior} {convex} {curves}"))?;
            ample_seen += a as usize;
            checked += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!("{} instances, {checked} classes ({ample_seen} ample), {:.1}s", pairs.len(), t.as_secs_f64()))
}

fn rationality() -> Check {
    let p2 = nef_threshold(&gallery::p2(), &TDivisor::from_ints(&[0, 0, 1])).map_err(e)?;
    ensure(p2 == int(3), || format!("P2 threshold {p2}"))?;
    let f1 = nef_threshold(&gallery::f1(), &TDivisor::from_ints(&[0, 0, 1, 3])).map_err(e)?;
    ensure(f1 == int(1), || format!("F1 threshold {f1}"))?;
    let mut n = 0;
    for (s, p) in common::instances(30).iter().enumerate() {
        let a = common::ample(p);
        let l = nef_threshold(p, &a).map_err(e)?;
        let ns = NumSpace::build(p).map_err(e)?;
        let kd = p.k_plus_delta();
        // oracle: nef at λ, not nef just below
        ensure(ns.is_nef(&kd.add(&a.scale(&l))).map_err(e)?, || format!("instance {s}: not nef at {l}"))?;
        if l.is_zero() {
            continue;
        }
        ensure(!ns.is_nef(&kd.add(&a.scale(&(&l - rat(1, 1000))))).map_err(e)?, || format!("instance {s}: nef below {l}"))?;
        let q = rationality_check(p, &a).map_err(e)?;
        ensure(p.boundary.coeffs.iter().all(|c| *c.denom() <= 6.into()), || format!("instance {s}: boundary denominators"))?;
        // `a` is the Cartier index of K+Δ, the lcm of the boundary denominators
        ensure(q.holds && q.lambda == l && q.v <= q.bound, || format!("instance {s}: {q:?}"))?;
        n += 1;
    }
    Ok(format!("P2 gives 3, F1 gives 1, denominator bound on {n} instances"))
}

fn traces() -> Result<Vec<(String, Pair, MMPTrace)>, String> {
    let mut out = Vec::new();
    for (s, p) in common::instances(30).into_iter().enumerate() {
        let a = common::scaling(&p);
        let t = run_mmp_with_scaling(&p, &a).map_err(|x| format!("instance {s}: {x}"))?;
        out.push((format!("instance {s}"), p, t));
    }
    let f1 = gallery::f1();
    out.push(("F1".into(), f1.clone(), run_mmp_with_scaling(&f1, &TDivisor::from_ints(&[0, 0, 1, 3])).map_err(e)?));
    let fp = gallery::f1_times_p1();
    out.push(("F1 x P1".into(), fp.clone(), run_mmp_with_scaling(&fp, &TDivisor::from_ints(&[0, 0, 1, 3, 0, 0])).map_err(e)?));
    let q = gallery::quadric_resolution(1, half_on(4, 0)).map_err(e)?;
    out.push(("quadric".into(), q.clone(), run_mmp_with_scaling(&q, &TDivisor::from_ints(&[0, 1, 0, 0])).map_err(e)?));
    Ok(out)
}

fn existence(traces: &[(String, Pair, MMPTrace)]) -> Check {
    let mut kinds = [0usize; 3];
    for (name, p, t) in traces {
        ensure(t.steps.len() <= iteration_cap(p), || format!("{name}: {} steps", t.steps.len()))?;
        for s in &t.steps {
            let ok = match s.kind {
                ContractionKind::Divisorial => s.rank_after + 1 == s.rank_before,
                ContractionKind::MoriFiber => s.rank_after + 1 == s.rank_before,
                ContractionKind::Flip => s.rank_after == s.rank_before,
            };
            ensure(ok, || format!("{name}: {} with rank {} -> {}", s.kind.label(), s.rank_before, s.rank_after))?;
            kinds[match s.kind {
                ContractionKind::Divisorial => 0,
                ContractionKind::MoriFiber => 1,
                ContractionKind::Flip => 2,
            }] += 1;
        }
        // oracle for pseudoeffectivity over a point: the section polytope of K+Δ is nonempty
        let psef = match &p.base {
            None => effectivity_test(&p.k_plus_delta(), &p.fan),
            Some(_) => NumSpace::build(p).and_then(|ns| ns.is_pseudoeffective(&p.k_plus_delta())).map_err(e)?,
        };
        let expect = if psef { Outcome::MinimalModel } else { Outcome::MoriFibration };
        ensure(t.outcome == expect, || format!("{name}: outcome {:?}, pseudoeffective {psef}", t.outcome))?;
    }
    Ok(format!("{} traces; divisorial {}, flips {}, fibrations {}", traces.len(), kinds[0], kinds[2], kinds[1]))
}

fn flips() -> Check {
    for k in 1..=2 {
        let x = gallery::quadric_resolution(k, half_on(4, 0)).map_err(e)?;
        let a = TDivisor::from_ints(&[0, 1, 0, 0]);
        let l = nef_threshold(&x, &a).map_err(e)?;
        let c = contract_ray(&x, &select_extremal_ray(&x, &a, &l).map_err(e)?).map_err(e)?;
        ensure(c.kind == ContractionKind::Flip, || format!("k={k}: {:?}", c.kind))?;
        // the plain quadric has degrees ∓1/2; the weighted one scales them by 1/k
        let before = c.ray.curve().degree(&x.k_plus_delta());
        ensure(before == rat(-1, 2 * k), || format!("k={k}: degree before {before}"))?;
        let xp = flip(&x, &c).map_err(e)?;
        let rep = check_flip_axioms(&x, &xp, &c.y_fan).map_err(e)?;
        ensure(rep.all_pass(), || format!("k={k}: {}", rep.summary()))?;
        ensure(rep.degrees == vec![rat(1, 2 * k)], || format!("k={k}: degrees after {:?}", rep.degrees))?;
        let opposite = gallery::quadric_opposite(k, half_on(4, 0)).map_err(e)?;
        ensure(xp.fan.same_as(&opposite.fan), || format!("k={k}: wrong flipped fan"))?;
        // flipping back needs the boundary on the other diagonal
        let mirror = gallery::quadric_opposite(k, half_on(4, 1)).map_err(e)?;
        let b = TDivisor::from_ints(&[1, 0, 0, 0]);
        let lb = nef_threshold(&mirror, &b).map_err(e)?;
        let cb = contract_ray(&mirror, &select_extremal_ray(&mirror, &b, &lb).map_err(e)?).map_err(e)?;
        let back = flip(&mirror, &cb).map_err(e)?;
        ensure(back.fan.same_as(&x.fan), || format!("k={k}: re-flip does not recover the fan"))?;
    }
    Ok("quadric: axioms hold, degree -1/2 -> 1/2; weighted variant -1/4 -> 1/4; re-flip recovers the fan".into())
}

fn ledger(traces: &[(String, Pair, MMPTrace)]) -> Check {
    let mut steps = 0;
    let mut vals = 0;
    for (name, _, t) in traces {
        for (i, s) in t.steps.iter().enumerate() {
            let Some(l) = &s.ledger else {
                ensure(s.kind == ContractionKind::MoriFiber, || format!("{name} step {i}: birational step without ledger"))?;
                continue;
            };
            ensure(l.deltas.iter().all(|d| d.after >= d.before), || format!("{name} step {i}: a discrepancy went down"))?;
            ensure(l.deltas.iter().any(|d| d.after > d.before), || format!("{name} step {i}: no strict change"))?;
            steps += 1;
            vals += l.deltas.len();
        }
    }
    let mut g = rng(23);
    let mut negativity = 0;
    let mut seed = 0;
    while negativity < 20 {
        let y = gallery::random_pair(1000 + seed, 3, 2);
        seed += 1;
        let c = y.fan.cones[g.gen_range(0..y.fan.cones.len())].clone();
        let (i, j) = (c[0], c[1]);
        let v: Vec<i64> = y.fan.rays[i].iter().zip(&y.fan.rays[j]).map(|(a, b)| a + b).collect();
        let v = mmp_core::exactla::lattice::primitive(&v);
        let (x, h) = star_subdivision(&y.fan, &v).map_err(e)?;
        let ex = x.n_rays() - 1;
        let l = common::ample(&y);
        let shift = l.scale(&int(g.gen_range(0..=2)));
        let b = TDivisor::prime(x.n_rays(), ex)
            .scale(&rat(g.gen_range(1..=5), g.gen_range(1..=3)))
            .add(&pullback_divisor(&h, &x, &y.fan, &shift).map_err(e)?);
        if !shift.is_effective() {
            continue;
        }
        ensure(negativity_check(&h, &x, &y.fan, &b).map_err(e)?, || format!("negativity fails on {v:?}"))?;
        // control: the opposite sign violates the nefness hypothesis
        ensure(negativity_check(&h, &x, &y.fan, &b.neg()).is_err(), || "negated divisor accepted".into())?;
        negativity += 1;
    }
    Ok(format!(
        "{steps} birational steps, {vals} valuations, never decreasing with a strict increase each; negativity on {negativity} blow-ups"
    ))
}

fn cube_points(n: usize, g: &mut rand_chacha::ChaCha8Rng) -> QVec {
    QVec((0..n).map(|_| rat(g.gen_range(0..=4), 4)).collect())
}

fn chambers() -> Check {
    let p2 = gallery::p2();
    let v = DivisorSpan::new(3, vec![0]).map_err(e)?;
    let two = compute_eav(&p2, &TDivisor::from_ints(&[0, 0, 2]), &v).map_err(e)?.vrep();
    ensure(two.vertices == vec![QVec::from_ints(&[1])] && two.rays.is_empty(), || format!("2H: {two:?}"))?;
    let mut three = compute_eav(&p2, &TDivisor::from_ints(&[0, 0, 3]), &v).map_err(e)?.vrep().vertices;
    three.sort();
    ensure(three == vec![QVec::from_ints(&[0]), QVec::from_ints(&[1])], || format!("3H: {three:?}"))?;

    let mut g = rng(31);
    let mut eav = 0;
    for (s, p) in common::instances(10).iter().enumerate() {
        let a = common::ample(p);
        let span = DivisorSpan::new(p.n_rays(), vec![0, 1]).map_err(e)?;
        let poly = compute_eav(p, &a, &span).map_err(e)?;
        let vr = poly.vrep();
        ensure(vr.rays.is_empty(), || format!("instance {s}: unbounded"))?;
        for x in &vr.vertices {
            ensure(effectivity_test(&p.k().add(&a).add(&span.divisor(x)), &p.fan), || format!("instance {s}: vertex {x}"))?;
        }
        for _ in 0..10 {
            let b = cube_points(2, &mut g);
            let direct = effectivity_test(&p.k().add(&a).add(&span.divisor(&b)), &p.fan);
            ensure(poly.contains(&b) == direct, || format!("instance {s}: membership of {b}"))?;
        }
        eav += 1;
    }

    let mut cases: Vec<(Pair, Vec<TDivisor>)> = vec![(gallery::f1(), vec![TDivisor::prime(4, 0), TDivisor::prime(4, 1)])];
    for p in common::instances(6) {
        let ds = vec![common::ample(&p), TDivisor::prime(p.n_rays(), 0)];
        cases.push((p, ds));
    }
    let mut sampled = 0;
    for (s, (p, ds)) in cases.iter().enumerate() {
        let sc = support_cone(ds, p).map_err(e)?;
        let vals = default_valuations(&p.fan).map_err(e)?;
        let cd = chamber_decomposition(&sc, ds, &vals, p).map_err(e)?;
        ensure(cd.is_subdivision() && cd.is_coarsest(), || format!("case {s}: coarseness certificate"))?;
        let nc = nef_chamber(&cd, p).map_err(e)?.ok_or_else(|| format!("case {s}: no nef chamber"))?;
        let cell = &cd.cells[nc];
        for _ in 0..10 {
            let t = cell.rays.iter().fold(QVec::zeros(sc.dim), |acc, r| acc.axpy(&int(g.gen_range(1..=4)), r));
            let d = cd.divisor_at(&t);
            for v in &vals {
                let o = asymptotic_order(v, &d, p).map_err(e)?;
                ensure(o == Some(Rat::zero()), || format!("case {s}: order {o:?} at {v} on the nef chamber"))?;
            }
            ensure(is_semiample(&d, p).map_err(e)?, || format!("case {s}: not semiample"))?;
            sampled += 1;
        }
    }
    Ok(format!("P2 gives {{1}} and [0,1]; {eav} polytopes checked; {} decompositions coarsest; {sampled} nef-chamber samples", cases.len()))
}

fn finite_generation() -> Check {
    let c = PolyCone::from_generators(2, &[QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 2])]).map_err(e)?;
    let w = HilbertWitness::of_cone(&c).map_err(e)?;
    let expect = vec![QVec::from_ints(&[1, 0]), QVec::from_ints(&[1, 1]), QVec::from_ints(&[1, 2])];
    ensure(w.basis == expect, || format!("basis {:?}", w.basis))?;
    let mut g = rng(41);
    let mut pts = 0;
    for (s, p) in common::instances(10).iter().enumerate() {
        let w = mmp_core::chambers::hilbert_basis_witness(&[common::ample(p)], p).map_err(e)?;
        for _ in 0..200 {
            let x = w.random_point(&mut g, 4);
            let parts = w.decompose(&x).ok_or_else(|| format!("instance {s}: {x} does not decompose"))?;
            let sum = parts.iter().fold(QVec::zeros(x.dim()), |acc, &i| &acc + &w.basis[i]);
            ensure(sum == x, || format!("instance {s}: decomposition of {x} sums to {sum}"))?;
            pts += 1;
        }
    }
    Ok(format!("{{(1,0),(1,2)}} has basis {{(1,0),(1,1),(1,2)}}; {pts} points decompose on 10 instances"))
}

fn glue() -> Check {
    let start = Instant::now();
    let p = gallery::f1_times_p1();
    let a = TDivisor::from_ints(&[0, 0, 1, 3, 0, 0]);
    let base = p.base.as_ref().unwrap().fan.clone();
    let cover = BaseCover::charts(&base).map_err(e)?;
    ensure(cover.patches.len() == 2, || "expected two charts".into())?;
    let rs = [rat(4, 5), rat(7, 8), int(1), rat(3, 2), int(3)];
    let runs = run_local_mmps(&p, &a, &cover, &rs).map_err(e)?;
    for r in &rs {
        let glued = glue_outputs(&p, &cover, &runs, r).map_err(e)?.map_err(|m| format!("r = {r}: {m}"))?;
        let global = output_at_scale(&p, &a, r).map_err(e)?.pair;
        ensure(glued.fan.same_as(&global.fan), || format!("r = {r}: glued differs from global"))?;
        for patch in &cover.patches {
            ensure(base_change_check(&p, &a, patch, r).map_err(e)?, || format!("r = {r}: base change fails"))?;
        }
    }
    let mut bad = runs.clone();
    let i = bad[1].outputs.iter().position(|(r, _)| *r == int(1)).unwrap();
    bad[1].outputs[i].1 = bad[1].pair.clone();
    ensure(glue_outputs(&p, &cover, &bad, &int(1)).map_err(e)?.is_err(), || "perturbed output glued".into())?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("two charts, 5 scales glue and base-change, perturbation rejected, {:.1}s", t.as_secs_f64()))
}

fn oracles() -> Check {
    let mut g = rng(53);
    let mut samples = 0;
    let mut seed = 0;
    while samples < 100 {
        let p = gallery::random_pair(2000 + seed, 4, 6);
        seed += 1;
        for _ in 0..10 {
            let v: Vec<i64> = (0..p.fan.rank).map(|_| g.gen_range(-3..=3)).collect();
            if v.iter().all(|&x| x == 0) || !mmp_core::exactla::lattice::is_primitive(&v) {
                continue;
            }
            let a = discrepancy(&p, &v).map_err(e)?;
            let b = discrepancy_by_subdivision(&p, &v).map_err(e)?;
            ensure(a == b, || format!("{v:?}: {a} vs {b}"))?;
            samples += 1;
        }
    }
    let mut walls = 0;
    let mut insts = common::instances(30);
    insts.push(gallery::f1_times_p1());
    insts.push(gallery::quadric_resolution(1, half_on(4, 0)).map_err(e)?);
    for (s, p) in insts.iter().enumerate() {
        for w in p.fan.walls() {
            let degs = wall_degrees(p, &w).map_err(e)?;
            for (i, deg) in degs.iter().enumerate() {
                let c = cartier_degree(p, &w, &TDivisor::prime(p.n_rays(), i)).map_err(e)?;
                ensure(c == *deg, || format!("instance {s}: wall {w:?} ray {i}: {deg} vs {c}"))?;
            }
            walls += 1;
        }
    }
    let mut vols = 0;
    for p in common::instances(15) {
        let h = common::ample(&p);
        let d = h.add(&TDivisor::new(random_qvec(&mut g, p.n_rays()).0).scale(&rat(1, 8)));
        for x in [h, d] {
            let v1 = mmp_core::toric::volume(&x, &p.fan).map_err(e)?;
            for n in 1..=3i64 {
                let vn = mmp_core::toric::volume(&x.scale(&int(n)), &p.fan).map_err(e)?;
                ensure(vn == &v1 * int(n.pow(p.fan.rank as u32)), || format!("vol({n}D) = {vn}, vol(D) = {v1}"))?;
            }
            vols += 1;
        }
    }
    Ok(format!("{samples} discrepancies agree, {walls} walls agree on every prime divisor, homogeneity on {vols} divisors"))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, r: Check| {
        match r {
            Ok(d) => println!("PASS {n} {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {n} {name}: {d}")
            }
        }
    };
    report(1, "kleiman/openness", kleiman());
    report(2, "rationality", rationality());
    let ts = traces();
    match &ts {
        Ok(ts) => {
            report(3, "mmp existence/termination", existence(ts));
        }
        Err(m) => report(3, "mmp existence/termination", Err(m.clone())),
    }
    report(4, "flip axioms", flips());
    match &ts {
        Ok(ts) => report(5, "discrepancy ledger", ledger(ts)),
        Err(m) => report(5, "discrepancy ledger", Err(m.clone())),
    }
    report(6, "chambers", chambers());
    report(7, "finite generation", finite_generation());
    report(8, "glue", glue());
    report(9, "oracle cross-checks", oracles());
    if failed > 0 {
        std::process::exit(1);
    }
}
