//! Small fixed instances and a seeded generator of random projective toric pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactla::lattice;
use crate::exactla::{QVec, Rat};
use crate::toric::divisor::TDivisor;
use crate::toric::fan::{star_subdivision, Fan, LatticeMap};
use crate::toric::pair::{Base, Pair};

pub fn p1_fan() -> Fan {
    Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).expect("static fan")
}

pub fn p2_fan() -> Fan {
    Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).expect("static fan")
}

/// Rays `r1 = (1,0)`, `r2 = (1,1)`, `r3 = (0,1)`, `r4 = (-1,-1)`; the exceptional curve is `D_{r2}`.
pub fn f1_fan() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
    .expect("static fan")
}

pub fn p2() -> Pair {
    Pair::new(p2_fan(), TDivisor::zero(3)).expect("static pair")
}

pub fn f1() -> Pair {
    Pair::new(f1_fan(), TDivisor::zero(4)).expect("static pair")
}

/// `F₁ × P¹` over `P¹` via the last coordinate. Rays 0..4 are the `F₁` rays, 4 and 5 are `±e₃`.
pub fn f1_times_p1() -> Pair {
    let f = f1_fan();
    let mut rays: Vec<Vec<i64>> = f.rays.iter().map(|r| vec![r[0], r[1], 0]).collect();
    rays.push(vec![0, 0, 1]);
    rays.push(vec![0, 0, -1]);
    let cones = f.cones.iter().flat_map(|c| [vec![c[0], c[1], 4], vec![c[0], c[1], 5]]).collect();
    let fan = Fan::new(3, rays, cones).expect("static fan");
    let map = LatticeMap::new(3, vec![vec![0, 0, 1]]).expect("static map");
    Pair::relative(fan, TDivisor::zero(6), Some(Base { fan: p1_fan(), map })).expect("static pair")
}

/// Rays `v1 = (0,0,1)`, `v2 = (1,0,1)`, `v3 = (1,k,1)`, `v4 = (0,k,1)` with `v2 + v4 = v1 + v3`.
fn quadric_rays(k: i64) -> Vec<Vec<i64>> {
    vec![vec![0, 0, 1], vec![1, 0, 1], vec![1, k, 1], vec![0, k, 1]]
}

/// The cone over a quadric (weighted by `k`), as a one-cone fan.
pub fn quadric_cone(k: i64) -> Fan {
    Fan::new(3, quadric_rays(k), vec![vec![0, 1, 2, 3]]).expect("static fan")
}

/// Small resolution `{v1v2v3, v1v3v4}` of the quadric cone, over the cone itself, with the
/// given boundary.
pub fn quadric_resolution(k: i64, boundary: TDivisor) -> crate::Result<Pair> {
    let fan = Fan::new(3, quadric_rays(k), vec![vec![0, 1, 2], vec![0, 2, 3]])?;
    Pair::relative(fan, boundary, Some(Base { fan: quadric_cone(k), map: LatticeMap::identity(3) }))
}

/// The opposite small resolution `{v1v2v4, v2v3v4}`.
pub fn quadric_opposite(k: i64, boundary: TDivisor) -> crate::Result<Pair> {
    let fan = Fan::new(3, quadric_rays(k), vec![vec![0, 1, 3], vec![1, 2, 3]])?;
    Pair::relative(fan, boundary, Some(Base { fan: quadric_cone(k), map: LatticeMap::identity(3) }))
}

/// `P¹ × P¹ × P¹`.
pub fn p1_cubed_fan() -> Fan {
    let mut rays = Vec::new();
    for i in 0..3 {
        for s in [1, -1] {
            let mut r = vec![0; 3];
            r[i] = s;
            rays.push(r);
        }
    }
    let mut cones = Vec::new();
    for a in 0..2 {
        for b in 2..4 {
            for c in 4..6 {
                cones.push(vec![a, b, c]);
            }
        }
    }
    Fan::new(3, rays, cones).expect("static fan")
}

pub fn p3_fan() -> Fan {
    let rays = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]];
    let cones = (0..4).map(|skip| (0..4).filter(|&i| i != skip).collect()).collect();
    Fan::new(3, rays, cones).expect("static fan")
}

pub fn p1xp1_fan() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
    )
    .expect("static fan")
}

/// `P² × P¹`.
pub fn p2xp1_fan() -> Fan {
    let mut rays: Vec<Vec<i64>> = p2_fan().rays.iter().map(|r| vec![r[0], r[1], 0]).collect();
    rays.push(vec![0, 0, 1]);
    rays.push(vec![0, 0, -1]);
    let cones = p2_fan().cones.iter().flat_map(|c| [vec![c[0], c[1], 3], vec![c[0], c[1], 4]]).collect();
    Fan::new(3, rays, cones).expect("static fan")
}

/// A random complete simplicial projective fan of dimension 2 or 3 with Picard rank at most
/// `max_rank`, built from a projective seed fan by weighted star subdivisions.
pub fn random_fan(rng: &mut ChaCha8Rng, max_rank: usize) -> Fan {
    let dim = rng.gen_range(2..=3usize);
    let seeds: Vec<Fan> = if dim == 2 {
        vec![p2_fan(), p1xp1_fan(), f1_fan()]
    } else {
        vec![p3_fan(), p2xp1_fan(), p1_cubed_fan()]
    };
    let mut f = seeds[rng.gen_range(0..seeds.len())].clone();
    let target = rng.gen_range(0..=3usize);
    let mut attempts = 0;
    while f.n_rays() - f.rank < max_rank && f.n_rays() - f.rank < target + 1 && attempts < 20 {
        attempts += 1;
        let c = f.cones[rng.gen_range(0..f.cones.len())].clone();
        let k = rng.gen_range(2..=c.len());
        let mut picked = c.clone();
        for i in (1..picked.len()).rev() {
            picked.swap(i, rng.gen_range(0..=i));
        }
        picked.truncate(k);
        let mut v = vec![0i64; f.rank];
        for &r in &picked {
            let w = if rng.gen_bool(0.75) { 1 } else { 2 };
            for (x, y) in v.iter_mut().zip(&f.rays[r]) {
                *x += w * y;
            }
        }
        let v = lattice::primitive(&v);
        if v.iter().any(|x| x.abs() > 6) {
            continue;
        }
        if let Ok((g, _)) = star_subdivision(&f, &v) {
            f = g;
        }
    }
    f
}

/// A boundary with coefficients in `[0, 1)` whose denominators divide `max_den`.
pub fn random_boundary(rng: &mut ChaCha8Rng, n: usize, max_den: i64) -> TDivisor {
    TDivisor::new(
        (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Rat::from_integer(0.into())
                } else {
                    let d = rng.gen_range(2..=max_den.max(2));
                    Rat::new(rng.gen_range(0..d).into(), d.into())
                }
            })
            .collect(),
    )
}

/// A random rational class vector with small numerators and denominators.
pub fn random_qvec(rng: &mut ChaCha8Rng, n: usize) -> QVec {
    QVec((0..n).map(|_| Rat::new(rng.gen_range(-6..=6i64).into(), rng.gen_range(1..=4i64).into())).collect())
}

/// Seeded generator of klt `Q`-factorial projective pairs over a point.
pub fn random_pair(seed: u64, max_rank: usize, max_den: i64) -> Pair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_fan(&mut rng, max_rank);
    let d = random_boundary(&mut rng, f.n_rays(), max_den);
    Pair::new(f, d).expect("generated boundary is effective")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
