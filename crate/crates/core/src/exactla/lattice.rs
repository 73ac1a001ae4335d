//! Integer lattice helpers: kernels, saturation, primitive vectors and indices.

use num::{Integer, Signed, ToPrimitive, Zero};

use super::linalg;
use super::qvec::QVec;
use super::rat::Rat;

pub type IVec = Vec<i64>;

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn is_primitive(v: &[i64]) -> bool {
    gcd_all(v) == 1
}

pub fn primitive(v: &[i64]) -> IVec {
    let g = gcd_all(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

pub fn to_qvec(v: &[i64]) -> QVec {
    QVec::from_ints(v)
}

/// Converts a rational vector on a ray to its primitive integer generator.
pub fn primitive_of(v: &QVec) -> IVec {
    v.primitive_integer()
        .into_iter()
        .map(|x| x.to_i64().expect("lattice vector fits in i64"))
        .collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lattice basis of `{x in Z^n : A x = 0}` for an integer matrix given by rows.
/// The result spans a saturated sublattice.
pub fn integer_kernel(rows: &[IVec], n: usize) -> Vec<IVec> {
    let m = rows.len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // u holds the accumulated unimodular column operations, stored column-major.
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|j| (0..n).map(|i| i128::from(i == j)).collect())
        .collect();
    let mut pivot = 0usize;
    for i in 0..m {
        if pivot == n {
            break;
        }
        loop {
            let nz: Vec<usize> = (pivot..n).filter(|&j| a[i][j] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let jmin = *nz.iter().min_by_key(|&&j| a[i][j].abs()).unwrap();
            swap_cols(&mut a, &mut u, pivot, jmin);
            let mut done = true;
            for j in (pivot + 1)..n {
                if a[i][j] != 0 {
                    let q = Integer::div_floor(&a[i][j], &a[i][pivot]);
                    for r in a.iter_mut() {
                        r[j] -= q * r[pivot];
                    }
                    let (src, dst) = (u[pivot].clone(), &mut u[j]);
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d -= q * s;
                    }
                    if a[i][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[i][pivot] != 0 {
            pivot += 1;
        }
    }
    (pivot..n)
        .map(|j| u[j].iter().map(|&x| i64::try_from(x).expect("kernel entry fits in i64")).collect())
        .collect()
}

fn swap_cols(a: &mut [Vec<i128>], u: &mut [Vec<i128>], j1: usize, j2: usize) {
    if j1 == j2 {
        return;
    }
    for r in a.iter_mut() {
        r.swap(j1, j2);
    }
    u.swap(j1, j2);
}

/// Basis of the saturation `span(vs) ∩ Z^n`.
pub fn saturated_basis(vs: &[IVec], n: usize) -> Vec<IVec> {
    let annihilator = integer_kernel(vs, n);
    integer_kernel(&annihilator, n)
}

/// Index of the lattice generated by the (independent) vectors inside its saturation.
pub fn multiplicity(vs: &[IVec], n: usize) -> i64 {
    if vs.is_empty() {
        return 1;
    }
    let sat = saturated_basis(vs, n);
    let sat_q: Vec<QVec> = sat.iter().map(|v| to_qvec(v)).collect();
    let coords: Vec<QVec> = vs
        .iter()
        .map(|v| linalg::coordinates(&sat_q, &to_qvec(v)).expect("vector lies in its own saturation"))
        .collect();
    let d: Rat = linalg::determinant(&coords);
    d.abs().to_integer().to_i64().expect("multiplicity fits in i64")
}

/// Whether `A x = b` has an integer solution.
pub fn has_integer_solution(rows: &[IVec], rhs: &[i64], n: usize) -> bool {
    let aq: Vec<QVec> = rows.iter().map(|r| to_qvec(r)).collect();
    let bq: Vec<Rat> = rhs.iter().map(|&x| Rat::from_integer(x.into())).collect();
    let Some(_) = linalg::solve(&aq, &bq, n) else {
        return false;
    };
    let mut ext: Vec<IVec> = rows.to_vec();
    for (r, &b) in ext.iter_mut().zip(rhs) {
        r.push(-b);
    }
    // x in Z^{n+1} with last coordinate 1 solves A x' = b; kernel lattice of [A | -b]
    // contains such a vector iff the gcd of the last coordinates of a kernel basis is 1.
    let ker = integer_kernel(&ext, n + 1);
    let g = ker.iter().fold(0i64, |g, v| g.gcd(&v[n]));
    g == 1
}

pub fn is_zero(v: &[i64]) -> bool {
    v.iter().all(Zero::is_zero)
}
