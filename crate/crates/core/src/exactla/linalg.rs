//! Dense exact linear algebra over the rationals. Matrices are row lists.

use num::{One, Signed, Zero};

use super::qvec::QVec;
use super::rat::Rat;

/// Reduced row echelon form. Returns the reduced rows (zero rows dropped) and pivot columns.
pub fn rref(rows: &[QVec], ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        m[r] = m[r].scale(&inv);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = -m[i][c].clone();
                m[i] = m[i].axpy(&f, &m[r]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec]) -> usize {
    match rows.first() {
        None => 0,
        Some(first) => rref(rows, first.dim()).1.len(),
    }
}

pub fn rank_in(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : <row, x> = 0 for every row}`.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = QVec::zeros(ncols);
            v[f] = Rat::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b`, or `None` if inconsistent. `a` is given by rows.
pub fn solve(a: &[QVec], b: &[Rat], ncols: usize) -> Option<QVec> {
    debug_assert_eq!(a.len(), b.len());
    let aug: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut v = row.0.clone();
            v.push(bi.clone());
            QVec(v)
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = QVec::zeros(ncols);
    for (row, &pc) in r.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(vs: &[QVec]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<QVec> = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        basis.push(v.clone());
        if rank(&basis) == basis.len() {
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}

pub fn transpose(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    (0..ncols)
        .map(|c| QVec(rows.iter().map(|r| r[c].clone()).collect()))
        .collect()
}

pub fn mat_vec(rows: &[QVec], x: &QVec) -> QVec {
    QVec(rows.iter().map(|r| r.dot(x)).collect())
}

pub fn determinant(rows: &[QVec]) -> Rat {
    let n = rows.len();
    let mut m: Vec<QVec> = rows.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c].clone();
        let inv = m[c][c].recip();
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let f = -(&m[i][c] * &inv);
                m[i] = m[i].axpy(&f, &m[c]);
            }
        }
    }
    det
}

pub fn inverse(rows: &[QVec]) -> Option<Vec<QVec>> {
    let n = rows.len();
    let aug: Vec<QVec> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.concat(&QVec::unit(n, i)))
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(r.iter().map(|row| QVec(row.0[n..].to_vec())).collect())
}

/// Coordinates of `v` in terms of `basis` (exact), if `v` lies in the span.
pub fn coordinates(basis: &[QVec], v: &QVec) -> Option<QVec> {
    let cols = transpose(basis, v.dim());
    solve(&cols, &v.0, basis.len())
}

pub fn in_span(basis: &[QVec], v: &QVec) -> bool {
    if basis.is_empty() {
        return v.is_zero();
    }
    coordinates(basis, v).is_some()
}

pub fn abs_det(rows: &[QVec]) -> Rat {
    determinant(rows).abs()
}
