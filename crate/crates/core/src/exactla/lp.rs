//! Exact two-phase simplex with Bland's rule.
//!
//! Problems are stated over free variables with constraints `<a, x> >= b` and `<a, x> = b`;
//! internally each free variable is split as `x+ - x-` and every inequality gets a slack.

use num::{One, Signed, Zero};

use super::polyhedron::Polyhedron;
use super::qvec::QVec;
use super::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, witness: QVec },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&QVec> {
        match self {
            LpOutcome::Optimal { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

pub fn lp_optimize(objective: &QVec, p: &Polyhedron, sense: Sense) -> LpOutcome {
    solve_general(objective, &p.ineqs, &p.eqs, p.dim, sense)
}

/// Optimizes over `{x : <a,x> >= b for (a,b) in ineqs, <a,x> = b for (a,b) in eqs}`.
pub fn solve_general(
    objective: &QVec,
    ineqs: &[(QVec, Rat)],
    eqs: &[(QVec, Rat)],
    n: usize,
    sense: Sense,
) -> LpOutcome {
    debug_assert_eq!(objective.dim(), n);
    let m = ineqs.len() + eqs.len();
    // Columns: x+ (n), x- (n), slacks (ineqs.len()).
    let ncols = 2 * n + ineqs.len();
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for (k, (a, b)) in ineqs.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols];
        for j in 0..n {
            row[j] = a[j].clone();
            row[n + j] = -a[j].clone();
        }
        row[2 * n + k] = -Rat::one();
        rows.push(row);
        rhs.push(b.clone());
    }
    for (a, b) in eqs {
        let mut row = vec![Rat::zero(); ncols];
        for j in 0..n {
            row[j] = a[j].clone();
            row[n + j] = -a[j].clone();
        }
        rows.push(row);
        rhs.push(b.clone());
    }
    let mut cost = vec![Rat::zero(); ncols];
    for j in 0..n {
        let c = match sense {
            Sense::Min => objective[j].clone(),
            Sense::Max => -objective[j].clone(),
        };
        cost[n + j] = -c.clone();
        cost[j] = c;
    }
    match standard_form_min(&rows, &rhs, &cost) {
        StdOutcome::Infeasible => LpOutcome::Infeasible,
        StdOutcome::Unbounded => LpOutcome::Unbounded,
        StdOutcome::Optimal(y) => {
            let witness = QVec((0..n).map(|j| &y[j] - &y[n + j]).collect());
            let value = objective.dot(&witness);
            LpOutcome::Optimal { value, witness }
        }
    }
}

enum StdOutcome {
    Optimal(Vec<Rat>),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    reduced: Vec<Rat>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[i][j] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.reduced[c].is_zero() {
            let f = self.reduced[c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.reduced[j] -= d;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on the columns `< limit`. Returns false on unboundedness.
    fn optimize(&mut self, limit: usize) -> bool {
        loop {
            let Some(c) = (0..limit).find(|&j| self.reduced[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(Rat, usize, usize)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &best {
                        None => true,
                        Some((br, _, bb)) => ratio < *br || (ratio == *br && self.basis[i] < *bb),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

/// Minimizes `cost . y` subject to `rows y = rhs`, `y >= 0`.
fn standard_form_min(rows: &[Vec<Rat>], rhs: &[Rat], cost: &[Rat]) -> StdOutcome {
    let m = rows.len();
    let n = cost.len();
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: (n..n + m).collect(),
        reduced: vec![Rat::zero(); n + m],
    };
    for (i, (row, b)) in rows.iter().zip(rhs).enumerate() {
        let flip = b.is_negative();
        let mut r: Vec<Rat> = row.iter().map(|x| if flip { -x } else { x.clone() }).collect();
        r.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
        t.rows.push(r);
        t.rhs.push(if flip { -b.clone() } else { b.clone() });
    }
    for j in 0..n {
        let s = t.rows.iter().fold(Rat::zero(), |acc, r| acc + &r[j]);
        t.reduced[j] = -s;
    }
    t.optimize(n + m);
    let infeas: Rat = (0..m)
        .filter(|&i| t.basis[i] >= n)
        .fold(Rat::zero(), |acc, i| acc + &t.rhs[i]);
    if infeas.is_positive() {
        return StdOutcome::Infeasible;
    }
    // Drive artificial variables out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            if let Some(c) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, c);
                i += 1;
            } else {
                t.rows.remove(i);
                t.rhs.remove(i);
                t.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    for r in t.rows.iter_mut() {
        r.truncate(n);
    }
    let mut reduced = cost.to_vec();
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = &cost[b];
        if cb.is_zero() {
            continue;
        }
        for (r, x) in reduced.iter_mut().zip(&t.rows[i][..n]) {
            if !x.is_zero() {
                *r -= cb * x;
            }
        }
    }
    t.reduced = reduced;
    if !t.optimize(n) {
        return StdOutcome::Unbounded;
    }
    let mut y = vec![Rat::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        y[b] = t.rhs[i].clone();
    }
    StdOutcome::Optimal(y)
}

/// Feasibility of a system of constraints, returning a witness point.
pub fn feasible_point(ineqs: &[(QVec, Rat)], eqs: &[(QVec, Rat)], n: usize) -> Option<QVec> {
    match solve_general(&QVec::zeros(n), ineqs, eqs, n, Sense::Min) {
        LpOutcome::Optimal { witness, .. } => Some(witness),
        _ => None,
    }
}
