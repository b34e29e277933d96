//! Dense two-phase simplex for the small LPs this crate solves.
//!
//! Problems are given in standard form: minimize `c . x` subject to
//! `A x = b`, `x >= 0`. Bland's rule picks both the entering and the
//! leaving variable, which prevents cycling and makes every solve
//! deterministic. Problem sizes stay around a few dozen variables, so a
//! plain tableau beats anything sparse or factorized.

use crate::error::Error;

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-9;
const RATIO_TIE_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 20_000;

/// minimize `objective . x` subject to `rows x = rhs`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub num_vars: usize,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub objective: Vec<f64>,
}

impl StandardLp {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
            objective: vec![0.0; num_vars],
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<f64>, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    obj: f64,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.at(row, col);
        let inv = 1.0 / piv;
        for j in 0..self.cols {
            self.a[row * self.cols + j] *= inv;
        }
        self.b[row] *= inv;
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let factor = self.at(i, col);
            if factor == 0.0 {
                continue;
            }
            for j in 0..self.cols {
                self.a[i * self.cols + j] -= factor * self.a[row * self.cols + j];
            }
            self.b[i] -= factor * self.b[row];
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for j in 0..self.cols {
                self.cost[j] -= factor * self.a[row * self.cols + j];
            }
            // `obj` tracks the objective value itself, so it moves by
            // the (negative) reduced cost times the entering step.
            self.obj += factor * self.b[row];
        }
        self.basis[row] = col;
    }

    /// Bland iteration over columns `0..limit` until optimal.
    fn run(&mut self, limit: usize) -> Result<bool, Error> {
        for _ in 0..MAX_ITERATIONS {
            let entering = (0..limit).find(|&j| self.cost[j] < -REDUCED_COST_TOL);
            let entering = match entering {
                Some(j) => j,
                None => return Ok(true),
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aij = self.at(i, entering);
                if aij <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.b[i] / aij;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best_i, best_ratio)) => {
                        if ratio < best_ratio - RATIO_TIE_TOL
                            || (ratio <= best_ratio + RATIO_TIE_TOL
                                && self.basis[i] < self.basis[best_i])
                        {
                            Some((i, ratio))
                        } else {
                            Some((best_i, best_ratio))
                        }
                    }
                };
            }
            let (row, _) = match leaving {
                Some(x) => x,
                None => return Ok(false), // unbounded
            };
            self.pivot(row, entering);
        }
        Err(Error::NumericalFailure(format!(
            "simplex exceeded {MAX_ITERATIONS} iterations"
        )))
    }
}

/// Solves the LP. `Err` only on iteration-cap blowups, which Bland's
/// rule makes unreachable for well-posed inputs.
pub fn solve(lp: &StandardLp) -> Result<LpOutcome, Error> {
    let m = lp.rows.len();
    let n = lp.num_vars;
    let cols = n + m;
    let mut t = Tableau {
        m,
        cols,
        a: vec![0.0; m * cols],
        b: vec![0.0; m],
        cost: vec![0.0; cols],
        obj: 0.0,
        basis: (0..m).map(|i| n + i).collect(),
    };

    for i in 0..m {
        let flip = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t.a[i * cols + j] = flip * lp.rows[i][j];
        }
        t.a[i * cols + n + i] = 1.0;
        t.b[i] = flip * lp.rhs[i];
    }

    // Phase 1: minimize the sum of artificials, priced out for the
    // all-artificial starting basis.
    for j in 0..n {
        t.cost[j] = -(0..m).map(|i| t.at(i, j)).sum::<f64>();
    }
    t.obj = t.b.iter().sum();
    let rhs_scale = t.b.iter().fold(0.0f64, |a, &b| a.max(b));
    if !t.run(n)? {
        return Err(Error::NumericalFailure(
            "phase-1 objective unbounded below".into(),
        ));
    }

    if t.obj > REDUCED_COST_TOL * (1.0 + rhs_scale) {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive remaining artificials out of the basis; rows that cannot be
    // pivoted are redundant and get dropped.
    let mut dead_rows = Vec::new();
    for i in 0..m {
        if t.basis[i] < n {
            continue;
        }
        match (0..n).find(|&j| t.at(i, j).abs() > 1e-9) {
            Some(j) => t.pivot(i, j),
            None => dead_rows.push(i),
        }
    }
    if !dead_rows.is_empty() {
        let mut a = Vec::with_capacity((m - dead_rows.len()) * cols);
        let mut b = Vec::new();
        let mut basis = Vec::new();
        for i in 0..m {
            if dead_rows.contains(&i) {
                continue;
            }
            a.extend_from_slice(&t.a[i * cols..(i + 1) * cols]);
            b.push(t.b[i]);
            basis.push(t.basis[i]);
        }
        t.m = basis.len();
        t.a = a;
        t.b = b;
        t.basis = basis;
    }

    // Phase 2: price the real objective out against the current basis.
    for j in 0..cols {
        t.cost[j] = if j < n { lp.objective[j] } else { 0.0 };
    }
    t.obj = 0.0;
    for i in 0..t.m {
        let cb = if t.basis[i] < n {
            lp.objective[t.basis[i]]
        } else {
            0.0
        };
        if cb == 0.0 {
            continue;
        }
        for j in 0..cols {
            t.cost[j] -= cb * t.a[i * cols + j];
        }
        t.obj += cb * t.b[i];
    }
    if !t.run(n)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for i in 0..t.m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.b[i].max(0.0);
        }
    }
    Ok(LpOutcome::Optimal {
        x,
        objective: t.obj,
    })
}

/// Phase-1 feasibility for `rows x = rhs`, `x >= 0`. Returns a feasible
/// point or `None`.
pub fn find_feasible(
    num_vars: usize,
    rows: &[Vec<f64>],
    rhs: &[f64],
) -> Result<Option<Vec<f64>>, Error> {
    let lp = StandardLp {
        num_vars,
        rows: rows.to_vec(),
        rhs: rhs.to_vec(),
        objective: vec![0.0; num_vars],
    };
    match solve(&lp)? {
        LpOutcome::Optimal { x, .. } => Ok(Some(x)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::NumericalFailure(
            "zero objective reported unbounded".into(),
        )),
    }
}
