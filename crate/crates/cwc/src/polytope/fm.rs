//! Fourier-Motzkin variable elimination over float inequality systems.
//!
//! Eliminating a variable pairs every lower bound with every upper
//! bound, exactly the bound-matching that turns the corner-force system
//! into the closed-form cone. Raw pairing grows multiplicatively, so
//! elimination interleaves cheap syntactic pruning (tautologies,
//! positive-scaling duplicates) with LP-based redundancy removal once a
//! system outgrows a threshold. Equality pairs are recognized and used
//! as substitutions, which keeps the hard growth on the genuinely
//! inequality-bound variables.
//!
//! The exact-rational twin of this module lives in
//! [`super::exact`]; floats are the default because intermediate
//! rationals swell, while the exact mode makes end-to-end comparisons
//! against the closed form decidable by equality.

use std::collections::HashMap;

use crate::error::Error;

use super::{InequalitySystem, LinearInequality};

const COEFF_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct FmOptions {
    /// Hard cap on intermediate row counts; exceeding it aborts with
    /// [`Error::ExpressionSwell`].
    pub row_cap: usize,
    /// Run LP redundancy removal when an elimination step leaves more
    /// rows than this. `None` disables pruning.
    pub prune_threshold: Option<usize>,
}

impl Default for FmOptions {
    fn default() -> Self {
        Self {
            row_cap: 16_384,
            prune_threshold: Some(64),
        }
    }
}

fn scale_of(row: &LinearInequality) -> f64 {
    row.coeffs
        .iter()
        .fold(row.rhs.abs(), |acc, c| acc.max(c.abs()))
}

/// Divides by the largest magnitude and snaps near-zero entries, so
/// duplicate detection sees positively-scaled rows as equal.
fn normalized(mut row: LinearInequality) -> Option<LinearInequality> {
    let scale = scale_of(&row);
    if scale == 0.0 {
        return None; // 0 <= 0, a tautology
    }
    for c in row.coeffs.iter_mut() {
        *c /= scale;
        if c.abs() < COEFF_TOL {
            *c = 0.0;
        }
    }
    row.rhs /= scale;
    if row.rhs.abs() < COEFF_TOL {
        row.rhs = 0.0;
    }
    if row.coeffs.iter().all(|c| *c == 0.0) && row.rhs >= 0.0 {
        return None; // 0 <= nonnegative
    }
    Some(row)
}

fn key_of(row: &LinearInequality) -> Vec<i64> {
    super::round_key(row.coeffs.iter().copied().chain(std::iter::once(row.rhs)))
}

fn negated_key(row: &LinearInequality) -> Vec<i64> {
    super::round_key(
        row.coeffs
            .iter()
            .map(|c| -c)
            .chain(std::iter::once(-row.rhs)),
    )
}

/// Conic combination cancelling `var`: `lower * upper[var] + upper *
/// (-lower[var])` with `lower[var] < 0 < upper[var]`.
fn combine(lower: &LinearInequality, upper: &LinearInequality, var: usize) -> LinearInequality {
    let a = upper.coeffs[var];
    let b = -lower.coeffs[var];
    let mut coeffs: Vec<f64> = lower
        .coeffs
        .iter()
        .zip(&upper.coeffs)
        .map(|(l, u)| l * a + u * b)
        .collect();
    coeffs[var] = 0.0;
    LinearInequality {
        coeffs,
        rhs: lower.rhs * a + upper.rhs * b,
    }
}

fn push_unique(
    out: &mut Vec<LinearInequality>,
    seen: &mut HashMap<Vec<i64>, ()>,
    row: LinearInequality,
) {
    if let Some(row) = normalized(row) {
        let key = key_of(&row);
        if seen.insert(key, ()).is_none() {
            out.push(row);
        }
    }
}

/// Eliminates one variable from the system.
pub fn eliminate(
    sys: &InequalitySystem,
    var: usize,
    opts: &FmOptions,
) -> Result<InequalitySystem, Error> {
    if var >= sys.dim() {
        return Err(Error::NumericalFailure(format!(
            "variable {var} out of range for dimension {}",
            sys.dim()
        )));
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut neutral = Vec::new();
    for row in sys.rows() {
        let c = row.coeffs[var];
        if c > COEFF_TOL {
            upper.push(row.clone());
        } else if c < -COEFF_TOL {
            lower.push(row.clone());
        } else {
            neutral.push(row.clone());
        }
    }

    // An equality pair on `var` lets the variable be substituted away:
    // pairing the two halves of the equality against the other bounds
    // is complete, and cross-pairings of non-equality rows are implied.
    let substitution = find_equality_pair(&lower, &upper, var);

    let mut out = Vec::with_capacity(neutral.len() + lower.len().max(1) * upper.len().max(1));
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    for row in neutral {
        push_unique(&mut out, &mut seen, row);
    }

    match substitution {
        Some((li, ui)) => {
            for (i, u) in upper.iter().enumerate() {
                if i != ui {
                    push_unique(&mut out, &mut seen, combine(&lower[li], u, var));
                }
            }
            for (i, l) in lower.iter().enumerate() {
                if i != li {
                    push_unique(&mut out, &mut seen, combine(l, &upper[ui], var));
                }
            }
        }
        None => {
            for l in &lower {
                for u in &upper {
                    push_unique(&mut out, &mut seen, combine(l, u, var));
                    if out.len() > opts.row_cap {
                        return Err(Error::ExpressionSwell {
                            rows: out.len(),
                            cap: opts.row_cap,
                        });
                    }
                }
            }
        }
    }

    let mut result = InequalitySystem::new(sys.dim());
    for row in out {
        result.push(row.coeffs, row.rhs)?;
    }
    Ok(result)
}

/// Looks for rows `e` and `-e` with a nonzero coefficient on `var`.
fn find_equality_pair(
    lower: &[LinearInequality],
    upper: &[LinearInequality],
    var: usize,
) -> Option<(usize, usize)> {
    let upper_keys: HashMap<Vec<i64>, usize> = upper
        .iter()
        .enumerate()
        .map(|(i, r)| (key_of(r), i))
        .collect();
    for (li, l) in lower.iter().enumerate() {
        if let Some(&ui) = upper_keys.get(&negated_key(l)) {
            // confirm the match tightly before skipping cross-pairings
            let u = &upper[ui];
            let close = l
                .coeffs
                .iter()
                .zip(&u.coeffs)
                .all(|(a, b)| (a + b).abs() <= 1e-9)
                && (l.rhs + u.rhs).abs() <= 1e-9;
            if close && l.coeffs[var].abs() > COEFF_TOL {
                return Some((li, ui));
            }
        }
    }
    None
}

/// Eliminates a set of variables, choosing the cheapest variable first
/// (substitutions, then smallest pairing growth) and pruning redundant
/// rows between steps.
pub fn eliminate_many(
    sys: &InequalitySystem,
    vars: &[usize],
    opts: &FmOptions,
) -> Result<InequalitySystem, Error> {
    let mut remaining: Vec<usize> = vars.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut current = sys.clone();

    while !remaining.is_empty() {
        let mut best: Option<(i64, usize)> = None;
        for &v in &remaining {
            let mut lower = Vec::new();
            let mut upper = Vec::new();
            for row in current.rows() {
                let c = row.coeffs[v];
                if c > COEFF_TOL {
                    upper.push(row.clone());
                } else if c < -COEFF_TOL {
                    lower.push(row.clone());
                }
            }
            let cost = if find_equality_pair(&lower, &upper, v).is_some() {
                (lower.len() + upper.len()) as i64 - 2
            } else {
                (lower.len() * upper.len()) as i64 - (lower.len() + upper.len()) as i64
            };
            if best.map_or(true, |(c, _)| cost < c) {
                best = Some((cost, v));
            }
        }
        let (_, var) = best.expect("remaining is nonempty");

        current = eliminate(&current, var, opts)?;
        remaining.retain(|&v| v != var);

        if let Some(threshold) = opts.prune_threshold {
            if current.len() > threshold {
                current = super::remove_redundant(&current)?;
            }
        }
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(dim: usize, rows: &[(&[f64], f64)]) -> InequalitySystem {
        let mut s = InequalitySystem::new(dim);
        for (coeffs, rhs) in rows {
            s.push(coeffs.to_vec(), *rhs).unwrap();
        }
        s
    }

    #[test]
    fn eliminates_bounded_variable() {
        // {x <= 1, x >= -1, x >= y} eliminating x -> {-1 <= 1 (dropped), y <= 1}
        let s = sys(
            2,
            &[
                (&[1.0, 0.0], 1.0),
                (&[-1.0, 0.0], 1.0),
                (&[-1.0, 1.0], 0.0),
            ],
        );
        let out = eliminate(&s, 0, &FmOptions::default()).unwrap();
        assert_eq!(out.len(), 1);
        let row = &out.rows()[0];
        // y <= 1, normalized
        assert!((row.coeffs[1] / row.rhs - 1.0).abs() < 1e-12);
        assert_eq!(row.coeffs[0], 0.0);
    }

    #[test]
    fn tautologies_are_dropped() {
        let s = sys(2, &[(&[1.0, 0.0], 1.0), (&[-1.0, 0.0], 1.0)]);
        let out = eliminate(&s, 0, &FmOptions::default()).unwrap();
        assert!(out.is_empty()); // -1 <= 1 carries no information
    }

    #[test]
    fn equality_pair_substitutes() {
        // x = y (pair) and x <= 3 gives y <= 3 without cross products
        let s = sys(
            2,
            &[
                (&[1.0, -1.0], 0.0),
                (&[-1.0, 1.0], 0.0),
                (&[1.0, 0.0], 3.0),
                (&[-1.0, 0.0], 0.0),
            ],
        );
        let out = eliminate(&s, 0, &FmOptions::default()).unwrap();
        assert_eq!(out.len(), 2);
        for row in out.rows() {
            assert_eq!(row.coeffs[0], 0.0);
        }
        assert!(out.satisfied_by(&[0.0, 2.0], 1e-12));
        assert!(!out.satisfied_by(&[0.0, 4.0], 1e-9));
        assert!(!out.satisfied_by(&[0.0, -1.0], 1e-9));
    }

    #[test]
    fn row_cap_reports_swell() {
        // distinct slopes so the pairings stay distinct after dedup
        let mut s = InequalitySystem::new(3);
        for i in 0..20 {
            let a = 1.0 + i as f64;
            s.push(vec![a, a * a, 1.0], 1.0).unwrap();
            s.push(vec![-a, 1.0, a * a * a], 1.0).unwrap();
        }
        let opts = FmOptions {
            row_cap: 10,
            prune_threshold: None,
        };
        match eliminate(&s, 0, &opts) {
            Err(Error::ExpressionSwell { rows, cap }) => {
                assert!(rows > cap);
            }
            other => panic!("expected swell, got {other:?}"),
        }
    }

    #[test]
    fn projection_preserves_feasible_points() {
        // simplex x + y + z <= 1, coords >= 0; eliminate z
        let s = sys(
            3,
            &[
                (&[1.0, 1.0, 1.0], 1.0),
                (&[-1.0, 0.0, 0.0], 0.0),
                (&[0.0, -1.0, 0.0], 0.0),
                (&[0.0, 0.0, -1.0], 0.0),
            ],
        );
        let out = eliminate_many(&s, &[2], &FmOptions::default()).unwrap();
        assert!(out.satisfied_by(&[0.2, 0.3, 0.0], 1e-12));
        assert!(out.satisfied_by(&[0.0, 1.0, 0.0], 1e-12));
        assert!(!out.satisfied_by(&[0.6, 0.6, 0.0], 1e-9));
        assert!(!out.satisfied_by(&[-0.1, 0.0, 0.0], 1e-9));
    }
}
