//! First-principles polytope oracle for the wrench cone.
//!
//! Nothing in this module trusts the closed-form rows: the cone is
//! rebuilt as the image of the four corner friction pyramids under the
//! wrench map, membership is decided by LP feasibility over the ray
//! form, and the face form is recovered by Fourier-Motzkin projection.
//! The cross-validation suites compare all of it against
//! [`crate::cone`].

pub mod exact;
pub mod fm;
pub mod simplex;

use nalgebra::{SVector, Vector3, Vector6};

use crate::contact::{wrench_map_matrix, ContactPatch, Wrench};
use crate::error::Error;

/// Rays below this chord distance are treated as duplicates
/// (approximately the angular separation in radians for unit rays).
pub const RAY_DEDUP_TOLERANCE: f64 = 1e-10;

/// A polyhedral cone as nonnegative combinations of unit rays.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanForm {
    rays: Vec<Vector6<f64>>,
}

impl SpanForm {
    /// Normalizes the rays to unit length and drops duplicates within
    /// [`RAY_DEDUP_TOLERANCE`]. Zero rays are ignored.
    pub fn from_rays(rays: impl IntoIterator<Item = Vector6<f64>>) -> Self {
        let mut unit: Vec<Vector6<f64>> = Vec::new();
        for r in rays {
            let n = r.norm();
            if n == 0.0 {
                continue;
            }
            let u = r / n;
            if !unit.iter().any(|v| (v - u).norm() <= RAY_DEDUP_TOLERANCE) {
                unit.push(u);
            }
        }
        Self { rays: unit }
    }

    pub fn rays(&self) -> &[Vector6<f64>] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }
}

/// Extreme rays of the linearized Coulomb cone `|f^x|, |f^y| <= mu f^z`,
/// `f^z >= 0`, as unit vectors. Four rays `(+-mu, +-mu, 1)` for
/// `mu > 0`, the single ray `(0, 0, 1)` for `mu = 0`.
pub fn friction_pyramid_generators(mu: f64) -> Vec<Vector3<f64>> {
    if mu == 0.0 {
        return vec![Vector3::z()];
    }
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|(sx, sy)| Vector3::new(sx * mu, sy * mu, 1.0).normalize())
        .collect()
}

/// The wrench cone in span form: every pyramid generator placed at every
/// corner and pushed through the wrench map. 16 rays for `mu > 0`.
pub fn cwc_span(patch: &ContactPatch) -> SpanForm {
    let g = wrench_map_matrix(patch);
    let mut rays = Vec::new();
    for corner in 0..4 {
        for gen in friction_pyramid_generators(patch.mu()) {
            let mut stacked = SVector::<f64, 12>::zeros();
            stacked.fixed_rows_mut::<3>(3 * corner).copy_from(&gen);
            rays.push(g * stacked);
        }
    }
    SpanForm::from_rays(rays)
}

/// Decides `w in cone(span)` by a phase-1 simplex solve of
/// `R lambda = w, lambda >= 0`. The wrench is scaled to unit norm first;
/// the zero wrench is the apex and always a member.
pub fn membership_lp(span: &SpanForm, w: &Wrench) -> Result<bool, Error> {
    let v = w.as_vector();
    let norm = v.norm();
    if norm == 0.0 {
        return Ok(true);
    }
    let scaled = v / norm;
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|i| span.rays.iter().map(|r| r[i]).collect())
        .collect();
    let rhs: Vec<f64> = scaled.iter().copied().collect();
    Ok(simplex::find_feasible(span.rays.len(), &rows, &rhs)?.is_some())
}

/// One linear inequality `coeffs . x <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl LinearInequality {
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(point)
            .map(|(c, x)| c * x)
            .sum::<f64>()
            - self.rhs
    }
}

/// A finite system of linear inequalities over a fixed dimension.
/// Homogeneous systems (`rhs = 0`) describe cones.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalitySystem {
    dim: usize,
    rows: Vec<LinearInequality>,
}

impl InequalitySystem {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
        }
    }

    /// Appends a row; rejects NaN entries and dimension mismatches.
    pub fn push(&mut self, coeffs: Vec<f64>, rhs: f64) -> Result<(), Error> {
        if coeffs.len() != self.dim {
            return Err(Error::NumericalFailure(format!(
                "row has {} coefficients, system dimension is {}",
                coeffs.len(),
                self.dim
            )));
        }
        if coeffs.iter().any(|c| c.is_nan()) || rhs.is_nan() {
            return Err(Error::NumericalFailure("NaN in inequality row".into()));
        }
        self.rows.push(LinearInequality { coeffs, rhs });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[LinearInequality] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn satisfied_by(&self, point: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| r.evaluate(point) <= tol)
    }
}

pub(crate) fn round_key(values: impl Iterator<Item = f64>) -> Vec<i64> {
    values.map(|c| (c * 1e9).round() as i64).collect()
}

fn lex_order(rows: &[LinearInequality]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| {
        round_key(
            rows[i]
                .coeffs
                .iter()
                .copied()
                .chain(std::iter::once(rows[i].rhs)),
        )
    });
    order
}

/// [`remove_redundant`] with default box half-width.
pub fn remove_redundant(sys: &InequalitySystem) -> Result<InequalitySystem, Error> {
    let b_scale = sys
        .rows
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.rhs.abs()));
    remove_redundant_with(sys, (2.0 * b_scale).max(1.0))
}

/// Drops every row implied by the remaining ones.
///
/// A row is redundant when maximizing its left-hand side subject to the
/// other kept rows, intersected with the box `|x_i| <= box_halfwidth`,
/// stays at or below its right-hand side. The box bounds the otherwise
/// unbounded cone LPs; homogeneous systems are scale-invariant, so any
/// full-dimensional box decides redundancy correctly. Rows are processed
/// and returned in lexicographic order of rounded coefficients, which
/// makes the output deterministic.
pub fn remove_redundant_with(
    sys: &InequalitySystem,
    box_halfwidth: f64,
) -> Result<InequalitySystem, Error> {
    let order = lex_order(&sys.rows);
    let mut kept = vec![true; sys.rows.len()];

    for &k in &order {
        let others: Vec<usize> = (0..sys.rows.len())
            .filter(|&j| j != k && kept[j])
            .collect();
        let max = maximize_over(sys, &others, &sys.rows[k].coeffs, box_halfwidth)?;
        let tol = 1e-9 * (1.0 + sys.rows[k].rhs.abs());
        if max <= sys.rows[k].rhs + tol {
            kept[k] = false;
        }
    }

    let mut out = InequalitySystem::new(sys.dim);
    for &k in &order {
        if kept[k] {
            out.rows.push(sys.rows[k].clone());
        }
    }
    Ok(out)
}

/// Maximizes `objective . x` over the selected rows plus the box; the
/// LP is solved in standard form with `x = u - v` split variables.
/// Returns negative infinity when the constraints are infeasible.
fn maximize_over(
    sys: &InequalitySystem,
    row_indices: &[usize],
    objective: &[f64],
    box_halfwidth: f64,
) -> Result<f64, Error> {
    let dim = sys.dim;
    let m = row_indices.len() + 2 * dim;
    let num_vars = 2 * dim + m; // u, v, one slack per inequality
    let mut lp = simplex::StandardLp::new(num_vars);

    let mut slack = 2 * dim;
    let mut push_le = |lp: &mut simplex::StandardLp, coeffs: &[f64], rhs: f64| {
        let mut row = vec![0.0; num_vars];
        for (i, c) in coeffs.iter().enumerate() {
            row[i] = *c;
            row[dim + i] = -c;
        }
        row[slack] = 1.0;
        slack += 1;
        lp.push_row(row, rhs);
    };

    for &j in row_indices {
        push_le(&mut lp, &sys.rows[j].coeffs, sys.rows[j].rhs);
    }
    for i in 0..dim {
        let mut unit = vec![0.0; dim];
        unit[i] = 1.0;
        push_le(&mut lp, &unit, box_halfwidth);
        unit[i] = -1.0;
        push_le(&mut lp, &unit, box_halfwidth);
    }

    for (i, c) in objective.iter().enumerate() {
        lp.objective[i] = -c;
        lp.objective[dim + i] = *c;
    }

    match simplex::solve(&lp)? {
        simplex::LpOutcome::Optimal { objective, .. } => Ok(-objective),
        simplex::LpOutcome::Infeasible => Ok(f64::NEG_INFINITY),
        simplex::LpOutcome::Unbounded => Err(Error::NumericalFailure(
            "boxed LP reported unbounded".into(),
        )),
    }
}

/// Converts a span form to a halfspace description by Fourier-Motzkin
/// elimination of the multipliers in `{R lambda = w, lambda >= 0}`.
///
/// The output is redundancy-free, L2-normalized, homogeneous, and
/// sorted; every input ray satisfies every row to 1e-9.
pub fn span_to_face(span: &SpanForm) -> Result<InequalitySystem, Error> {
    if span.is_empty() {
        return Err(Error::NumericalFailure(
            "span form has no rays to project".into(),
        ));
    }
    let n = span.len();
    let total = n + 6;

    let mut sys = InequalitySystem::new(total);
    for i in 0..6 {
        let mut eq = vec![0.0; total];
        for (j, r) in span.rays.iter().enumerate() {
            eq[j] = r[i];
        }
        eq[n + i] = -1.0;
        sys.push(eq.clone(), 0.0)?;
        sys.push(eq.iter().map(|c| -c).collect(), 0.0)?;
    }
    for j in 0..n {
        let mut row = vec![0.0; total];
        row[j] = -1.0;
        sys.push(row, 0.0)?;
    }

    let opts = fm::FmOptions::default();
    let vars: Vec<usize> = (0..n).collect();
    let eliminated = fm::eliminate_many(&sys, &vars, &opts)?;

    let mut projected = InequalitySystem::new(6);
    for row in eliminated.rows() {
        if row.coeffs[..n].iter().any(|c| c.abs() > 1e-9) {
            return Err(Error::NumericalFailure(
                "eliminated multiplier survives in projected row".into(),
            ));
        }
        if row.rhs.abs() > 1e-9 {
            return Err(Error::NumericalFailure(
                "projection of a homogeneous system produced an inhomogeneous row".into(),
            ));
        }
        let mut coeffs: Vec<f64> = row.coeffs[n..].to_vec();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            continue;
        }
        for c in coeffs.iter_mut() {
            *c /= norm;
        }
        projected.push(coeffs, 0.0)?;
    }

    let reduced = remove_redundant(&projected)?;

    // sanity: every ray satisfies every face row
    for row in reduced.rows() {
        for ray in span.rays() {
            let val: f64 = row.coeffs.iter().zip(ray.iter()).map(|(c, r)| c * r).sum();
            if val > 1e-9 {
                return Err(Error::NumericalFailure(format!(
                    "projected row violated by an input ray (residual {val:.3e})"
                )));
            }
        }
    }
    Ok(reduced)
}
