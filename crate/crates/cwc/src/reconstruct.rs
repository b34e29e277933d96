//! Constructive directions: recover corner forces realizing a wrench,
//! and push interior force systems out to the corners.
//!
//! Reconstruction solves two LPs. The first minimizes the maximum
//! corner normal force subject to the wrench-map equalities and the
//! corner friction pyramids; the feasibility problem alone has
//! infinitely many solutions, and min-max picks a physically meaningful
//! load split. The second fixes that optimum and minimizes the L1 norm
//! of the tangential components, which removes the remaining slack in a
//! deterministic, symmetry-respecting way (a pure vertical load comes
//! back as four equal vertical forces, not as some basis-dependent
//! tangle of cancelling tangentials).

use nalgebra::{Vector2, Vector3};

use crate::contact::{ContactForceSet, ContactPatch, Wrench};
use crate::error::Error;
use crate::polytope::simplex::{solve, LpOutcome, StandardLp};

// stage-1 variable layout
const XP: usize = 0; // f_i^x positive part, 4 vars
const XN: usize = 4;
const YP: usize = 8;
const YN: usize = 12;
const Z: usize = 16;
const AUX: usize = 20; // t (stage 1/2) or delta (strict)

fn wrench_equalities(patch: &ContactPatch, w: &Wrench, num_vars: usize, lp: &mut StandardLp) {
    let (x, y) = (patch.x(), patch.y());
    let mut row = |fill: &dyn Fn(&mut Vec<f64>), rhs: f64| {
        let mut coeffs = vec![0.0; num_vars];
        fill(&mut coeffs);
        lp.push_row(coeffs, rhs);
    };

    row(
        &|c| {
            for i in 0..4 {
                c[XP + i] = 1.0;
                c[XN + i] = -1.0;
            }
        },
        w.fx(),
    );
    row(
        &|c| {
            for i in 0..4 {
                c[YP + i] = 1.0;
                c[YN + i] = -1.0;
            }
        },
        w.fy(),
    );
    row(
        &|c| {
            for i in 0..4 {
                c[Z + i] = 1.0;
            }
        },
        w.fz(),
    );
    row(
        &|c| {
            let signs = [1.0, -1.0, -1.0, 1.0];
            for i in 0..4 {
                c[Z + i] = y * signs[i];
            }
        },
        w.taux(),
    );
    row(
        &|c| {
            let signs = [-1.0, -1.0, 1.0, 1.0];
            for i in 0..4 {
                c[Z + i] = x * signs[i];
            }
        },
        w.tauy(),
    );
    row(
        &|c| {
            let sx = [-1.0, 1.0, 1.0, -1.0]; // -Y (f1x - f2x - f3x + f4x)
            let sy = [1.0, 1.0, -1.0, -1.0]; //  X (f1y + f2y - f3y - f4y)
            for i in 0..4 {
                c[XP + i] = y * sx[i];
                c[XN + i] = -y * sx[i];
                c[YP + i] = x * sy[i];
                c[YN + i] = -x * sy[i];
            }
        },
        w.tauz(),
    );
}

/// Friction rows `+-f_i^{x,y} - mu f_i^z + margin <= 0` as equalities
/// with one slack each. `margin_var` tightens every pyramid by the same
/// variable (used by the strict reconstruction); `usize::MAX` disables.
fn friction_rows(
    patch: &ContactPatch,
    num_vars: usize,
    slack_start: usize,
    margin_var: usize,
    lp: &mut StandardLp,
) {
    let mu = patch.mu();
    let mut slack = slack_start;
    for i in 0..4 {
        for (pos, neg) in [(XP + i, XN + i), (YP + i, YN + i)] {
            for dir in [1.0, -1.0] {
                let mut c = vec![0.0; num_vars];
                c[pos] = dir;
                c[neg] = -dir;
                c[Z + i] = -mu;
                if margin_var != usize::MAX {
                    c[margin_var] = 1.0;
                }
                c[slack] = 1.0;
                slack += 1;
                lp.push_row(c, 0.0);
            }
        }
    }
}

fn extract_forces(x: &[f64], scale: f64) -> ContactForceSet {
    let mut forces = [Vector3::zeros(); 4];
    for i in 0..4 {
        forces[i] = Vector3::new(
            (x[XP + i] - x[XN + i]) * scale,
            (x[YP + i] - x[YN + i]) * scale,
            x[Z + i] * scale,
        );
    }
    ContactForceSet { forces }
}

/// Recovers corner forces `f1..f4` realizing `w`, all inside the
/// linearized friction pyramids (closure semantics, `f_i^z >= 0`).
///
/// Among feasible assignments, returns the minimizer of the maximum
/// corner normal force, with tangential L1 as the tie-break. Fails with
/// [`Error::Infeasible`] exactly when the wrench lies outside the cone,
/// up to LP tolerance.
pub fn reconstruct_forces(patch: &ContactPatch, w: &Wrench) -> Result<ContactForceSet, Error> {
    let scale = w.amplitude();
    if scale == 0.0 {
        return Ok(ContactForceSet::zero());
    }
    let w_hat = w.scaled(1.0 / scale);

    // Stage 1: minimize t with z_i <= t.
    let num_vars = 21 + 16 + 4; // split forces, t, friction slacks, cap slacks
    let mut lp = StandardLp::new(num_vars);
    wrench_equalities(patch, &w_hat, num_vars, &mut lp);
    friction_rows(patch, num_vars, 21, usize::MAX, &mut lp);
    for i in 0..4 {
        let mut c = vec![0.0; num_vars];
        c[Z + i] = 1.0;
        c[AUX] = -1.0;
        c[37 + i] = 1.0;
        lp.push_row(c, 0.0);
    }
    lp.objective[AUX] = 1.0;

    let t_star = match solve(&lp)? {
        LpOutcome::Optimal { objective, .. } => objective,
        LpOutcome::Infeasible => return Err(Error::Infeasible),
        LpOutcome::Unbounded => {
            return Err(Error::NumericalFailure(
                "min-max reconstruction reported unbounded".into(),
            ))
        }
    };

    // Stage 2: cap t at the optimum, minimize tangential L1.
    let num_vars2 = num_vars + 1; // extra slack for the cap on t
    let mut lp2 = StandardLp::new(num_vars2);
    wrench_equalities(patch, &w_hat, num_vars2, &mut lp2);
    friction_rows(patch, num_vars2, 21, usize::MAX, &mut lp2);
    for i in 0..4 {
        let mut c = vec![0.0; num_vars2];
        c[Z + i] = 1.0;
        c[AUX] = -1.0;
        c[37 + i] = 1.0;
        lp2.push_row(c, 0.0);
    }
    let mut cap = vec![0.0; num_vars2];
    cap[AUX] = 1.0;
    cap[num_vars2 - 1] = 1.0;
    lp2.push_row(cap, t_star + 1e-12 * (1.0 + t_star.abs()));
    for v in 0..16 {
        lp2.objective[v] = 1.0;
    }

    match solve(&lp2)? {
        LpOutcome::Optimal { x, .. } => Ok(extract_forces(&x, scale)),
        LpOutcome::Infeasible => Err(Error::NumericalFailure(
            "tie-break stage lost feasibility".into(),
        )),
        LpOutcome::Unbounded => Err(Error::NumericalFailure(
            "tie-break stage reported unbounded".into(),
        )),
    }
}

/// Reconstruction with the strict inequalities of the friction model
/// restored: maximizes the uniform pyramid margin `delta` with
/// `f_i^z >= delta` and `|f_i^{x,y}| <= mu f_i^z - delta`.
///
/// Returns the forces and the achieved margin (in input units). The
/// margin is positive exactly when the wrench is strictly interior to
/// the cone, meaning some realization satisfies every Coulomb
/// inequality strictly.
pub fn reconstruct_forces_strict(
    patch: &ContactPatch,
    w: &Wrench,
) -> Result<(ContactForceSet, f64), Error> {
    let scale = w.amplitude();
    if scale == 0.0 {
        return Ok((ContactForceSet::zero(), 0.0));
    }
    let w_hat = w.scaled(1.0 / scale);

    let num_vars = 21 + 16 + 4;
    let mut lp = StandardLp::new(num_vars);
    wrench_equalities(patch, &w_hat, num_vars, &mut lp);
    friction_rows(patch, num_vars, 21, AUX, &mut lp);
    for i in 0..4 {
        // z_i - delta - slack = 0
        let mut c = vec![0.0; num_vars];
        c[Z + i] = 1.0;
        c[AUX] = -1.0;
        c[37 + i] = -1.0;
        lp.push_row(c, 0.0);
    }
    lp.objective[AUX] = -1.0; // maximize delta

    match solve(&lp)? {
        LpOutcome::Optimal { x, objective } => Ok((extract_forces(&x, scale), -objective * scale)),
        LpOutcome::Infeasible => Err(Error::Infeasible),
        LpOutcome::Unbounded => Err(Error::NumericalFailure(
            "margin maximization reported unbounded".into(),
        )),
    }
}

/// Point forces applied inside the patch rectangle, surface-frame
/// coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InteriorForceSystem {
    entries: Vec<(Vector2<f64>, Vector3<f64>)>,
}

impl InteriorForceSystem {
    pub fn new(entries: Vec<(Vector2<f64>, Vector3<f64>)>) -> Self {
        Self { entries }
    }

    pub fn push(&mut self, point: Vector2<f64>, force: Vector3<f64>) {
        self.entries.push((point, force));
    }

    pub fn entries(&self) -> &[(Vector2<f64>, Vector3<f64>)] {
        &self.entries
    }

    /// Resultant wrench at the patch center.
    pub fn total_wrench(&self) -> Wrench {
        let mut f = Vector3::zeros();
        let mut tau = Vector3::zeros();
        for (p, force) in &self.entries {
            f += force;
            tau += Vector3::new(p.x, p.y, 0.0).cross(force);
        }
        Wrench::new(f.x, f.y, f.z, tau.x, tau.y, tau.z).expect("finite inputs")
    }
}

/// Redistributes interior point forces to the four corners with
/// bilinear rectangle weights, preserving the total wrench exactly.
///
/// The weight of corner `Ci` at a point `(x, y)` is the product of the
/// normalized distances to the two opposite edges; weights are
/// nonnegative, strictly positive in the interior, and sum to one, so
/// pointwise friction feasibility carries over to the corner forces.
/// Fails with [`Error::PointOutsidePatch`] when a point leaves the
/// rectangle.
pub fn redistribute_to_vertices(
    patch: &ContactPatch,
    sys: &InteriorForceSystem,
) -> Result<ContactForceSet, Error> {
    let (x, y) = (patch.x(), patch.y());
    let mut forces = [Vector3::zeros(); 4];
    for (p, force) in sys.entries() {
        if p.x.abs() > x || p.y.abs() > y {
            return Err(Error::PointOutsidePatch { x: p.x, y: p.y });
        }
        let weights = [
            (x + p.x) * (y + p.y), // C1 = ( X,  Y)
            (x + p.x) * (y - p.y), // C2 = ( X, -Y)
            (x - p.x) * (y - p.y), // C3 = (-X, -Y)
            (x - p.x) * (y + p.y), // C4 = (-X,  Y)
        ];
        let denom = 4.0 * x * y;
        for (corner, weight) in weights.iter().enumerate() {
            forces[corner] += force * (weight / denom);
        }
    }
    Ok(ContactForceSet { forces })
}
