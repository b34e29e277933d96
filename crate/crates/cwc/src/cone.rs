//! Closed-form contact wrench cone for a rectangular patch.
//!
//! A wrench W = (f^x, f^y, f^z, tau^x, tau^y, tau^z) is transmissible
//! through the patch exactly when
//!
//! ```text
//! W1   |f^x|   <= mu f^z
//! W2   |f^y|   <= mu f^z
//! W3    f^z    >  0
//! W4   |tau^x| <= Y f^z
//! W5   |tau^y| <= X f^z
//! W6   tau_min <= tau^z <= tau_max
//! ```
//!
//! with
//!
//! ```text
//! tau_min = -mu (X+Y) f^z + |Y f^x - mu tau^x| + |X f^y - mu tau^y|
//! tau_max = +mu (X+Y) f^z - |Y f^x + mu tau^x| - |X f^y + mu tau^y|
//! ```
//!
//! Expanding every absolute value yields 16 homogeneous halfspaces
//! (2 each from W1, W2, W4, W5 and 4 each from the two W6 bounds);
//! `f^z >= 0` is implied and not emitted separately. The membership test
//! evaluates the topological closure of the cone, so at `f^z = 0` only
//! the zero wrench is admitted; W3's strictness is surfaced as a warning
//! flag instead of a verdict.

use nalgebra::{Vector2, Vector6};

use crate::contact::{zmp, ContactPatch, Wrench, DEFAULT_FZ_EPSILON};
use crate::error::Error;

/// Absolute slack on normalized rows when deciding membership. Boundary
/// wrenches within the tolerance are members with `boundary` set.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Branch of an expanded absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn glyph(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Which printed inequality a face row expands, and which branch.
///
/// `YawLower`/`YawUpper` carry the branch signs of the x-term and y-term
/// absolute values of `tau_min` / `tau_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowLabel {
    /// W1: +-f^x - mu f^z <= 0
    FrictionX(Sign),
    /// W2: +-f^y - mu f^z <= 0
    FrictionY(Sign),
    /// W4: +-tau^x - Y f^z <= 0
    RollTorque(Sign),
    /// W5: +-tau^y - X f^z <= 0
    PitchTorque(Sign),
    /// W6 lower bound, tau_min <= tau^z
    YawLower(Sign, Sign),
    /// W6 upper bound, tau^z <= tau_max
    YawUpper(Sign, Sign),
}

impl RowLabel {
    /// The printed condition this row comes from: "W1", "W2", "W4", "W5"
    /// or "W6".
    pub fn condition(&self) -> &'static str {
        match self {
            RowLabel::FrictionX(_) => "W1",
            RowLabel::FrictionY(_) => "W2",
            RowLabel::RollTorque(_) => "W4",
            RowLabel::PitchTorque(_) => "W5",
            RowLabel::YawLower(_, _) | RowLabel::YawUpper(_, _) => "W6",
        }
    }
}

impl std::fmt::Display for RowLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowLabel::FrictionX(s) => write!(f, "W1{}", s.glyph()),
            RowLabel::FrictionY(s) => write!(f, "W2{}", s.glyph()),
            RowLabel::RollTorque(s) => write!(f, "W4{}", s.glyph()),
            RowLabel::PitchTorque(s) => write!(f, "W5{}", s.glyph()),
            RowLabel::YawLower(sx, sy) => write!(f, "W6L{}{}", sx.glyph(), sy.glyph()),
            RowLabel::YawUpper(sx, sy) => write!(f, "W6U{}{}", sx.glyph(), sy.glyph()),
        }
    }
}

const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

/// Row labels in the fixed emission order used everywhere in the crate.
pub fn row_labels() -> [RowLabel; 16] {
    let mut labels = [RowLabel::FrictionX(Sign::Plus); 16];
    let mut k = 0;
    for s in SIGNS {
        labels[k] = RowLabel::FrictionX(s);
        k += 1;
    }
    for s in SIGNS {
        labels[k] = RowLabel::FrictionY(s);
        k += 1;
    }
    for s in SIGNS {
        labels[k] = RowLabel::RollTorque(s);
        k += 1;
    }
    for s in SIGNS {
        labels[k] = RowLabel::PitchTorque(s);
        k += 1;
    }
    for sx in SIGNS {
        for sy in SIGNS {
            labels[k] = RowLabel::YawLower(sx, sy);
            k += 1;
        }
    }
    for sx in SIGNS {
        for sy in SIGNS {
            labels[k] = RowLabel::YawUpper(sx, sy);
            k += 1;
        }
    }
    labels
}

/// The 16 rows before L2 normalization, entries in (f^x, f^y, f^z,
/// tau^x, tau^y, tau^z) order. Mirrored coefficient-for-coefficient by
/// the exact-rational construction in `polytope::exact`.
pub(crate) fn raw_rows(patch: &ContactPatch) -> [Vector6<f64>; 16] {
    let (x, y, mu) = (patch.x(), patch.y(), patch.mu());
    let mut rows = [Vector6::zeros(); 16];
    let mut k = 0;
    for s in SIGNS {
        rows[k] = Vector6::new(s.factor(), 0.0, -mu, 0.0, 0.0, 0.0);
        k += 1;
    }
    for s in SIGNS {
        rows[k] = Vector6::new(0.0, s.factor(), -mu, 0.0, 0.0, 0.0);
        k += 1;
    }
    for s in SIGNS {
        rows[k] = Vector6::new(0.0, 0.0, -y, s.factor(), 0.0, 0.0);
        k += 1;
    }
    for s in SIGNS {
        rows[k] = Vector6::new(0.0, 0.0, -x, 0.0, s.factor(), 0.0);
        k += 1;
    }
    // tau_min <= tau^z: sx (Y f^x - mu tau^x) + sy (X f^y - mu tau^y)
    //                   - mu (X+Y) f^z - tau^z <= 0
    for sx in SIGNS {
        for sy in SIGNS {
            rows[k] = Vector6::new(
                sx.factor() * y,
                sy.factor() * x,
                -mu * (x + y),
                -sx.factor() * mu,
                -sy.factor() * mu,
                -1.0,
            );
            k += 1;
        }
    }
    // tau^z <= tau_max: sx (Y f^x + mu tau^x) + sy (X f^y + mu tau^y)
    //                   - mu (X+Y) f^z + tau^z <= 0
    for sx in SIGNS {
        for sy in SIGNS {
            rows[k] = Vector6::new(
                sx.factor() * y,
                sy.factor() * x,
                -mu * (x + y),
                sx.factor() * mu,
                sy.factor() * mu,
                1.0,
            );
            k += 1;
        }
    }
    rows
}

fn normalized_rows(patch: &ContactPatch) -> [Vector6<f64>; 16] {
    let mut rows = raw_rows(patch);
    for r in rows.iter_mut() {
        *r /= r.norm();
    }
    rows
}

/// One labeled halfspace of the cone: membership requires
/// `normal . w <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceRow {
    /// L2-normalized row coefficients.
    pub normal: Vector6<f64>,
    pub label: RowLabel,
}

/// The explicit face description: 16 L2-normalized halfspace rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceForm {
    rows: Vec<FaceRow>,
}

impl FaceForm {
    pub fn rows(&self) -> &[FaceRow] {
        &self.rows
    }

    /// Signed distances `normal . w` per row; <= 0 means satisfied.
    pub fn margins(&self, w: &Wrench) -> [f64; 16] {
        let v = w.as_vector();
        let mut m = [0.0; 16];
        for (out, row) in m.iter_mut().zip(&self.rows) {
            *out = row.normal.dot(&v);
        }
        m
    }

    pub fn max_margin(&self, w: &Wrench) -> f64 {
        let v = w.as_vector();
        self.rows
            .iter()
            .map(|r| r.normal.dot(&v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership at [`MEMBERSHIP_TOLERANCE`].
    pub fn contains(&self, w: &Wrench) -> bool {
        self.max_margin(w) <= MEMBERSHIP_TOLERANCE
    }
}

/// Builds the 16-row face form. Fails with [`Error::ZeroFriction`] when
/// `mu = 0`: the cone then degenerates (no tangential or yaw transmission)
/// and the 16-facet description no longer applies. [`check_wrench`] still
/// handles `mu = 0` correctly through the same row formulas.
pub fn face_form(patch: &ContactPatch) -> Result<FaceForm, Error> {
    if patch.mu() == 0.0 {
        return Err(Error::ZeroFriction);
    }
    let rows = normalized_rows(patch)
        .into_iter()
        .zip(row_labels())
        .map(|(normal, label)| FaceRow { normal, label })
        .collect();
    Ok(FaceForm { rows })
}

/// Admissible yaw-torque range and the control target at its midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YawBounds {
    /// Lower bound on tau^z (N m).
    pub tau_min: f64,
    /// Upper bound on tau^z (N m).
    pub tau_max: f64,
    /// Midpoint of the range, computed by the sign/min law; the value a
    /// yaw controller should command.
    pub tau_safe: f64,
    /// Half-width of the admissible range, clamped at zero for
    /// reporting; see [`YawBounds::signed_half_width`] for the raw value.
    pub deviation: f64,
    /// True when `tau_min > tau_max`: the other cone conditions already
    /// exclude every yaw torque.
    pub empty_range: bool,
}

impl YawBounds {
    /// `(tau_max - tau_min) / 2`, negative when the range is empty.
    pub fn signed_half_width(&self) -> f64 {
        0.5 * (self.tau_max - self.tau_min)
    }

    pub fn contains(&self, tau_z: f64, tol: f64) -> bool {
        self.tau_min - tol <= tau_z && tau_z <= self.tau_max + tol
    }
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Yaw-torque bounds for a wrench.
///
/// `tau_safe` uses the sign/min law rather than the midpoint, so the
/// midpoint identity `tau_safe = (tau_min + tau_max) / 2` is a genuine
/// cross-check of two algebraic routes; likewise `deviation` uses the
/// max formula rather than the half-width.
pub fn yaw_bounds(patch: &ContactPatch, w: &Wrench) -> YawBounds {
    let (x, y, mu) = (patch.x(), patch.y(), patch.mu());
    let (fx, fy, fz, tx, ty) = (w.fx(), w.fy(), w.fz(), w.taux(), w.tauy());

    let tau_min = -mu * (x + y) * fz + (y * fx - mu * tx).abs() + (x * fy - mu * ty).abs();
    let tau_max = mu * (x + y) * fz - (y * fx + mu * tx).abs() - (x * fy + mu * ty).abs();

    let tau_safe = sgn(-fx * tx) * (y * fx.abs()).min(mu * tx.abs())
        + sgn(-fy * ty) * (x * fy.abs()).min(mu * ty.abs());

    let raw_deviation = mu * (x + y) * fz
        - (y * fx.abs()).max(mu * tx.abs())
        - (x * fy.abs()).max(mu * ty.abs());

    YawBounds {
        tau_min,
        tau_max,
        tau_safe,
        deviation: raw_deviation.max(0.0),
        empty_range: tau_min > tau_max,
    }
}

/// The yaw torque a controller should command to maximize the margin to
/// yaw slip. Computed unconditionally; when the wrench violates other
/// cone conditions the accompanying [`YawBounds::empty_range`] flags it.
pub fn tau_safe_control(patch: &ContactPatch, w: &Wrench) -> f64 {
    yaw_bounds(patch, w).tau_safe
}

/// Membership verdict with per-row diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// True when every row margin is at most [`MEMBERSHIP_TOLERANCE`].
    pub member: bool,
    /// Member lying within the tolerance band of the cone boundary.
    pub boundary: bool,
    /// `f^z` is below the division guard while other components are
    /// nonzero: the strict W3 condition is not met even though the
    /// closed cone may admit the wrench.
    pub degenerate_normal: bool,
    /// Signed distances on the 16 L2-normalized rows, in
    /// [`row_labels`] order; <= 0 means satisfied.
    pub margins: [f64; 16],
    /// Smallest slack across rows, `min_k(-margins[k])`; positive inside
    /// the cone, negative outside.
    pub min_margin: f64,
    /// Zero-moment point, when `f^z` clears the division guard.
    pub zmp: Option<Vector2<f64>>,
    pub yaw: YawBounds,
}

impl StabilityReport {
    pub fn max_margin(&self) -> f64 {
        -self.min_margin
    }

    /// Labels of the rows violated beyond the membership tolerance, in
    /// emission order.
    pub fn violated_rows(&self) -> Vec<RowLabel> {
        self.margins
            .iter()
            .zip(row_labels())
            .filter(|(m, _)| **m > MEMBERSHIP_TOLERANCE)
            .map(|(_, l)| l)
            .collect()
    }
}

/// Tests a wrench against the closed-form cone.
///
/// Works for any valid patch including `mu = 0`, where the row formulas
/// reduce to the pure ZMP condition with no tangential or yaw
/// transmission. Degenerate inputs yield `member = false` with
/// diagnostics; the zero wrench (cone apex) is a member.
pub fn check_wrench(patch: &ContactPatch, w: &Wrench) -> StabilityReport {
    let rows = normalized_rows(patch);
    let v = w.as_vector();
    let mut margins = [0.0; 16];
    let mut max_margin = f64::NEG_INFINITY;
    for (out, row) in margins.iter_mut().zip(&rows) {
        *out = row.dot(&v);
        max_margin = max_margin.max(*out);
    }

    let member = max_margin <= MEMBERSHIP_TOLERANCE;
    StabilityReport {
        member,
        boundary: member && max_margin >= -MEMBERSHIP_TOLERANCE,
        degenerate_normal: w.fz() < DEFAULT_FZ_EPSILON && w.amplitude() > 0.0,
        margins,
        min_margin: -max_margin,
        zmp: zmp(patch, w).ok(),
        yaw: yaw_bounds(patch, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{compose_wrench, ContactForceSet};
    use nalgebra::Vector3;
    use proptest::prelude::*;

    fn patch(x: f64, y: f64, mu: f64) -> ContactPatch {
        ContactPatch::new(x, y, mu).unwrap()
    }

    fn wrench(c: [f64; 6]) -> Wrench {
        Wrench::new(c[0], c[1], c[2], c[3], c[4], c[5]).unwrap()
    }

    #[test]
    fn pure_normal_load_is_member() {
        let p = patch(1.0, 1.0, 0.5);
        let r = check_wrench(&p, &wrench([0.0, 0.0, 10.0, 0.0, 0.0, 0.0]));
        assert!(r.member);
        assert!(!r.boundary);
        assert!(r.min_margin > 0.0);
    }

    #[test]
    fn yaw_bound_is_mu_perimeter_fz() {
        // mu (X+Y) f^z = 0.5 * 2 * 10 = 10 at zero tangential/roll-pitch
        let p = patch(1.0, 1.0, 0.5);
        let over = check_wrench(&p, &wrench([0.0, 0.0, 10.0, 0.0, 0.0, 10.01]));
        assert!(!over.member);
        assert!(over
            .violated_rows()
            .iter()
            .all(|l| l.condition() == "W6"));
        let under = check_wrench(&p, &wrench([0.0, 0.0, 10.0, 0.0, 0.0, 9.99]));
        assert!(under.member);
    }

    #[test]
    fn excess_tangential_force_violates_w1() {
        let p = patch(1.0, 1.0, 0.5);
        let r = check_wrench(&p, &wrench([6.0, 0.0, 10.0, 0.0, 0.0, 0.0]));
        assert!(!r.member);
        assert!(r
            .violated_rows()
            .contains(&RowLabel::FrictionX(Sign::Plus)));
    }

    #[test]
    fn zero_wrench_is_member_at_apex() {
        let p = patch(1.0, 1.0, 0.5);
        let r = check_wrench(&p, &Wrench::zero());
        assert!(r.member);
        assert!(r.boundary);
        assert!(!r.degenerate_normal);
        assert!(r.zmp.is_none());
    }

    #[test]
    fn nonzero_wrench_at_zero_fz_is_rejected_with_warning() {
        let p = patch(1.0, 1.0, 0.5);
        let r = check_wrench(&p, &wrench([0.5, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert!(!r.member);
        assert!(r.degenerate_normal);
    }

    #[test]
    fn face_form_has_16_normalized_rows() {
        for (x, y, mu) in [(1.0, 1.0, 0.5), (0.05, 0.3, 1.0), (2.0, 0.1, 0.1)] {
            let ff = face_form(&patch(x, y, mu)).unwrap();
            assert_eq!(ff.rows().len(), 16);
            for row in ff.rows() {
                assert!((row.normal.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn face_form_rejects_zero_friction() {
        assert_eq!(face_form(&patch(1.0, 1.0, 0.0)).unwrap_err(), Error::ZeroFriction);
    }

    #[test]
    fn w1_row_is_direct_transcription() {
        let ff = face_form(&patch(1.0, 1.0, 0.5)).unwrap();
        let expected = Vector6::new(1.0, 0.0, -0.5, 0.0, 0.0, 0.0).normalize();
        let row = ff.rows()[0];
        assert_eq!(row.label, RowLabel::FrictionX(Sign::Plus));
        assert!((row.normal - expected).amax() < 1e-15);
    }

    #[test]
    fn symmetric_vertical_load_yaw_range() {
        let p = patch(1.0, 1.0, 0.5);
        let yb = yaw_bounds(&p, &wrench([0.0, 0.0, 10.0, 0.0, 0.0, 0.0]));
        assert_eq!(yb.tau_min, -10.0);
        assert_eq!(yb.tau_max, 10.0);
        assert_eq!(yb.tau_safe, 0.0);
        assert_eq!(yb.deviation, 10.0);
        assert!(!yb.empty_range);
    }

    #[test]
    fn tau_safe_sign_law() {
        // f^x > 0 and tau^x > 0 pull tau_safe negative.
        let p = patch(1.0, 1.0, 0.5);
        let w = wrench([2.0, 0.0, 10.0, 3.0, 0.0, 0.0]);
        let yb = yaw_bounds(&p, &w);
        let expected = -(p.y() * 2.0f64).min(p.mu() * 3.0);
        assert!((yb.tau_safe - expected).abs() < 1e-15);
    }

    #[test]
    fn saturated_corner_collapses_yaw_range() {
        // Saturate W1, W2, W4, W5 simultaneously: ZMP at corner C1 with
        // saturated tangential force. The admissible range is the
        // singleton {tau_safe}.
        let p = patch(0.8, 0.4, 0.6);
        let fz = 7.0;
        let w = wrench([
            p.mu() * fz,
            p.mu() * fz,
            fz,
            p.y() * fz,
            -p.x() * fz,
            0.0,
        ]);
        let yb = yaw_bounds(&p, &w);
        assert!((yb.tau_max - yb.tau_min).abs() < 1e-9);
        assert!((yb.tau_safe - yb.tau_min).abs() < 1e-9);
        assert!(yb.deviation < 1e-9);
    }

    #[test]
    fn zero_friction_membership_degenerates_to_zmp_condition() {
        let p = patch(0.5, 0.25, 0.0);
        // pure vertical load with admissible roll/pitch torque: member
        let ok = wrench([0.0, 0.0, 4.0, 0.5 * 4.0 * 0.25, 0.0, 0.0]);
        assert!(check_wrench(&p, &ok).member);
        // any tangential force: not a member
        assert!(!check_wrench(&p, &wrench([1e-6, 0.0, 4.0, 0.0, 0.0, 0.0])).member);
        // any yaw torque: not a member
        assert!(!check_wrench(&p, &wrench([0.0, 0.0, 4.0, 0.0, 0.0, 1e-6])).member);
        // ZMP outside: not a member
        assert!(!check_wrench(&p, &wrench([0.0, 0.0, 4.0, 1.1 * 4.0 * 0.25, 0.0, 0.0])).member);
        // negative normal force: not a member
        assert!(!check_wrench(&p, &wrench([0.0, 0.0, -1.0, 0.0, 0.0, 0.0])).member);
    }

    fn patch_strategy() -> impl Strategy<Value = ContactPatch> {
        (0.05..1.5f64, 0.05..1.5f64, 0.05..1.2f64)
            .prop_map(|(x, y, mu)| ContactPatch::new(x, y, mu).unwrap())
    }

    fn wrench_strategy() -> impl Strategy<Value = Wrench> {
        (
            -2.0..2.0f64,
            -2.0..2.0f64,
            -0.5..2.0f64,
            -2.0..2.0f64,
            -2.0..2.0f64,
            -2.0..2.0f64,
        )
            .prop_map(|(a, b, c, d, e, f)| Wrench::new(a, b, c, d, e, f).unwrap())
    }

    proptest! {
        #[test]
        fn midpoint_identity(p in patch_strategy(), w in wrench_strategy()) {
            let yb = yaw_bounds(&p, &w);
            prop_assert!((yb.tau_safe - 0.5 * (yb.tau_min + yb.tau_max)).abs() <= 1e-12);
        }

        #[test]
        fn deviation_matches_half_width(p in patch_strategy(), w in wrench_strategy()) {
            let yb = yaw_bounds(&p, &w);
            let raw = p.mu() * (p.x() + p.y()) * w.fz()
                - (p.y() * w.fx().abs()).max(p.mu() * w.taux().abs())
                - (p.x() * w.fy().abs()).max(p.mu() * w.tauy().abs());
            prop_assert!((yb.signed_half_width() - raw).abs() <= 1e-12);
            prop_assert_eq!(yb.deviation, raw.max(0.0));
        }

        #[test]
        fn replacing_tauz_by_tau_safe_satisfies_w6(p in patch_strategy(), w in wrench_strategy()) {
            let yb = yaw_bounds(&p, &w);
            if !yb.empty_range {
                prop_assert!(yb.contains(yb.tau_safe, 1e-12));
            }
        }

        // Cones are scale-invariant; margins scale linearly.
        #[test]
        fn membership_is_scale_invariant(p in patch_strategy(), w in wrench_strategy(),
                                         s in 0.01..100.0f64) {
            let base = check_wrench(&p, &w);
            let scaled = check_wrench(&p, &w.scaled(s));
            for (m, ms) in base.margins.iter().zip(scaled.margins.iter()) {
                prop_assert!((ms - s * m).abs() <= 1e-9 * (1.0 + ms.abs()));
            }
            // compare verdicts away from the boundary, where the fixed
            // absolute tolerance itself does not scale
            if base.max_margin().abs() * s.min(1.0) > 1e-6 {
                prop_assert_eq!(base.member, scaled.member);
            }
        }

        // Increasing any of |f^x|, |f^y|, |tau^x|, |tau^y| never widens
        // the admissible yaw range.
        #[test]
        fn yaw_range_shrinks_monotonically(p in patch_strategy(), w in wrench_strategy(),
                                           bump in 0.0..2.0f64) {
            let base = yaw_bounds(&p, &w).signed_half_width();
            for i in [0usize, 1, 3, 4] {
                let mut v = w.as_vector();
                let dir = if v[i] >= 0.0 { 1.0 } else { -1.0 };
                v[i] += bump * dir; // grow magnitude, keep everything else fixed
                let grown = Wrench::from_vector(&v).unwrap();
                prop_assert!(yaw_bounds(&p, &grown).signed_half_width() <= base + 1e-12);
            }
        }

        // member(scaled patch) implies member(original patch) for s <= 1.
        // Members of the scaled patch are built from its corner pyramids.
        #[test]
        fn member_set_shrinks_with_area(p in patch_strategy(), s in 0.05..1.0f64,
                                        zs in prop::array::uniform4(0.0..2.0f64),
                                        ax in prop::array::uniform4(-1.0..1.0f64),
                                        ay in prop::array::uniform4(-1.0..1.0f64)) {
            let small = p.scale_area(s).unwrap();
            let forces = ContactForceSet::new(
                Vector3::new(ax[0] * p.mu() * zs[0], ay[0] * p.mu() * zs[0], zs[0]),
                Vector3::new(ax[1] * p.mu() * zs[1], ay[1] * p.mu() * zs[1], zs[1]),
                Vector3::new(ax[2] * p.mu() * zs[2], ay[2] * p.mu() * zs[2], zs[2]),
                Vector3::new(ax[3] * p.mu() * zs[3], ay[3] * p.mu() * zs[3], zs[3]),
            );
            let w = compose_wrench(&small, &forces);
            prop_assert!(check_wrench(&small, &w).member);
            prop_assert!(check_wrench(&p, &w).member);
        }

        // For W1- and W2-feasible wrenches each raw margin tightens as
        // the patch shrinks.
        #[test]
        fn raw_margins_tighten_with_area(p in patch_strategy(), s in 0.05..1.0f64,
                                         fz in 0.0..2.0f64, ax in -1.0..1.0f64,
                                         ay in -1.0..1.0f64, tx in -2.0..2.0f64,
                                         ty in -2.0..2.0f64, tz in -2.0..2.0f64) {
            let w = Wrench::new(ax * p.mu() * fz, ay * p.mu() * fz, fz, tx, ty, tz).unwrap();
            let small = p.scale_area(s).unwrap();
            let v = w.as_vector();
            for (big_row, small_row) in raw_rows(&p).iter().zip(raw_rows(&small).iter()) {
                prop_assert!(small_row.dot(&v) >= big_row.dot(&v) - 1e-12);
            }
        }

        // |ZMP| inside rectangle iff W4 and W5 hold (rows 4..8).
        #[test]
        fn zmp_equivalence(p in patch_strategy(), w in wrench_strategy()) {
            prop_assume!(w.fz() > 1e-6);
            let r = check_wrench(&p, &w);
            let z = zmp(&p, &w).unwrap();
            let w45 = r.margins[4..8].iter().all(|m| *m <= 0.0);
            let inside = z.x.abs() <= p.x() && z.y.abs() <= p.y();
            // skip samples within a band of the boundary
            let band = 1e-9 * (1.0 + w.amplitude());
            let near = r.margins[4..8].iter().any(|m| m.abs() <= band);
            prop_assume!(!near);
            prop_assert_eq!(w45, inside);
        }

        // A composed pyramid-feasible force set is always a member.
        #[test]
        fn pyramid_forces_compose_to_members(p in patch_strategy(),
                                             zs in prop::array::uniform4(0.0..3.0f64),
                                             ax in prop::array::uniform4(-1.0..1.0f64),
                                             ay in prop::array::uniform4(-1.0..1.0f64)) {
            let forces = ContactForceSet::new(
                Vector3::new(ax[0] * p.mu() * zs[0], ay[0] * p.mu() * zs[0], zs[0]),
                Vector3::new(ax[1] * p.mu() * zs[1], ay[1] * p.mu() * zs[1], zs[1]),
                Vector3::new(ax[2] * p.mu() * zs[2], ay[2] * p.mu() * zs[2], zs[2]),
                Vector3::new(ax[3] * p.mu() * zs[3], ay[3] * p.mu() * zs[3], zs[3]),
            );
            let w = compose_wrench(&p, &forces);
            prop_assert!(check_wrench(&p, &w).member);
        }
    }
}
