//! Contact wrench cone (CWC) stability for rectangular surface contacts.
//!
//! A rigid rectangular patch pressing on a plane can transmit exactly the
//! 6D wrenches that some assignment of Coulomb-feasible corner forces can
//! produce. That set is a convex polyhedral cone with a known closed form:
//! Coulomb friction on the resultant force, ZMP inside the support
//! rectangle, and a double bound on the yaw torque. This crate provides
//!
//! - the closed-form cone as a membership predicate and an explicit
//!   16-row face description ([`cone`]),
//! - an independent polytope oracle that rebuilds the same cone from the
//!   corner friction pyramids via LP feasibility and Fourier–Motzkin
//!   projection, in floats or exact rationals ([`polytope`]),
//! - corner-force reconstruction and interior-force redistribution
//!   ([`reconstruct`]),
//! - a randomized cross-validation harness comparing the two routes
//!   ([`validate`]).
//!
//! All operations are pure functions over immutable values. With the
//! default `parallel` feature the batch helpers in [`validate`] fan out
//! over rayon; without it they fall back to sequential loops with
//! identical results.

pub mod cone;
pub mod contact;
pub mod polytope;
pub mod reconstruct;
pub mod validate;

mod error;

pub use cone::{
    check_wrench, face_form, tau_safe_control, yaw_bounds, FaceForm, FaceRow, RowLabel, Sign,
    StabilityReport, YawBounds, MEMBERSHIP_TOLERANCE,
};
pub use contact::{
    compose_wrench, normalize, wrench_map_matrix, zmp, ContactForceSet, ContactPatch,
    NormalizedWrench, Wrench, DEFAULT_FZ_EPSILON,
};
pub use error::Error;
pub use polytope::{
    cwc_span, friction_pyramid_generators, membership_lp, span_to_face, InequalitySystem,
    LinearInequality, SpanForm,
};
pub use reconstruct::{
    reconstruct_forces, reconstruct_forces_strict, redistribute_to_vertices, InteriorForceSystem,
};
