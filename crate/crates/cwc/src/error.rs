use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Patch construction rejected non-positive half-dimensions or a
    /// negative friction coefficient.
    #[error("invalid contact patch: {0}")]
    InvalidPatch(String),

    /// Wrench construction rejected a NaN or infinite component.
    #[error("wrench components must be finite")]
    NonFiniteWrench,

    /// The normal force is at or below the division guard, so ZMP and
    /// normalization are undefined.
    #[error("normal force {fz} is below epsilon {epsilon}")]
    DegenerateNormalForce { fz: f64, epsilon: f64 },

    /// The operation requires a strictly positive friction coefficient.
    #[error("friction coefficient is zero")]
    ZeroFriction,

    /// The wrench is outside the contact wrench cone, so no feasible
    /// corner-force assignment exists.
    #[error("wrench is not in the contact wrench cone")]
    Infeasible,

    /// An interior force was placed outside the patch rectangle.
    #[error("contact point ({x}, {y}) lies outside the patch rectangle")]
    PointOutsidePatch { x: f64, y: f64 },

    /// The LP kernel or a polytope conversion failed numerically.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Fourier–Motzkin elimination exceeded the configured row cap.
    #[error("expression swell: {rows} rows exceed the cap of {cap}")]
    ExpressionSwell { rows: usize, cap: usize },
}
