//! Contact geometry, wrench types, and the corner wrench map.
//!
//! # Frame and corner conventions
//!
//! The surface frame has x along the patch half-length `X`, y along the
//! half-width `Y`, and z along the outward contact normal. Wrenches are
//! taken at the rectangle center `O` in this frame; rotating them to a
//! world frame is the caller's job.
//!
//! Corner numbering is fixed and every operation in the crate assumes it:
//!
//! ```text
//! C1 = ( X,  Y)      C4 ---- C1        y
//! C2 = ( X, -Y)      |        |        ^
//! C3 = (-X, -Y)      |   O    |        |
//! C4 = (-X,  Y)      C3 ---- C2        +---> x
//! ```
//!
//! With forces f1..f4 applied at these corners the resultant wrench is
//!
//! ```text
//! f^x  = f1^x + f2^x + f3^x + f4^x          (same for y, z)
//! tau^x =  Y (f1^z - f2^z - f3^z + f4^z)
//! tau^y = -X (f1^z + f2^z - f3^z - f4^z)
//! tau^z =  X (f1^y + f2^y - f3^y - f4^y) - Y (f1^x - f2^x - f3^x + f4^x)
//! ```

use nalgebra::{SMatrix, SVector, Vector2, Vector3, Vector6};

use crate::error::Error;

/// Linear map from stacked corner forces (f1, f2, f3, f4) to the wrench
/// at the patch center.
pub type WrenchMap = SMatrix<f64, 6, 12>;

/// Division guard: strictly positive normal force is implemented as
/// `fz >= DEFAULT_FZ_EPSILON` in division-bearing operations.
pub const DEFAULT_FZ_EPSILON: f64 = 1e-10;

/// A rectangular surface contact: half-dimensions and friction coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPatch {
    x: f64,
    y: f64,
    mu: f64,
}

impl ContactPatch {
    /// Creates a patch with half-length `x` (m), half-width `y` (m) and
    /// static friction coefficient `mu`. Rejects `x <= 0`, `y <= 0`,
    /// `mu < 0`, and non-finite values.
    pub fn new(x: f64, y: f64, mu: f64) -> Result<Self, Error> {
        if !(x.is_finite() && y.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidPatch("dimensions must be finite".into()));
        }
        if x <= 0.0 || y <= 0.0 {
            return Err(Error::InvalidPatch(format!(
                "half-dimensions must be positive (got X={x}, Y={y})"
            )));
        }
        if mu < 0.0 {
            return Err(Error::InvalidPatch(format!(
                "friction coefficient must be nonnegative (got mu={mu})"
            )));
        }
        Ok(Self { x, y, mu })
    }

    /// Half-length along the x-axis (m).
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Half-width along the y-axis (m).
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Static friction coefficient.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Corner positions in the fixed C1..C4 order.
    pub fn corners(&self) -> [Vector2<f64>; 4] {
        [
            Vector2::new(self.x, self.y),
            Vector2::new(self.x, -self.y),
            Vector2::new(-self.x, -self.y),
            Vector2::new(-self.x, self.y),
        ]
    }

    /// Scales the contact area by `s` (each half-dimension by sqrt(s)).
    pub fn scale_area(&self, s: f64) -> Result<Self, Error> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidPatch(format!(
                "area scale must be positive (got {s})"
            )));
        }
        Self::new(self.x * s.sqrt(), self.y * s.sqrt(), self.mu)
    }
}

/// A 6D wrench (force, torque) at the patch center in the surface frame.
///
/// Components are finite by construction; forces in newtons, torques in
/// newton-meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    fx: f64,
    fy: f64,
    fz: f64,
    taux: f64,
    tauy: f64,
    tauz: f64,
}

impl Wrench {
    pub fn new(fx: f64, fy: f64, fz: f64, taux: f64, tauy: f64, tauz: f64) -> Result<Self, Error> {
        let w = Self {
            fx,
            fy,
            fz,
            taux,
            tauy,
            tauz,
        };
        if w.as_vector().iter().all(|c| c.is_finite()) {
            Ok(w)
        } else {
            Err(Error::NonFiniteWrench)
        }
    }

    pub fn zero() -> Self {
        Self {
            fx: 0.0,
            fy: 0.0,
            fz: 0.0,
            taux: 0.0,
            tauy: 0.0,
            tauz: 0.0,
        }
    }

    pub fn from_vector(v: &Vector6<f64>) -> Result<Self, Error> {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn as_vector(&self) -> Vector6<f64> {
        Vector6::new(self.fx, self.fy, self.fz, self.taux, self.tauy, self.tauz)
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }
    pub fn fy(&self) -> f64 {
        self.fy
    }
    pub fn fz(&self) -> f64 {
        self.fz
    }
    pub fn taux(&self) -> f64 {
        self.taux
    }
    pub fn tauy(&self) -> f64 {
        self.tauy
    }
    pub fn tauz(&self) -> f64 {
        self.tauz
    }

    /// Largest absolute component; zero only for the zero wrench.
    pub fn amplitude(&self) -> f64 {
        self.as_vector().amax()
    }

    /// Returns the wrench scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            fx: self.fx * s,
            fy: self.fy * s,
            fz: self.fz * s,
            taux: self.taux * s,
            tauy: self.tauy * s,
            tauz: self.tauz * s,
        }
    }
}

/// Forces applied at the four patch corners, in the fixed C1..C4 order
/// documented in the module header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactForceSet {
    pub forces: [Vector3<f64>; 4],
}

impl ContactForceSet {
    pub fn new(f1: Vector3<f64>, f2: Vector3<f64>, f3: Vector3<f64>, f4: Vector3<f64>) -> Self {
        Self {
            forces: [f1, f2, f3, f4],
        }
    }

    pub fn zero() -> Self {
        Self {
            forces: [Vector3::zeros(); 4],
        }
    }

    /// Stacks the corner forces as (f1x, f1y, f1z, ..., f4z).
    pub fn stacked(&self) -> SVector<f64, 12> {
        let mut v = SVector::<f64, 12>::zeros();
        for (i, f) in self.forces.iter().enumerate() {
            v.fixed_rows_mut::<3>(3 * i).copy_from(f);
        }
        v
    }

    /// True when every corner force lies in the linearized friction
    /// pyramid |f^x| <= mu f^z, |f^y| <= mu f^z, f^z >= 0, with `tol`
    /// of absolute slack.
    pub fn friction_feasible(&self, mu: f64, tol: f64) -> bool {
        self.forces.iter().all(|f| {
            f.z >= -tol && f.x.abs() <= mu * f.z + tol && f.y.abs() <= mu * f.z + tol
        })
    }

    /// Largest corner normal force.
    pub fn max_normal_force(&self) -> f64 {
        self.forces.iter().map(|f| f.z).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Dimensionless wrench coordinates used by the concise cone form.
///
/// Defined only for `fz > 0` and `mu > 0`; `px + py = 1` by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedWrench {
    /// f^x / (mu f^z)
    pub k1: f64,
    /// f^y / (mu f^z)
    pub k2: f64,
    /// tau^z / (mu (X+Y) f^z)
    pub k3: f64,
    /// tau^x / (Y f^z)
    pub c1: f64,
    /// tau^y / (X f^z)
    pub c2: f64,
    /// X / (X+Y)
    pub px: f64,
    /// Y / (X+Y)
    pub py: f64,
}

/// The 6x12 map from stacked corner forces to the center wrench.
///
/// Columns follow [`ContactForceSet::stacked`]; entries are 0, +-1, +-X,
/// +-Y. Built from torque = corner x force, which reproduces the printed
/// component equations in the module header.
pub fn wrench_map_matrix(patch: &ContactPatch) -> WrenchMap {
    let mut g = WrenchMap::zeros();
    for (i, c) in patch.corners().iter().enumerate() {
        let col = 3 * i;
        // force columns pass through
        g[(0, col)] = 1.0;
        g[(1, col + 1)] = 1.0;
        g[(2, col + 2)] = 1.0;
        // torque = (x, y, 0) x (fx, fy, fz)
        g[(3, col + 2)] = c.y;
        g[(4, col + 2)] = -c.x;
        g[(5, col)] = -c.y;
        g[(5, col + 1)] = c.x;
    }
    g
}

/// Sums corner forces into the resultant wrench at the patch center.
///
/// Implemented directly from the component equations; tests check it
/// against [`wrench_map_matrix`] applied to the stacked force vector.
pub fn compose_wrench(patch: &ContactPatch, forces: &ContactForceSet) -> Wrench {
    let [f1, f2, f3, f4] = &forces.forces;
    let (x, y) = (patch.x(), patch.y());
    Wrench {
        fx: f1.x + f2.x + f3.x + f4.x,
        fy: f1.y + f2.y + f3.y + f4.y,
        fz: f1.z + f2.z + f3.z + f4.z,
        taux: y * (f1.z - f2.z - f3.z + f4.z),
        tauy: -x * (f1.z + f2.z - f3.z - f4.z),
        tauz: x * (f1.y + f2.y - f3.y - f4.y) - y * (f1.x - f2.x - f3.x + f4.x),
    }
}

/// Zero-moment point of a wrench: `(-tau^y / f^z, tau^x / f^z)`.
///
/// The ZMP lies inside the patch rectangle exactly when the W4 and W5
/// cone rows hold. Fails with [`Error::DegenerateNormalForce`] when
/// `fz < DEFAULT_FZ_EPSILON`.
pub fn zmp(patch: &ContactPatch, w: &Wrench) -> Result<Vector2<f64>, Error> {
    zmp_with_epsilon(patch, w, DEFAULT_FZ_EPSILON)
}

/// [`zmp`] with a caller-chosen division guard.
pub fn zmp_with_epsilon(
    _patch: &ContactPatch,
    w: &Wrench,
    fz_epsilon: f64,
) -> Result<Vector2<f64>, Error> {
    if w.fz() < fz_epsilon {
        return Err(Error::DegenerateNormalForce {
            fz: w.fz(),
            epsilon: fz_epsilon,
        });
    }
    Ok(Vector2::new(-w.tauy() / w.fz(), w.taux() / w.fz()))
}

/// Computes the dimensionless coordinates of the concise cone form.
///
/// Requires `fz >= DEFAULT_FZ_EPSILON` and `mu > 0`.
pub fn normalize(patch: &ContactPatch, w: &Wrench) -> Result<NormalizedWrench, Error> {
    normalize_with_epsilon(patch, w, DEFAULT_FZ_EPSILON)
}

/// [`normalize`] with a caller-chosen division guard.
pub fn normalize_with_epsilon(
    patch: &ContactPatch,
    w: &Wrench,
    fz_epsilon: f64,
) -> Result<NormalizedWrench, Error> {
    if patch.mu() == 0.0 {
        return Err(Error::ZeroFriction);
    }
    if w.fz() < fz_epsilon {
        return Err(Error::DegenerateNormalForce {
            fz: w.fz(),
            epsilon: fz_epsilon,
        });
    }
    let (x, y, mu, fz) = (patch.x(), patch.y(), patch.mu(), w.fz());
    Ok(NormalizedWrench {
        k1: w.fx() / (mu * fz),
        k2: w.fy() / (mu * fz),
        k3: w.tauz() / (mu * (x + y) * fz),
        c1: w.taux() / (y * fz),
        c2: w.tauy() / (x * fz),
        px: x / (x + y),
        py: y / (x + y),
    })
}
