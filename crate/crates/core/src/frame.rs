//! Radial-transverse-normal (RTN) frame construction and frame-rate algebra.
//!
//! The frame at a kinematic state is
//!
//! ```text
//! r_hat = r / |r|,   h_hat = (r x v) / |r x v|,   theta_hat = h_hat x r_hat
//! ```
//!
//! and, under a normal acceleration `a_N`, it rotates as
//!
//! ```text
//! d r_hat / dt     =  (h / r^2) theta_hat
//! d theta_hat / dt =  (r a_N / h) h_hat - (h / r^2) r_hat
//! d h_hat / dt     = -(r a_N / h) theta_hat
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vector3;

/// Smallest admissible position magnitude (m).
pub const R_MIN: f64 = 1e-6;
/// Smallest admissible specific angular momentum magnitude (m^2/s).
pub const H_MIN: f64 = 1e-6;

/// Position and velocity relative to the orbited point, stamped with time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub r: Vector3,
    pub v: Vector3,
    pub t: f64,
}

impl StateVector {
    pub fn new(r: Vector3, v: Vector3, t: f64) -> Self {
        Self { r, v, t }
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(self.v.iter()).all(|c| c.is_finite()) && self.t.is_finite()
    }
}

/// Components of a vector along (r_hat, theta_hat, h_hat).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector3Rtn {
    pub r: f64,
    pub t: f64,
    pub n: f64,
}

impl Vector3Rtn {
    pub const ZERO: Self = Self {
        r: 0.0,
        t: 0.0,
        n: 0.0,
    };

    pub const fn new(r: f64, t: f64, n: f64) -> Self {
        Self { r, t, n }
    }

    pub fn norm(&self) -> f64 {
        (self.r * self.r + self.t * self.t + self.n * self.n).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.t, self.n]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn as_vector(&self) -> Vector3 {
        Vector3::new(self.r, self.t, self.n)
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.t.is_finite() && self.n.is_finite()
    }
}

impl std::ops::Add for Vector3Rtn {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.r + o.r, self.t + o.t, self.n + o.n)
    }
}

impl std::ops::Sub for Vector3Rtn {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.r - o.r, self.t - o.t, self.n - o.n)
    }
}

impl std::ops::Neg for Vector3Rtn {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.r, -self.t, -self.n)
    }
}

impl std::ops::Mul<f64> for Vector3Rtn {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.r * k, self.t * k, self.n * k)
    }
}

/// Orthonormal RTN triad at a state plus the scalars the control laws need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtnFrame {
    pub r_hat: Vector3,
    pub theta_hat: Vector3,
    pub h_hat: Vector3,
    /// |r| (m)
    pub r: f64,
    /// |r x v| (m^2/s)
    pub h: f64,
    /// radial velocity v . r_hat (m/s)
    pub r_dot: f64,
}

/// Time derivatives of the three versors (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRates {
    pub r_hat: Vector3,
    pub theta_hat: Vector3,
    pub h_hat: Vector3,
}

/// Builds the RTN frame of `state`. Fails when `|r| < R_MIN` or `|r x v| < H_MIN`.
pub fn build_frame(state: &StateVector) -> Result<RtnFrame> {
    let r = state.r.norm();
    let h_vec = state.r.cross(&state.v);
    let h = h_vec.norm();
    if !(r >= R_MIN && h >= H_MIN) {
        return Err(Error::DegenerateState { r, h });
    }
    let r_hat = state.r / r;
    let h_hat = h_vec / h;
    let theta_hat = h_hat.cross(&r_hat);
    Ok(RtnFrame {
        r_hat,
        theta_hat,
        h_hat,
        r,
        h,
        r_dot: state.v.dot(&r_hat),
    })
}

impl RtnFrame {
    /// Angular rate of the radius vector, h / r^2 (rad/s).
    pub fn theta_dot(&self) -> f64 {
        self.h / (self.r * self.r)
    }

    /// Rotation matrix whose rows are the versors (inertial -> RTN).
    pub fn rotation(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::from_rows(&[
            self.r_hat.transpose(),
            self.theta_hat.transpose(),
            self.h_hat.transpose(),
        ])
    }

    pub fn to_rtn(&self, a: &Vector3) -> Vector3Rtn {
        project_to_rtn(a, self)
    }

    pub fn from_rtn(&self, a: &Vector3Rtn) -> Vector3 {
        project_from_rtn(a, self)
    }
}

pub fn project_to_rtn(a: &Vector3, frame: &RtnFrame) -> Vector3Rtn {
    Vector3Rtn::new(
        a.dot(&frame.r_hat),
        a.dot(&frame.theta_hat),
        a.dot(&frame.h_hat),
    )
}

pub fn project_from_rtn(a: &Vector3Rtn, frame: &RtnFrame) -> Vector3 {
    frame.r_hat * a.r + frame.theta_hat * a.t + frame.h_hat * a.n
}

/// Versor rates under normal acceleration `a_n`.
pub fn frame_rates(frame: &RtnFrame, a_n: f64) -> FrameRates {
    let w = frame.theta_dot();
    let q = frame.r * a_n / frame.h;
    FrameRates {
        r_hat: frame.theta_hat * w,
        theta_hat: frame.h_hat * q - frame.r_hat * w,
        h_hat: -frame.theta_hat * q,
    }
}

/// Component-wise time derivative of the RTN coordinates of a vector `A`.
///
/// `a_rtn` holds `A` in RTN, `adot_projected` holds `dA/dt` projected on the
/// frame, and `a_n` is the normal acceleration that tilts the frame.
pub fn rtn_component_rates(
    a_rtn: &Vector3Rtn,
    adot_projected: &Vector3Rtn,
    frame: &RtnFrame,
    a_n: f64,
) -> Vector3Rtn {
    let w = frame.theta_dot();
    let q = frame.r * a_n / frame.h;
    Vector3Rtn::new(
        adot_projected.r + w * a_rtn.t,
        adot_projected.t + q * a_rtn.n - w * a_rtn.r,
        adot_projected.n - q * a_rtn.t,
    )
}
