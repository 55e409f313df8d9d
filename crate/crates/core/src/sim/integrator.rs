use crate::error::{Error, Result};
use crate::frame::StateVector;
use crate::Vector3;

/// One classical fourth-order Runge-Kutta step of `r' = v, v' = a(state)`.
pub fn step_rk4<F>(state: &StateVector, mut accel: F, dt: f64) -> Result<StateVector>
where
    F: FnMut(&StateVector) -> Result<Vector3>,
{
    let t0 = state.t;
    let half = 0.5 * dt;

    let k1v = accel(state)?;
    let k1r = state.v;

    let s2 = StateVector::new(state.r + k1r * half, state.v + k1v * half, t0 + half);
    let k2v = accel(&s2)?;
    let k2r = s2.v;

    let s3 = StateVector::new(state.r + k2r * half, state.v + k2v * half, t0 + half);
    let k3v = accel(&s3)?;
    let k3r = s3.v;

    let s4 = StateVector::new(state.r + k3r * dt, state.v + k3v * dt, t0 + dt);
    let k4v = accel(&s4)?;
    let k4r = s4.v;

    let sixth = dt / 6.0;
    let next = StateVector::new(
        state.r + (k1r + (k2r + k3r) * 2.0 + k4r) * sixth,
        state.v + (k1v + (k2v + k3v) * 2.0 + k4v) * sixth,
        t0 + dt,
    );
    if !next.is_finite() {
        return Err(Error::NumericalBlowup { t: t0 + dt });
    }
    Ok(next)
}

/// Inverse-square attraction toward the origin.
pub fn two_body_accel(r: &Vector3, mu: f64) -> Vector3 {
    let rn = r.norm();
    -r * (mu / (rn * rn * rn))
}
