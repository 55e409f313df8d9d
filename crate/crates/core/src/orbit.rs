//! Two-body invariants and conic targets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{build_frame, RtnFrame, StateVector, Vector3Rtn};
use crate::Vector3;

/// The conic the particle should follow, expressed through the two vector
/// invariants of Keplerian motion and the design parameter `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTarget", into = "RawTarget")]
pub struct OrbitTarget {
    h_d: Vector3,
    e_d: Vector3,
    mu: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTarget {
    /// desired specific angular momentum (m^2/s)
    h_d: [f64; 3],
    /// desired eccentricity vector
    e_d: [f64; 3],
    /// design gravitational parameter (m^3/s^2)
    mu: f64,
}

impl TryFrom<RawTarget> for OrbitTarget {
    type Error = Error;
    fn try_from(raw: RawTarget) -> Result<Self> {
        OrbitTarget::new(raw.h_d.into(), raw.e_d.into(), raw.mu)
    }
}

impl From<OrbitTarget> for RawTarget {
    fn from(t: OrbitTarget) -> Self {
        RawTarget {
            h_d: t.h_d.into(),
            e_d: t.e_d.into(),
            mu: t.mu,
        }
    }
}

/// Relative tolerance on `h_d . e_d = 0`.
pub const PERPENDICULARITY_TOL: f64 = 1e-9;

impl OrbitTarget {
    pub fn new(h_d: Vector3, e_d: Vector3, mu: f64) -> Result<Self> {
        let h = h_d.norm();
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidTarget(format!("|h_d| must be positive, got {h}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidTarget(format!("mu must be positive, got {mu}")));
        }
        if !e_d.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidTarget("non-finite eccentricity vector".into()));
        }
        let dot = h_d.dot(&e_d);
        if dot.abs() > PERPENDICULARITY_TOL * h {
            return Err(Error::InvalidTarget(format!(
                "h_d . e_d = {dot:e}, must vanish"
            )));
        }
        Ok(Self { h_d, e_d, mu })
    }

    pub fn h_d(&self) -> Vector3 {
        self.h_d
    }

    pub fn h_d_mag(&self) -> f64 {
        self.h_d.norm()
    }

    pub fn h_d_hat(&self) -> Vector3 {
        self.h_d / self.h_d.norm()
    }

    pub fn e_d(&self) -> Vector3 {
        self.e_d
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// p = h_d^2 / mu (m)
    pub fn semi_latus_rectum(&self) -> f64 {
        self.h_d.norm_squared() / self.mu
    }

    /// Unit vector toward periapsis, or an arbitrary in-plane direction for circles.
    pub fn periapsis_dir(&self) -> Vector3 {
        let e = self.e_d.norm();
        if e > 1e-12 {
            self.e_d / e
        } else {
            let n = self.h_d_hat();
            let seed = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            (seed - n * n.dot(&seed)).normalize()
        }
    }

    /// Position on the conic at true anomaly `nu` (rad).
    pub fn position_at(&self, nu: f64) -> Vector3 {
        let p_hat = self.periapsis_dir();
        let q_hat = self.h_d_hat().cross(&p_hat);
        let radius = self.semi_latus_rectum() / (1.0 + self.e_d.norm() * nu.cos());
        (p_hat * nu.cos() + q_hat * nu.sin()) * radius
    }

    /// Velocity on the conic at true anomaly `nu`, in the sense of `h_d`.
    pub fn velocity_at(&self, nu: f64) -> Vector3 {
        let p_hat = self.periapsis_dir();
        let q_hat = self.h_d_hat().cross(&p_hat);
        let k = self.mu / self.h_d.norm();
        let e = self.e_d.norm();
        (p_hat * (-nu.sin()) + q_hat * (e + nu.cos())) * k
    }

    /// State on the conic at true anomaly `nu`.
    pub fn state_at(&self, nu: f64, t: f64) -> StateVector {
        StateVector::new(self.position_at(nu), self.velocity_at(nu), t)
    }

    /// Samples the conic in true anomaly. Open conics are clipped `margin`
    /// radians short of their asymptotes.
    pub fn sample(&self, n: usize, margin: f64) -> Vec<Vector3> {
        let e = self.e_d.norm();
        let (lo, hi) = if e < 1.0 {
            (-PI, PI)
        } else {
            let lim = (-1.0 / e).acos() - margin;
            (-lim, lim)
        };
        (0..n)
            .map(|i| {
                let nu = lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
                self.position_at(nu)
            })
            .collect()
    }

    /// Approximate geometric distance (m) from `r` to the conic: the
    /// out-of-plane offset combined with the radial miss at the same
    /// true anomaly.
    pub fn conic_residual(&self, r: &Vector3) -> f64 {
        let n = self.h_d_hat();
        let off = r.dot(&n);
        let in_plane = r - n * off;
        let rho = in_plane.norm();
        let p_hat = self.periapsis_dir();
        let q_hat = n.cross(&p_hat);
        let nu = in_plane.dot(&q_hat).atan2(in_plane.dot(&p_hat));
        let denom = 1.0 + self.e_d.norm() * nu.cos();
        let radial = if denom > 1e-12 {
            rho - self.semi_latus_rectum() / denom
        } else {
            f64::INFINITY
        };
        off.hypot(radial)
    }
}

/// Designer-friendly conic parameterisation. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicElements {
    /// semi-latus rectum (m)
    pub p: f64,
    pub e: f64,
    pub raan: f64,
    pub inc: f64,
    pub argp: f64,
}

/// h = r x v
pub fn specific_angular_momentum(state: &StateVector) -> Vector3 {
    state.r.cross(&state.v)
}

/// e = (v x h - mu r_hat) / mu
pub fn eccentricity_vector(state: &StateVector, mu: f64) -> Result<Vector3> {
    check_mu(mu)?;
    let frame = build_frame(state)?;
    let h = specific_angular_momentum(state);
    Ok((state.v.cross(&h) - frame.r_hat * mu) / mu)
}

/// Closed-form RTN components of the eccentricity vector.
pub fn eccentricity_rtn(frame: &RtnFrame, mu: f64) -> Vector3Rtn {
    Vector3Rtn::new(
        (frame.h * frame.h / frame.r - mu) / mu,
        -frame.r_dot * frame.h / mu,
        0.0,
    )
}

/// Time derivative of the eccentricity vector, projected on RTN, under total
/// acceleration `a_rtn`.
pub fn eccentricity_rtn_rate(frame: &RtnFrame, a_rtn: &Vector3Rtn, mu: f64) -> Vector3Rtn {
    let (r, h, rd) = (frame.r, frame.h, frame.r_dot);
    Vector3Rtn::new(
        2.0 * h * a_rtn.t / mu,
        (-h * a_rtn.r - rd * r * a_rtn.t - mu * h / (r * r)) / mu,
        -rd * r * a_rtn.n / mu,
    )
}

/// E = v^2/2 - mu/r
pub fn specific_energy(state: &StateVector, mu: f64) -> f64 {
    0.5 * state.v.norm_squared() - mu / state.r.norm()
}

/// Gravitational parameter that gives a closed conic with angular momentum
/// `h` and eccentricity `e` the orbital period `period`.
pub fn mu_from_period(period: f64, h: f64, e: f64) -> Result<f64> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidTarget(format!("period must be positive, got {period}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidTarget(format!("h must be positive, got {h}")));
    }
    if !(0.0..1.0).contains(&e) {
        return Err(Error::InvalidTarget(format!(
            "no period exists for eccentricity {e}"
        )));
    }
    let one_m_e2 = 1.0 - e * e;
    Ok((4.0 * PI * PI * h.powi(6) / (period * period * one_m_e2.powi(3))).powf(0.25))
}

/// Builds a target from conic elements.
pub fn target_from_elements(el: &ConicElements, mu: f64) -> Result<OrbitTarget> {
    if !(el.p > 0.0 && el.p.is_finite()) {
        return Err(Error::InvalidTarget(format!("p must be positive, got {}", el.p)));
    }
    if !(el.e >= 0.0 && el.e.is_finite()) {
        return Err(Error::InvalidTarget(format!("e must be >= 0, got {}", el.e)));
    }
    if !(0.0..=PI).contains(&el.inc) {
        return Err(Error::InvalidTarget(format!(
            "inclination must lie in [0, pi], got {}",
            el.inc
        )));
    }
    if !(el.raan.is_finite() && el.argp.is_finite()) {
        return Err(Error::InvalidTarget("non-finite angle".into()));
    }
    check_mu(mu).map_err(|_| Error::InvalidTarget(format!("mu must be positive, got {mu}")))?;
    let (so, co) = el.raan.sin_cos();
    let (si, ci) = el.inc.sin_cos();
    let (sw, cw) = el.argp.sin_cos();
    let normal = Vector3::new(si * so, -si * co, ci);
    let periapsis = Vector3::new(
        co * cw - so * sw * ci,
        so * cw + co * sw * ci,
        sw * si,
    );
    OrbitTarget::new(normal * (mu * el.p).sqrt(), periapsis * el.e, mu)
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("mu must be positive, got {mu}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::build_frame;

    #[test]
    fn angular_momentum_trivial_cases() {
        let s = StateVector::new(Vector3::x(), Vector3::y(), 0.0);
        assert_eq!(specific_angular_momentum(&s), Vector3::z());
        let s = StateVector::new(Vector3::x(), Vector3::x() * 3.0, 0.0);
        assert_eq!(specific_angular_momentum(&s), Vector3::zeros());
    }

    #[test]
    fn circular_orbit_has_zero_eccentricity() {
        let mu = 3.2e5;
        let s = StateVector::new(
            Vector3::new(1000.0, 0.0, 0.0),
            Vector3::new(0.0, (mu / 1000.0f64).sqrt(), 0.0),
            0.0,
        );
        assert!(eccentricity_vector(&s, mu).unwrap().norm() < 1e-12);
        let f = build_frame(&s).unwrap();
        let e = eccentricity_rtn(&f, mu);
        assert!(e.r.abs() < 1e-12 && e.t.abs() < 1e-12);
        assert_eq!(e.n, 0.0);
    }

    #[test]
    fn periapsis_state_points_eccentricity_outward() {
        // Vis-viva at periapsis of p = 2, e = 0.5: r_p = p/(1+e), v_p = sqrt(mu (1+e)/r_p).
        let (mu, p, e): (f64, f64, f64) = (1.0, 2.0, 0.5);
        let rp = p / (1.0 + e);
        let vp = (mu * (1.0 + e) / rp).sqrt();
        let s = StateVector::new(Vector3::new(rp, 0.0, 0.0), Vector3::new(0.0, vp, 0.0), 0.0);
        let ev = eccentricity_vector(&s, mu).unwrap();
        assert!((ev - Vector3::new(0.5, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn circular_eccentricity_rate_direct_substitution() {
        let mu = 1.0;
        let s = StateVector::new(Vector3::x() * 2.0, Vector3::y() * (0.5f64).sqrt(), 0.0);
        let f = build_frame(&s).unwrap();
        let rate = eccentricity_rtn_rate(&f, &Vector3Rtn::ZERO, mu);
        assert_eq!(rate.r, 0.0);
        assert!((rate.t + f.h / (f.r * f.r)).abs() < 1e-15);
        let at = 0.3;
        let rate = eccentricity_rtn_rate(&f, &Vector3Rtn::new(0.0, at, 0.0), mu);
        assert_eq!(rate.r, 2.0 * f.h * at / mu);
    }

    #[test]
    fn energy_of_circular_orbit() {
        let (mu, radius) = (4.0, 3.0);
        let s = StateVector::new(Vector3::x() * radius, Vector3::z() * (mu / radius).sqrt(), 0.0);
        assert!((specific_energy(&s, mu) + mu / (2.0 * radius)).abs() < 1e-15);
    }

    #[test]
    fn parabolic_state_has_zero_energy() {
        let t = target_from_elements(
            &ConicElements { p: 3.0, e: 1.0, raan: 0.4, inc: 0.7, argp: 1.1 },
            2.0,
        )
        .unwrap();
        for nu in [-2.0, -0.5, 0.0, 1.3] {
            let s = t.state_at(nu, 0.0);
            assert!(specific_energy(&s, 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mu_from_period_canonical_and_errors() {
        assert!((mu_from_period(2.0 * PI, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(mu_from_period(10.0, 1.0, 1.0), Err(Error::InvalidTarget(_))));
        assert!(matches!(mu_from_period(10.0, 1.0, 1.5), Err(Error::InvalidTarget(_))));
        assert!(mu_from_period(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn mu_from_period_reproduces_period() {
        let (period, h, e) = (100.0, 12566.36, 0.6);
        let mu = mu_from_period(period, h, e).unwrap();
        let a = h * h / (mu * (1.0 - e * e));
        let back = 2.0 * PI * (a.powi(3) / mu).sqrt();
        assert!(((back - period) / period).abs() < 1e-12);
        assert!((mu / 4.93e5 - 1.0).abs() < 0.01, "mu = {mu}");
        assert!((a / 500.0 - 1.0).abs() < 0.01, "a = {a}");
    }

    #[test]
    fn planar_canonical_elements() {
        let t = target_from_elements(
            &ConicElements { p: 1.0, e: 0.5, raan: 0.0, inc: 0.0, argp: 0.0 },
            1.0,
        )
        .unwrap();
        assert!((t.h_d_hat() - Vector3::z()).norm() < 1e-15);
        assert!((t.e_d() - Vector3::x() * 0.5).norm() < 1e-15);
    }

    #[test]
    fn circular_elements_ignore_argp() {
        let t = target_from_elements(
            &ConicElements { p: 1.0, e: 0.0, raan: 0.3, inc: 0.2, argp: 2.0 },
            1.0,
        )
        .unwrap();
        assert_eq!(t.e_d(), Vector3::zeros());
    }

    #[test]
    fn target_rejects_bad_inputs() {
        assert!(OrbitTarget::new(Vector3::z(), Vector3::z() * 0.1, 1.0).is_err());
        assert!(OrbitTarget::new(Vector3::zeros(), Vector3::x(), 1.0).is_err());
        assert!(OrbitTarget::new(Vector3::z(), Vector3::x(), 0.0).is_err());
        let bad = ConicElements { p: -1.0, e: 0.1, raan: 0.0, inc: 0.0, argp: 0.0 };
        assert!(target_from_elements(&bad, 1.0).is_err());
        let bad = ConicElements { p: 1.0, e: 0.1, raan: 0.0, inc: 4.0, argp: 0.0 };
        assert!(target_from_elements(&bad, 1.0).is_err());
    }

    #[test]
    fn conic_samples_lie_on_conic() {
        for e in [0.0, 0.3, 1.4] {
            let t = target_from_elements(
                &ConicElements { p: 5.0, e, raan: 0.2, inc: 0.9, argp: -0.4 },
                1.0,
            )
            .unwrap();
            for r in t.sample(181, 0.05) {
                assert!(t.conic_residual(&r) < 1e-12, "e = {e}");
            }
        }
    }

    #[test]
    fn conic_states_reproduce_target_invariants() {
        let t = target_from_elements(
            &ConicElements { p: 320.0, e: 0.6, raan: 1.0, inc: 2.0, argp: 0.5 },
            4.9e5,
        )
        .unwrap();
        for nu in [-3.0, -1.0, 0.0, 0.5, 2.9] {
            let s = t.state_at(nu, 0.0);
            let h = specific_angular_momentum(&s);
            let e = eccentricity_vector(&s, t.mu()).unwrap();
            assert!((h - t.h_d()).norm() / t.h_d_mag() < 1e-12);
            assert!((e - t.e_d()).norm() < 1e-12);
        }
    }
}
