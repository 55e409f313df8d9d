//! Sliding-mode path following onto a conic.
//!
//! Three sliding surfaces are regulated:
//!
//! ```text
//! s1 = e~ . (lambda_R r_hat + theta_hat)    eccentricity error, in-plane
//! s2 = h - h_d                               angular momentum magnitude
//! s3 = h_d_hat . (lambda_N r_hat + theta_hat) orbit plane
//! ```
//!
//! Their rates are affine in the RTN acceleration, `s_dot = F a_rtn + G`, with
//! `F` upper triangular. The full law is `u = -F^-1 (G + K sw(s)) - f_rtn`,
//! where `sw` is either the sign function or a boundary-layer saturation.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{RtnFrame, Vector3Rtn};
use crate::orbit::{eccentricity_rtn, OrbitTarget};
use crate::Vector3;

/// How the boundary layer widths are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum BoundaryLayer {
    /// Φ_j = c K_jj with c < 1 in practice.
    FractionOfGain(f64),
    /// Φ_j = c K_jj with c >= 1 in practice.
    MultipleOfGain(f64),
    /// Fixed widths, in the units of each surface.
    Absolute([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Switching {
    Sign,
    Saturation,
}

/// Standalone plane-control variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalLaw {
    Asymptotic,
    FiniteTime,
}

/// Which control law closes the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", content = "variant", rename_all = "snake_case")]
pub enum ControlLaw {
    /// Full conic following: plane, angular momentum and eccentricity vector.
    Full,
    /// Only the normal command; radial and transverse commands stay zero.
    PlaneOnly(NormalLaw),
}

fn default_margin() -> f64 {
    1.0
}

fn default_law() -> ControlLaw {
    ControlLaw::Full
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    /// eccentricity surface slope (1/rad)
    pub lambda_r: f64,
    /// plane surface slope (1/rad)
    pub lambda_n: f64,
    /// Bounds (D_R, D_T, D_N) on the unknown acceleration, m/s^2.
    pub disturbance_bound: [f64; 3],
    pub boundary_layer: BoundaryLayer,
    pub switching: Switching,
    /// Largest plane error handed to the plane surface at once.
    pub beta_safe_max_deg: f64,
    /// Constant K diagonal replacing the bound-derived gains.
    #[serde(default)]
    pub gain_override: Option<[f64; 3]>,
    /// Multiplies the bound-derived gains.
    #[serde(default = "default_margin")]
    pub gain_margin: f64,
    #[serde(default = "default_law")]
    pub law: ControlLaw,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            lambda_r: 2.0,
            lambda_n: 2.0,
            disturbance_bound: [0.0; 3],
            boundary_layer: BoundaryLayer::FractionOfGain(0.05),
            switching: Switching::Saturation,
            beta_safe_max_deg: 80.0,
            gain_override: None,
            gain_margin: 1.0,
            law: ControlLaw::Full,
        }
    }
}

impl ControllerConfig {
    pub fn beta_safe_max(&self) -> f64 {
        self.beta_safe_max_deg.to_radians()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.lambda_r > 0.0 && self.lambda_r.is_finite()) {
            return bad(format!("lambda_r must be positive, got {}", self.lambda_r));
        }
        if !(self.lambda_n > 0.0 && self.lambda_n.is_finite()) {
            return bad(format!("lambda_n must be positive, got {}", self.lambda_n));
        }
        if self.disturbance_bound.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return bad(format!(
                "disturbance bounds must be non-negative, got {:?}",
                self.disturbance_bound
            ));
        }
        if !(self.beta_safe_max_deg > 0.0 && self.beta_safe_max_deg < 90.0) {
            return bad(format!(
                "beta_safe_max_deg must lie in (0, 90), got {}",
                self.beta_safe_max_deg
            ));
        }
        if !(self.gain_margin >= 0.0 && self.gain_margin.is_finite()) {
            return bad(format!("gain_margin must be >= 0, got {}", self.gain_margin));
        }
        if let Some(k) = self.gain_override {
            if k.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return bad(format!("gain override must be non-negative, got {k:?}"));
            }
        }
        if self.switching == Switching::Saturation {
            let ok = match self.boundary_layer {
                BoundaryLayer::FractionOfGain(c) | BoundaryLayer::MultipleOfGain(c) => {
                    c > 0.0 && c.is_finite()
                }
                BoundaryLayer::Absolute(w) => w.iter().all(|v| *v > 0.0 && v.is_finite()),
            };
            if !ok {
                return bad(format!(
                    "boundary layer widths must be positive, got {:?}",
                    self.boundary_layer
                ));
            }
        }
        Ok(())
    }

    fn widths(&self, k: &[f64; 3]) -> [f64; 3] {
        match self.boundary_layer {
            BoundaryLayer::FractionOfGain(c) | BoundaryLayer::MultipleOfGain(c) => k.map(|v| c * v),
            BoundaryLayer::Absolute(w) => w,
        }
    }
}

/// Everything the full law needs at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlidingState {
    pub s: [f64; 3],
    pub k: [f64; 3],
    pub phi: [f64; 3],
    pub f: Matrix3<f64>,
    pub g: Vector3,
    /// Angle between the current and the desired orbit normal (rad).
    pub beta: f64,
    /// Plane normal actually handed to the plane surface (after safeguarding).
    pub h_d_hat_used: Vector3,
}

impl SlidingState {
    /// True when every surface lies inside its boundary layer.
    pub fn inside_layer(&self) -> bool {
        (0..3).all(|j| self.s[j].abs() <= self.phi[j])
    }
}

/// Commanded acceleration and its bookkeeping flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand {
    pub u_rtn: Vector3Rtn,
    pub u_inertial: Vector3,
    pub saturated: [bool; 3],
    pub blackout: bool,
}

impl ControlCommand {
    pub fn new(u_rtn: Vector3Rtn, frame: &RtnFrame) -> Self {
        Self {
            u_rtn,
            u_inertial: frame.from_rtn(&u_rtn),
            saturated: [false; 3],
            blackout: false,
        }
    }

    pub fn zero() -> Self {
        Self {
            u_rtn: Vector3Rtn::ZERO,
            u_inertial: Vector3::zeros(),
            saturated: [false; 3],
            blackout: false,
        }
    }
}

/// Scalar surface A_T + lambda A_R.
pub fn surface_scalar(a_rtn: &Vector3Rtn, lambda: f64) -> f64 {
    a_rtn.t + lambda * a_rtn.r
}

/// Plane surface h_dT + lambda_N h_dR.
pub fn surface_sn(h_d_hat_rtn: &Vector3Rtn, lambda_n: f64) -> f64 {
    surface_scalar(h_d_hat_rtn, lambda_n)
}

/// Boundary-layer saturation. Equals `sign(s)` outside `|s| <= phi`.
pub fn sat(s: f64, phi: f64) -> f64 {
    if s > phi {
        1.0
    } else if s < -phi {
        -1.0
    } else {
        s / phi
    }
}

/// Sign with sign(0) = 0.
pub fn sign(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The switching term for one surface. A zero width degrades to `sign`.
pub fn switch_term(s: f64, phi: f64, switching: Switching) -> f64 {
    match switching {
        Switching::Saturation if phi > 0.0 => sat(s, phi),
        _ => sign(s),
    }
}

/// V = s.s / 2
pub fn lyapunov_value(s: &[f64; 3]) -> f64 {
    0.5 * s.iter().map(|v| v * v).sum::<f64>()
}

/// Plane-only normal command.
///
/// `sw` is the already evaluated switching term for `s_N`.
#[allow(clippy::too_many_arguments)]
pub fn control_normal(
    frame: &RtnFrame,
    h_d_hat_rtn: &Vector3Rtn,
    f_n: f64,
    k_n: f64,
    lambda_n: f64,
    sw: f64,
    variant: NormalLaw,
) -> Result<f64> {
    let hd = h_d_hat_rtn;
    if !(hd.n > 0.0) {
        return Err(Error::PlaneSingularity { h_dn: hd.n });
    }
    let c = frame.h * frame.h / (frame.r.powi(3) * hd.n);
    let steer = hd.r - lambda_n * hd.t;
    Ok(match variant {
        NormalLaw::Asymptotic => c * steer - k_n * sw - f_n,
        NormalLaw::FiniteTime => c * (steer - k_n * sw - f_n),
    })
}

/// Replaces a desired normal that is too far from the current one by the
/// unit vector `beta_safe_max` away from `h_hat`, rotated toward `h_d_hat`.
pub fn beta_safeguard(h_hat: &Vector3, h_d_hat: &Vector3, beta_safe_max: f64) -> Result<Vector3> {
    let c = h_hat.dot(h_d_hat).clamp(-1.0, 1.0);
    if c <= -1.0 + 1e-12 {
        return Err(Error::AntiParallel);
    }
    if c.acos() < beta_safe_max {
        return Ok(*h_d_hat);
    }
    let w = (h_d_hat - h_hat * c).normalize();
    Ok(h_hat * beta_safe_max.cos() + w * beta_safe_max.sin())
}

/// Angle between two unit vectors, robust near 0 and pi.
pub fn angle_between(a: &Vector3, b: &Vector3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

struct Geometry {
    hd: Vector3Rtn,
    e_err: Vector3Rtn,
    ed: Vector3Rtn,
    h_d_hat_used: Vector3,
}

fn geometry(frame: &RtnFrame, target: &OrbitTarget, config: &ControllerConfig) -> Result<Geometry> {
    let h_d_hat_used = beta_safeguard(&frame.h_hat, &target.h_d_hat(), config.beta_safe_max())?;
    let hd = frame.to_rtn(&h_d_hat_used);
    if !(hd.n > 0.0) {
        return Err(Error::PlaneSingularity { h_dn: hd.n });
    }
    let ed = frame.to_rtn(&target.e_d());
    let e = eccentricity_rtn(frame, target.mu());
    Ok(Geometry {
        hd,
        e_err: e - ed,
        ed,
        h_d_hat_used,
    })
}

fn surfaces(frame: &RtnFrame, target: &OrbitTarget, cfg: &ControllerConfig, g: &Geometry) -> [f64; 3] {
    [
        surface_scalar(&g.e_err, cfg.lambda_r),
        frame.h - target.h_d_mag(),
        surface_sn(&g.hd, cfg.lambda_n),
    ]
}

fn f_and_g(frame: &RtnFrame, target: &OrbitTarget, cfg: &ControllerConfig, g: &Geometry) -> (Matrix3<f64>, Vector3) {
    let (r, h, rd, mu) = (frame.r, frame.h, frame.r_dot, target.mu());
    let f = Matrix3::new(
        -h / mu,
        (2.0 * cfg.lambda_r * h - rd * r) / mu,
        -r * g.ed.n / h,
        0.0,
        r,
        0.0,
        0.0,
        0.0,
        r * g.hd.n / h,
    );
    let w = frame.theta_dot();
    let gv = Vector3::new(
        w * (cfg.lambda_r * g.e_err.t - g.e_err.r - 1.0),
        0.0,
        w * (cfg.lambda_n * g.hd.t - g.hd.r),
    );
    (f, gv)
}

fn bound_gains(frame: &RtnFrame, target: &OrbitTarget, cfg: &ControllerConfig, g: &Geometry) -> [f64; 3] {
    if let Some(k) = cfg.gain_override {
        return k;
    }
    let (r, h, rd, mu) = (frame.r, frame.h, frame.r_dot, target.mu());
    let [dr, dt, dn] = cfg.disturbance_bound;
    let k = match cfg.law {
        ControlLaw::Full => [
            h / mu * dr + (2.0 * cfg.lambda_r * h - rd * r).abs() / mu * dt + r * g.ed.n.abs() / h * dn,
            r * dt,
            r * g.hd.n / h * dn,
        ],
        // the standalone normal law carries K_N in acceleration units
        ControlLaw::PlaneOnly(_) => [0.0, 0.0, dn],
    };
    k.map(|v| v * cfg.gain_margin)
}

/// Sliding vector s.
pub fn surface_vector(frame: &RtnFrame, target: &OrbitTarget, config: &ControllerConfig) -> Result<[f64; 3]> {
    let g = geometry(frame, target, config)?;
    Ok(surfaces(frame, target, config, &g))
}

/// Rate matrices of the sliding vector: `s_dot = F a_rtn + G`.
pub fn build_f_g(
    frame: &RtnFrame,
    target: &OrbitTarget,
    config: &ControllerConfig,
) -> Result<(Matrix3<f64>, Vector3)> {
    let g = geometry(frame, target, config)?;
    Ok(f_and_g(frame, target, config, &g))
}

/// Gain diagonal from the disturbance bounds (or the override).
pub fn gains_from_bounds(
    frame: &RtnFrame,
    target: &OrbitTarget,
    config: &ControllerConfig,
) -> Result<[f64; 3]> {
    let g = geometry(frame, target, config)?;
    Ok(bound_gains(frame, target, config, &g))
}

/// Solves `F x = y` for the upper-triangular `F` by back substitution.
pub fn solve_upper_triangular(f: &Matrix3<f64>, y: &Vector3) -> Vector3 {
    let x3 = y.z / f[(2, 2)];
    let x2 = (y.y - f[(1, 2)] * x3) / f[(1, 1)];
    let x1 = (y.x - f[(0, 1)] * x2 - f[(0, 2)] * x3) / f[(0, 0)];
    Vector3::new(x1, x2, x3)
}

/// Acceleration keeping the sliding vector still: `-F^-1 G`.
pub fn equivalent_accel(
    frame: &RtnFrame,
    target: &OrbitTarget,
    config: &ControllerConfig,
) -> Result<Vector3Rtn> {
    let (f, g) = build_f_g(frame, target, config)?;
    let a = solve_upper_triangular(&f, &(-g));
    Ok(Vector3Rtn::new(a.x, a.y, a.z))
}

/// Surfaces, gains, widths and rate matrices at one instant.
pub fn sliding_state(
    frame: &RtnFrame,
    target: &OrbitTarget,
    config: &ControllerConfig,
) -> Result<SlidingState> {
    let g = geometry(frame, target, config)?;
    let s = surfaces(frame, target, config, &g);
    let (f, gv) = f_and_g(frame, target, config, &g);
    let k = bound_gains(frame, target, config, &g);
    Ok(SlidingState {
        s,
        k,
        phi: config.widths(&k),
        f,
        g: gv,
        beta: angle_between(&frame.h_hat, &target.h_d_hat()),
        h_d_hat_used: g.h_d_hat_used,
    })
}

/// Commanded RTN acceleration for a precomputed sliding state.
pub fn command_from_state(
    frame: &RtnFrame,
    st: &SlidingState,
    f_rtn: &Vector3Rtn,
    config: &ControllerConfig,
) -> Result<Vector3Rtn> {
    let sw: [f64; 3] = std::array::from_fn(|j| switch_term(st.s[j], st.phi[j], config.switching));
    match config.law {
        ControlLaw::Full => {
            let rhs = st.g + Vector3::new(st.k[0] * sw[0], st.k[1] * sw[1], st.k[2] * sw[2]);
            let a = solve_upper_triangular(&st.f, &(-rhs));
            Ok(Vector3Rtn::new(a.x - f_rtn.r, a.y - f_rtn.t, a.z - f_rtn.n))
        }
        ControlLaw::PlaneOnly(variant) => {
            let hd = frame.to_rtn(&st.h_d_hat_used);
            let u_n = control_normal(frame, &hd, f_rtn.n, st.k[2], config.lambda_n, sw[2], variant)?;
            Ok(Vector3Rtn::new(0.0, 0.0, u_n))
        }
    }
}

/// Full path-following command `u = -F^-1 (G + K sw(s)) - f_rtn`.
pub fn control_full(
    frame: &RtnFrame,
    target: &OrbitTarget,
    f_rtn: &Vector3Rtn,
    config: &ControllerConfig,
) -> Result<ControlCommand> {
    let st = sliding_state(frame, target, config)?;
    let u = command_from_state(frame, &st, f_rtn, config)?;
    Ok(ControlCommand::new(u, frame))
}
