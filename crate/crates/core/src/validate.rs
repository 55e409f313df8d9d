//! Property suites over randomized states, used as a release gate.
//!
//! Every suite is deterministic for a given seed. A [`Fault`] can be
//! injected to confirm the suites actually detect broken controllers.

use nalgebra::{Rotation3, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::control::{
    build_f_g, command_from_state, sliding_state, solve_upper_triangular, surface_vector,
    ControllerConfig, Switching,
};
use crate::error::Result;
use crate::frame::{build_frame, RtnFrame, StateVector, Vector3Rtn};
use crate::orbit::{
    eccentricity_vector, specific_angular_momentum, specific_energy, target_from_elements,
    ConicElements, OrbitTarget,
};
pub use crate::scenario::decay_scenario;
use crate::scenario::{decay_slope, settled_capture};
use crate::sim::{step_rk4, two_body_accel};
use crate::Vector3;

/// Deliberate controller defects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// gains at half the disturbance bound
    HalveGain,
    /// wrong sign on the a_N coupling of the eccentricity surface
    FlipF13,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub samples: usize,
    pub seed: u64,
    pub fault: Fault,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 7,
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// worst observed value of the suite's figure of merit
    pub worst: f64,
    pub detail: String,
}

impl SuiteReport {
    fn new(name: &str, checked: usize, failures: usize, worst: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: failures == 0 && checked > 0,
            checked,
            failures,
            worst,
            detail,
        }
    }
}

/// A random state, a random target whose plane is within 60 degrees of the
/// state's, and random disturbance bounds. Units are normalized (r ~ 1).
#[derive(Debug, Clone, Copy)]
pub struct RandomCase {
    pub state: StateVector,
    pub target: OrbitTarget,
    pub bounds: [f64; 3],
}

fn unit<R: Rng>(rng: &mut R) -> Vector3 {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_case<R: Rng>(rng: &mut R) -> RandomCase {
    let (r, v) = loop {
        let r = unit(rng) * rng.gen_range(0.5..2.0);
        let v = unit(rng) * rng.gen_range(0.5..1.5);
        if r.cross(&v).norm() > 0.3 * r.norm() * v.norm() {
            break (r, v);
        }
    };
    let h = r.cross(&v);
    let h_hat = h.normalize();
    let axis = h_hat.cross(&unit(rng));
    let tilt = rng.gen_range(0.0..60f64.to_radians());
    let h_d_hat = if axis.norm() > 1e-6 {
        Rotation3::from_axis_angle(&Unit::new_normalize(axis), tilt) * h_hat
    } else {
        h_hat
    };
    let h_d = h_d_hat * h.norm() * rng.gen_range(0.5..1.5);
    let e_dir = h_d_hat.cross(&unit(rng)).normalize();
    let e_d = e_dir * rng.gen_range(0.0..1.5);
    let mu = rng.gen_range(0.5..2.0);
    let target = OrbitTarget::new(h_d, e_d, mu).expect("perpendicular by construction");
    let bounds = std::array::from_fn(|_| rng.gen_range(0.01..0.5));
    RandomCase {
        state: StateVector::new(r, v, 0.0),
        target,
        bounds,
    }
}

fn config_for(bounds: [f64; 3], fault: Fault, switching: Switching) -> ControllerConfig {
    ControllerConfig {
        disturbance_bound: bounds,
        switching,
        gain_margin: if fault == Fault::HalveGain { 0.5 } else { 1.0 },
        ..ControllerConfig::default()
    }
}

/// F and G with the fault applied.
fn faulted_f_g(
    frame: &RtnFrame,
    target: &OrbitTarget,
    cfg: &ControllerConfig,
    fault: Fault,
) -> Result<(nalgebra::Matrix3<f64>, Vector3)> {
    let (mut f, g) = build_f_g(frame, target, cfg)?;
    if fault == Fault::FlipF13 {
        f[(0, 2)] = -f[(0, 2)];
    }
    Ok((f, g))
}

/// RTN rotation is orthonormal and right-handed, and the normal is along r x v.
pub fn suite_frame_orthonormality(opts: &ValidationOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    let mut fails = 0;
    for _ in 0..opts.samples {
        let c = random_case(&mut rng);
        let Ok(fr) = build_frame(&c.state) else {
            fails += 1;
            continue;
        };
        let m = fr.rotation();
        let ortho = (m * m.transpose() - nalgebra::Matrix3::identity()).amax();
        let det = (m.determinant() - 1.0).abs();
        let h = c.state.r.cross(&c.state.v).normalize();
        let along = (fr.h_hat - h).amax();
        let err = ortho.max(det).max(along);
        worst = worst.max(err);
        if err > 1e-12 {
            fails += 1;
        }
    }
    SuiteReport::new("frame-orthonormality", opts.samples, fails, worst, "max |R R^T - I|, |det R - 1|, |h_hat - (r x v)/|r x v||; tolerance 1e-12".into())
}

/// Relative drift of h, e and energy after one period of pure inverse-square
/// propagation at dt = T / 10^4.
pub fn two_body_drift(e: f64) -> Result<[f64; 3]> {
    let mu = 1.0;
    let p = 1.0;
    let target = target_from_elements(
        &ConicElements {
            p,
            e,
            raan: 0.4,
            inc: 0.7,
            argp: 1.1,
        },
        mu,
    )?;
    let a = p / (1.0 - e * e);
    let period = 2.0 * std::f64::consts::PI * (a * a * a / mu).sqrt();
    let steps = 10_000;
    let dt = period / steps as f64;
    let s0 = target.state_at(0.3, 0.0);
    let mut s = s0;
    for _ in 0..steps {
        s = step_rk4(&s, |x| Ok(two_body_accel(&x.r, mu)), dt)?;
    }
    let h0 = specific_angular_momentum(&s0);
    let h1 = specific_angular_momentum(&s);
    let e0 = eccentricity_vector(&s0, mu)?;
    let e1 = eccentricity_vector(&s, mu)?;
    let en0 = specific_energy(&s0, mu);
    let en1 = specific_energy(&s, mu);
    Ok([
        (h1 - h0).norm() / h0.norm(),
        (e1 - e0).norm(),
        ((en1 - en0) / en0).abs(),
    ])
}

pub fn suite_conservation(_opts: &ValidationOptions) -> SuiteReport {
    let mut worst = 0.0f64;
    let mut fails = 0;
    let ecc = [0.0, 0.3, 0.6];
    for e in ecc {
        match two_body_drift(e) {
            Ok(d) => {
                let m = d.iter().cloned().fold(0.0, f64::max);
                worst = worst.max(m);
                if m >= 1e-9 {
                    fails += 1;
                }
            }
            Err(_) => fails += 1,
        }
    }
    SuiteReport::new("conservation", ecc.len(), fails, worst, "one period, dt = T/1e4, e in {0, 0.3, 0.6}; |dh|/h, |de|, |dE/E| < 1e-9".into())
}

/// Back substitution inverts F and det F matches -r^2 h_dN / mu.
pub fn suite_f_inverse(opts: &ValidationOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x11);
    let mut worst = 0.0f64;
    let mut fails = 0;
    for _ in 0..opts.samples {
        let c = random_case(&mut rng);
        let cfg = config_for(c.bounds, opts.fault, Switching::Saturation);
        let Ok(frame) = build_frame(&c.state) else {
            fails += 1;
            continue;
        };
        let Ok((f, _)) = faulted_f_g(&frame, &c.target, &cfg, opts.fault) else {
            fails += 1;
            continue;
        };
        let y = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x = solve_upper_triangular(&f, &y);
        let resid = (f * x - y).norm() / (f.norm() * x.norm() + y.norm());
        let h_dn = frame.to_rtn(&c.target.h_d_hat()).n;
        let det = -frame.r * frame.r * h_dn / c.target.mu();
        let det_err = (f.determinant() - det).abs() / det.abs();
        let err = resid.max(det_err);
        worst = worst.max(err);
        if err > 1e-10 {
            fails += 1;
        }
    }
    SuiteReport::new("f-inverse", opts.samples, fails, worst, "relative residual of F x = y and of det F; tolerance 1e-10".into())
}

/// Fourth-order central difference of the sliding vector along the exact trajectory under
/// a constant RTN acceleration held in inertial axes.
pub fn surface_rate_fd(
    state: &StateVector,
    a_inertial: &Vector3,
    target: &OrbitTarget,
    cfg: &ControllerConfig,
    delta: f64,
) -> Result<[f64; 3]> {
    let at = |tau: f64| -> Result<[f64; 3]> {
        let r = state.r + state.v * tau + a_inertial * (0.5 * tau * tau);
        let v = state.v + a_inertial * tau;
        let fr = build_frame(&StateVector::new(r, v, state.t + tau))?;
        surface_vector(&fr, target, cfg)
    };
    let (p1, m1, p2, m2) = (at(delta)?, at(-delta)?, at(2.0 * delta)?, at(-2.0 * delta)?);
    Ok(std::array::from_fn(|j| {
        (8.0 * (p1[j] - m1[j]) - (p2[j] - m2[j])) / (12.0 * delta)
    }))
}

/// The equivalent acceleration has a null transverse component and holds
/// the sliding vector still (checked by finite differences, not through F).
pub fn suite_equivalent_control(opts: &ValidationOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x22);
    let mut worst = 0.0f64;
    let mut fails = 0;
    for _ in 0..opts.samples {
        let c = random_case(&mut rng);
        let cfg = config_for(c.bounds, opts.fault, Switching::Saturation);
        let Ok(frame) = build_frame(&c.state) else {
            fails += 1;
            continue;
        };
        let Ok((f, g)) = faulted_f_g(&frame, &c.target, &cfg, opts.fault) else {
            fails += 1;
            continue;
        };
        let a = solve_upper_triangular(&f, &(-g));
        let a_in = frame.from_rtn(&Vector3Rtn::new(a.x, a.y, a.z));
        let an = a.norm().max(1e-12);
        let delta = 5e-4 * (1.0 / frame.theta_dot()).min(c.state.v.norm() / an).min((frame.r / an).sqrt());
        let Ok(sdot) = surface_rate_fd(&c.state, &a_in, &c.target, &cfg, delta) else {
            fails += 1;
            continue;
        };
        // magnitude of each rate term, floored by the r |a| a bare push gives h
        let floor = frame.r * a.norm() + 1e-12;
        let scale = (f.abs() * a.abs() + g.abs()).map(|x| x.max(floor));
        let rate_err = (0..3).map(|j| sdot[j].abs() / scale[j]).fold(0.0, f64::max);
        let err = rate_err.max(a.y.abs());
        worst = worst.max(err);
        if a.y.abs() >= 1e-12 || rate_err > 1e-8 {
            fails += 1;
        }
    }
    SuiteReport::new("equivalent-control", opts.samples, fails, worst, "|a_T,eq| < 1e-12 and finite-difference |s_dot_j| / scale_j < 1e-8 under a_eq".into())
}

/// Fitted slope of ln|e~_R| against the swept angle for [`decay_scenario`],
/// once every surface has settled deep inside its layer. Should be -lambda_r.
pub fn decay_experiment(lambda_r: f64) -> Result<f64> {
    let scenario = decay_scenario(lambda_r);
    let log = scenario.run()?;
    let tc = settled_capture(&log.records, log.control_dt)
        .ok_or_else(|| crate::Error::InvalidConfig("surfaces never settled".into()))?;
    decay_slope(&log.records, &scenario.guidance, tc, 1e-9)
        .ok_or_else(|| crate::Error::InvalidConfig("too few samples for a slope".into()))
}

pub const DECAY_LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

pub fn suite_decay_slope(_opts: &ValidationOptions) -> SuiteReport {
    let mut worst = 0.0f64;
    let mut fails = 0;
    let mut parts = Vec::new();
    for lam in DECAY_LAMBDAS {
        match decay_experiment(lam) {
            Ok(slope) => {
                let rel = (slope + lam).abs() / lam;
                worst = worst.max(rel);
                parts.push(format!("{lam}: {slope:.4}"));
                if rel > 0.05 {
                    fails += 1;
                }
            }
            Err(e) => {
                parts.push(format!("{lam}: {e}"));
                fails += 1;
            }
        }
    }
    SuiteReport::new("decay-slope", DECAY_LAMBDAS.len(), fails, worst, format!("slope vs -lambda_r within 5% ({})", parts.join(", ")))
}

/// Monte-Carlo over bounded disturbances: the induced surface rate F d never
/// exceeds the gain diagonal.
pub fn suite_gain_bound(opts: &ValidationOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x33);
    let mut worst = 0.0f64;
    let mut fails = 0;
    for _ in 0..opts.samples {
        let c = random_case(&mut rng);
        let cfg = config_for(c.bounds, opts.fault, Switching::Saturation);
        let Ok(frame) = build_frame(&c.state) else {
            fails += 1;
            continue;
        };
        let Ok(st) = sliding_state(&frame, &c.target, &cfg) else {
            fails += 1;
            continue;
        };
        let d = Vector3::from_fn(|j, _| c.bounds[j] * rng.gen_range(-1.0..=1.0));
        let alpha = st.f * d;
        let ratio = (0..3)
            .map(|j| alpha[j].abs() / st.k[j])
            .fold(0.0, f64::max);
        worst = worst.max(ratio);
        if ratio > 1.0 + 1e-12 {
            fails += 1;
        }
    }
    SuiteReport::new("gain-bound", opts.samples, fails, worst, "max_j |(F d)_j| / K_jj over |d_j| <= D_j; must stay <= 1".into())
}

/// One short closed-loop step under sign switching and a worst-case bounded
/// disturbance d_j = 0.9 D_j sign((F^T s)_j): V = s.s/2 must drop.
pub fn suite_lyapunov_decrease(opts: &ValidationOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x44);
    let mut worst = f64::NEG_INFINITY;
    let mut fails = 0;
    let mut checked = 0;
    for _ in 0..opts.samples {
        let c = random_case(&mut rng);
        let cfg = config_for(c.bounds, opts.fault, Switching::Sign);
        let Ok(frame) = build_frame(&c.state) else {
            fails += 1;
            continue;
        };
        let Ok(mut st) = sliding_state(&frame, &c.target, &cfg) else {
            fails += 1;
            continue;
        };
        if st.s.iter().any(|s| s.abs() < 1e-3) {
            continue;
        }
        let s = Vector3::from(st.s);
        let ft_s = st.f.transpose() * s;
        let d_rtn = Vector3Rtn::new(
            0.9 * c.bounds[0] * ft_s.x.signum(),
            0.9 * c.bounds[1] * ft_s.y.signum(),
            0.9 * c.bounds[2] * ft_s.z.signum(),
        );
        if opts.fault == Fault::FlipF13 {
            st.f[(0, 2)] = -st.f[(0, 2)];
        }
        let mu = c.target.mu();
        let f_rtn = frame.to_rtn(&two_body_accel(&c.state.r, mu));
        let Ok(u) = command_from_state(&frame, &st, &f_rtn, &cfg) else {
            fails += 1;
            continue;
        };
        let push = frame.from_rtn(&(u + d_rtn));
        let dt = 1e-6 / frame.theta_dot();
        let Ok(next) = step_rk4(&c.state, |x| Ok(two_body_accel(&x.r, mu) + push), dt) else {
            fails += 1;
            continue;
        };
        let Ok(s1) = build_frame(&next).and_then(|fr| surface_vector(&fr, &c.target, &cfg)) else {
            fails += 1;
            continue;
        };
        checked += 1;
        let v0 = 0.5 * s.norm_squared();
        let v1 = 0.5 * Vector3::from(s1).norm_squared();
        let change = (v1 - v0) / (v0 * dt * frame.theta_dot());
        worst = worst.max(change);
        if v1 >= v0 {
            fails += 1;
        }
    }
    SuiteReport::new("lyapunov-decrease", checked, fails, worst, "worst-case bounded disturbance, sign switching; V must strictly drop over one step".into())
}

/// Runs every suite in a fixed order.
pub fn run_all(opts: &ValidationOptions) -> Vec<SuiteReport> {
    vec![
        suite_frame_orthonormality(opts),
        suite_conservation(opts),
        suite_f_inverse(opts),
        suite_equivalent_control(opts),
        suite_decay_slope(opts),
        suite_gain_bound(opts),
        suite_lyapunov_decrease(opts),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ValidationOptions {
        ValidationOptions {
            samples: 300,
            ..ValidationOptions::default()
        }
    }

    #[test]
    fn random_cases_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let c = random_case(&mut rng);
            let fr = build_frame(&c.state).unwrap();
            assert!(fr.to_rtn(&c.target.h_d_hat()).n > 0.49);
        }
    }

    #[test]
    fn clean_suites_pass() {
        let o = small();
        for rep in [
            suite_frame_orthonormality(&o),
            suite_f_inverse(&o),
            suite_equivalent_control(&o),
            suite_gain_bound(&o),
            suite_lyapunov_decrease(&o),
        ] {
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn faults_are_caught() {
        let half = ValidationOptions {
            fault: Fault::HalveGain,
            ..small()
        };
        assert!(!suite_lyapunov_decrease(&half).passed);
        let flip = ValidationOptions {
            fault: Fault::FlipF13,
            ..small()
        };
        assert!(!suite_equivalent_control(&flip).passed);
    }
}
