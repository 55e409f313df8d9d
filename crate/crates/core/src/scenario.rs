//! Built-in experiments, checkpoint switching and run metrics.

use serde::{Deserialize, Serialize};

use crate::control::{BoundaryLayer, ControllerConfig, Switching};
use crate::error::{Error, Result};
use crate::frame::StateVector;
use crate::orbit::{mu_from_period, target_from_elements, ConicElements, OrbitTarget};
use crate::sim::{
    run_simulation, AccelModel, DumbbellParams, LogRecord, Plant, RunInputs, SimConfig, SrpParams,
    Termination, TrajectoryLog, VelocityLaw,
};
use crate::Vector3;

/// Hysteresis band of checkpoint switching, as a fraction of the nearest distance.
pub const DEFAULT_HYSTERESIS: f64 = 0.01;

fn default_hysteresis() -> f64 {
    DEFAULT_HYSTERESIS
}

/// Which conic is followed, and relative to which point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Guidance {
    /// One conic about the origin (or about the moving point, when present).
    Single { target: OrbitTarget },
    /// One conic per checkpoint; the nearest checkpoint is active.
    Checkpoints {
        checkpoints: Vec<[f64; 3]>,
        targets: Vec<OrbitTarget>,
        #[serde(default = "default_hysteresis")]
        hysteresis: f64,
    },
}

impl Guidance {
    pub fn single(target: OrbitTarget) -> Self {
        Guidance::Single { target }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Guidance::Single { .. } => Ok(()),
            Guidance::Checkpoints {
                checkpoints,
                targets,
                hysteresis,
            } => {
                if checkpoints.is_empty() || checkpoints.len() != targets.len() {
                    return Err(Error::InvalidConfig(format!(
                        "need one target per checkpoint, got {} checkpoints and {} targets",
                        checkpoints.len(),
                        targets.len()
                    )));
                }
                if !(*hysteresis >= 0.0) {
                    return Err(Error::InvalidConfig("hysteresis must be >= 0".into()));
                }
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Guidance::Single { .. } => 1,
            Guidance::Checkpoints { targets, .. } => targets.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn target(&self, idx: usize) -> &OrbitTarget {
        match self {
            Guidance::Single { target } => target,
            Guidance::Checkpoints { targets, .. } => &targets[idx],
        }
    }

    /// Point the active conic is centred on.
    pub fn anchor(&self, idx: usize) -> Vector3 {
        match self {
            Guidance::Single { .. } => Vector3::zeros(),
            Guidance::Checkpoints { checkpoints, .. } => Vector3::from(checkpoints[idx]),
        }
    }

    pub fn select(&self, r_inertial: &Vector3, previous: Option<usize>) -> usize {
        match self {
            Guidance::Single { .. } => 0,
            Guidance::Checkpoints {
                checkpoints,
                hysteresis,
                ..
            } => switch_checkpoint(r_inertial, checkpoints, previous, *hysteresis),
        }
    }
}

/// Index of the nearest checkpoint, lowest index on ties. The previous index
/// is kept while its distance stays within `(1 + band)` of the nearest one.
pub fn switch_checkpoint(
    r_inertial: &Vector3,
    checkpoints: &[[f64; 3]],
    previous: Option<usize>,
    band: f64,
) -> usize {
    let dist = |c: &[f64; 3]| (r_inertial - Vector3::from(*c)).norm();
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in checkpoints.iter().enumerate() {
        let d = dist(c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    match previous {
        Some(p) if p < checkpoints.len() && dist(&checkpoints[p]) <= best_d * (1.0 + band) => p,
        _ => best,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    /// inertial position (m)
    pub r: [f64; 3],
    /// inertial velocity (m/s)
    pub v: [f64; 3],
}

impl InitialState {
    pub fn state(&self) -> StateVector {
        StateVector::new(self.r.into(), self.v.into(), 0.0)
    }
}

/// A complete, serializable experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub initial: InitialState,
    pub guidance: Guidance,
    pub controller: ControllerConfig,
    pub sim: SimConfig,
    pub plant: Plant,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.guidance.validate()?;
        self.controller.validate()?;
        self.sim.validate()?;
        self.plant.validate()
    }

    pub fn inputs<'a>(&'a self, initial: &'a StateVector) -> RunInputs<'a> {
        RunInputs {
            initial,
            guidance: &self.guidance,
            controller: &self.controller,
            sim: &self.sim,
            plant: &self.plant,
        }
    }

    /// Same experiment started off the target: the initial velocity relative
    /// to the reference point is rotated about the position vector by
    /// `tilt_deg` (tilting the plane) and scaled by `speed_scale`.
    pub fn with_offset_start(&self, tilt_deg: f64, speed_scale: f64) -> Scenario {
        let mut out = self.clone();
        let r = Vector3::from(self.initial.r);
        let idx = self.guidance.select(&r, None);
        let rel_r = r - self.guidance.anchor(idx);
        let frame_v = self
            .plant
            .moving_point
            .as_ref()
            .map_or_else(Vector3::zeros, |law| law.velocity(0.0));
        let rel_v = Vector3::from(self.initial.v) - frame_v;
        let rot = nalgebra::Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(rel_r),
            tilt_deg.to_radians(),
        );
        out.initial.v = (rot * rel_v * speed_scale + frame_v).into();
        out
    }

    pub fn run(&self) -> Result<TrajectoryLog> {
        self.validate()?;
        let initial = self.initial.state();
        run_simulation(self.inputs(&initial))
    }
}

pub const BUILTIN_SCENARIOS: [&str; 4] = ["mpf", "hyperbolas", "itokawa", "decay"];

pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "mpf" => Some(scenario_mpf()),
        "hyperbolas" => Some(scenario_hyperbolas()),
        "itokawa" => Some(scenario_itokawa()),
        "decay" => Some(decay_scenario(2.0)),
        _ => None,
    }
}

/// Velocity of the point orbited in the moving path following experiment.
pub fn mpf_point_law() -> VelocityLaw {
    VelocityLaw {
        bias: [5.0, 0.0, 0.0],
        amplitude: [0.0, 5.0 / 3.0, 50.0],
        omega: [0.0, 1.0 / 6.0, 1.0 / 7.0],
    }
}

/// Conic around the moving point with a 100 s period.
pub fn mpf_target() -> OrbitTarget {
    let h_d = Vector3::new(0.0, -8885.8, 8885.8);
    let e_d = Vector3::new(0.0, -0.4243, -0.4243);
    let mu = mu_from_period(100.0, h_d.norm(), e_d.norm()).expect("closed conic");
    OrbitTarget::new(h_d, e_d, mu).expect("perpendicular invariants")
}

/// Moving path following: orbit a point that accelerates sinusoidally, with
/// a constant push, axis-wise actuator saturation and a 15 s command loss.
pub fn scenario_mpf() -> Scenario {
    let target = mpf_target();
    let law = mpf_point_law();
    // apoapsis of the target conic, relative to the point at the origin
    let rel = target.state_at(std::f64::consts::PI, 0.0);
    let v0 = rel.v + law.velocity(0.0);
    Scenario {
        name: "mpf".into(),
        initial: InitialState {
            r: rel.r.into(),
            v: v0.into(),
        },
        guidance: Guidance::single(target),
        controller: ControllerConfig {
            lambda_r: 2.0,
            lambda_n: 2.0,
            disturbance_bound: [10.0; 3],
            boundary_layer: BoundaryLayer::FractionOfGain(0.05),
            switching: Switching::Saturation,
            ..ControllerConfig::default()
        },
        sim: SimConfig {
            actuator_limit: Some(20.0),
            blackout: Some([360.0, 375.0]),
            ..SimConfig::new(0.01, 600.0)
        },
        plant: Plant {
            known: vec![],
            disturbances: vec![AccelModel::Constant {
                accel: [0.0, 0.0, -3.0],
            }],
            moving_point: Some(law),
        },
    }
}

/// Disturbance of the patched-hyperbolas experiment:
/// `(5 sin t, 5 cos(t/3), -3 + 5 sin(t/5))`.
pub fn hyperbola_disturbance() -> AccelModel {
    AccelModel::Sinusoidal {
        amplitude: [5.0, 5.0, 5.0],
        omega: [1.0, 1.0 / 3.0, 1.0 / 5.0],
        phase: [0.0, std::f64::consts::FRAC_PI_2, 0.0],
        bias: [0.0, 0.0, -3.0],
    }
}

/// Checkpoint positions of the default patched-hyperbolas geometry (m).
pub const HYPERBOLA_CHECKPOINTS: [[f64; 3]; 3] = [[0.0, 0.0, 0.0], [2000.0, 0.0, 0.0], [4000.0, 0.0, 0.0]];

/// Per-leg hyperbolas: all in the z = 0 plane, each periapsis placed so the
/// outgoing asymptote heads roughly toward +x. Consecutive legs do not join
/// smoothly.
pub fn hyperbola_targets() -> Vec<OrbitTarget> {
    let mu = 4.0e5;
    let legs = [(1.5, 300.0), (2.0, 400.0), (1.3, 300.0)];
    legs.iter()
        .map(|&(e, p)| {
            let nu_inf = (-1.0f64 / e).acos();
            target_from_elements(
                &ConicElements {
                    p,
                    e,
                    raan: 0.0,
                    inc: 0.0,
                    argp: -nu_inf,
                },
                mu,
            )
            .expect("valid hyperbola")
        })
        .collect()
}

/// Patched hyperbolas: the conic follows whichever checkpoint is nearest.
pub fn scenario_hyperbolas() -> Scenario {
    let targets = hyperbola_targets();
    // start on the inbound branch of the first leg, off-speed by 10 %
    let start = targets[0].state_at(-1.6, 0.0);
    Scenario {
        name: "hyperbolas".into(),
        initial: InitialState {
            r: start.r.into(),
            v: (start.v * 1.1).into(),
        },
        guidance: Guidance::Checkpoints {
            checkpoints: HYPERBOLA_CHECKPOINTS.to_vec(),
            targets,
            hysteresis: DEFAULT_HYSTERESIS,
        },
        controller: ControllerConfig {
            lambda_r: 2.0,
            lambda_n: 2.0,
            disturbance_bound: [10.0; 3],
            boundary_layer: BoundaryLayer::FractionOfGain(0.05),
            switching: Switching::Saturation,
            ..ControllerConfig::default()
        },
        sim: SimConfig::new(0.01, 300.0),
        plant: Plant {
            known: vec![],
            disturbances: vec![hyperbola_disturbance()],
            moving_point: None,
        },
    }
}

/// Gravitational parameter of the asteroid stand-in (m^3/s^2).
pub const ITOKAWA_MU: f64 = 2.36;

/// Rotating two-mass stand-in for the asteroid's irregular field.
pub fn itokawa_dumbbell() -> DumbbellParams {
    DumbbellParams {
        mu_total: ITOKAWA_MU,
        mass_split: 0.5,
        separation: 250.0,
        spin_axis: [1.0, 0.0, 0.0],
        spin_period: 12.132 * 3600.0,
        initial_axis: [0.0, 0.0, 1.0],
        lobe_radius: 110.0,
    }
}

pub fn itokawa_target() -> OrbitTarget {
    OrbitTarget::new(
        Vector3::new(28.4818, 0.0, 0.0),
        Vector3::new(0.0, 0.0, 0.1),
        ITOKAWA_MU,
    )
    .expect("perpendicular invariants")
}

/// Orbit keeping about a small elongated asteroid. Only the central gravity
/// term is known; the non-spherical field and solar pressure are disturbances.
pub fn scenario_itokawa() -> Scenario {
    let target = itokawa_target();
    let start = target.state_at(0.0, 0.0);
    Scenario {
        name: "itokawa".into(),
        initial: InitialState {
            r: start.r.into(),
            v: start.v.into(),
        },
        guidance: Guidance::single(target),
        controller: ControllerConfig {
            lambda_r: 2.0,
            lambda_n: 2.0,
            disturbance_bound: [1e-4; 3],
            boundary_layer: BoundaryLayer::MultipleOfGain(5.0),
            switching: Switching::Saturation,
            ..ControllerConfig::default()
        },
        sim: SimConfig {
            control_dt: Some(1.0),
            escape_radius: Some(5000.0),
            ..SimConfig::new(1.0, 86_400.0)
        },
        plant: Plant {
            known: vec![AccelModel::PointMass { mu: ITOKAWA_MU }],
            disturbances: vec![
                AccelModel::SrpCannonball(SrpParams {
                    distance_au: 1.695,
                    b_sc: 20.0,
                    rho: 1.0,
                    sun_dir: [0.3, 0.954, 0.0],
                }),
                AccelModel::DumbbellResidual(itokawa_dumbbell()),
            ],
            moving_point: None,
        },
    }
}

/// Disturbance-free closed loop about a point mass, starting in the target
/// plane with the right |h| but a rotated, enlarged eccentricity vector.
pub fn decay_scenario(lambda_r: f64) -> Scenario {
    let mu = 1.0;
    let target = OrbitTarget::new(Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.3, 0.0, 0.0), mu)
        .expect("perpendicular");
    let start = target_from_elements(
        &ConicElements {
            p: 1.0,
            e: 0.4,
            raan: 0.0,
            inc: 0.0,
            argp: 0.6,
        },
        mu,
    )
    .expect("closed conic")
    .state_at(0.0, 0.0);
    Scenario {
        name: "decay".into(),
        initial: InitialState {
            r: start.r.into(),
            v: start.v.into(),
        },
        guidance: Guidance::single(target),
        controller: ControllerConfig {
            lambda_r,
            lambda_n: 2.0,
            disturbance_bound: [0.05; 3],
            boundary_layer: BoundaryLayer::FractionOfGain(0.05),
            switching: Switching::Saturation,
            ..ControllerConfig::default()
        },
        sim: SimConfig::new(2e-3, 120.0),
        plant: Plant {
            known: vec![AccelModel::PointMass { mu }],
            disturbances: vec![],
            moving_point: None,
        },
    }
}

/// Summary of one leg of a multi-target run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegMetrics {
    pub target: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub e_d_mag: f64,
    /// |e - e_d| at the last sample of the leg
    pub final_e_err: f64,
    pub min_e_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub delta_v_total: f64,
    /// first time each surface enters its layer for good (>= 10 control periods)
    pub capture_time: [Option<f64>; 3],
    pub capture_time_all: Option<f64>,
    /// delay between blackout end and the next all-surface capture
    pub recapture_delay: Option<f64>,
    pub terminal_h_err_rel: f64,
    pub terminal_e_err: f64,
    pub terminal_beta_deg: f64,
    pub max_s_over_phi_after_capture: [f64; 3],
    /// sign alternations of u_RTN per 100 steps inside the boundary layer (worst axis)
    pub chattering_index: f64,
    /// consecutive-sample pairs where V was tested, and where it failed to decrease
    pub lyapunov_checked: usize,
    pub lyapunov_violations: usize,
    /// slope of ln|e~_R| against swept angle once every surface has settled
    pub decay_slope: Option<f64>,
    pub legs: Vec<LegMetrics>,
    pub termination: Termination,
    pub t_final: f64,
}

/// Control periods a surface must stay inside its layer to count as captured.
pub const CAPTURE_PERIODS: f64 = 10.0;

/// Share of the layer width under which a surface counts as settled, i.e.
/// in the regime where the eccentricity error decays as exp(-lambda theta).
pub const SETTLED_FRACTION: f64 = 1e-3;

fn u_norm(r: &LogRecord) -> f64 {
    Vector3::from(r.u).norm()
}

/// Trapezoidal integral of |u| over the logged samples.
pub fn delta_v_trapezoid(records: &[LogRecord]) -> f64 {
    records
        .windows(2)
        .map(|w| 0.5 * (u_norm(&w[0]) + u_norm(&w[1])) * (w[1].t - w[0].t))
        .sum()
}

/// Start of the first run of samples satisfying `inside` that lasts at least
/// `min_len` seconds, considering samples from `from` on.
pub fn first_capture<F>(records: &[LogRecord], from: f64, min_len: f64, inside: F) -> Option<f64>
where
    F: Fn(&LogRecord) -> bool,
{
    let mut start: Option<f64> = None;
    for rec in records.iter().filter(|r| r.t >= from) {
        if inside(rec) {
            let s = *start.get_or_insert(rec.t);
            if rec.t - s >= min_len - 1e-9 {
                return Some(s);
            }
        } else {
            start = None;
        }
    }
    None
}

fn surface_inside(rec: &LogRecord, j: usize) -> bool {
    rec.s[j].abs() <= rec.phi[j]
}

fn all_inside(rec: &LogRecord) -> bool {
    (0..3).all(|j| surface_inside(rec, j))
}

/// Sign alternations of each RTN control component per 100 consecutive
/// in-layer steps; the worst axis is returned.
pub fn chattering_index(records: &[LogRecord]) -> f64 {
    (0..3)
        .map(|j| {
            let mut pairs = 0usize;
            let mut flips = 0usize;
            for w in records.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if a.blackout || b.blackout || a.target != b.target {
                    continue;
                }
                if !(surface_inside(a, j) && surface_inside(b, j)) {
                    continue;
                }
                pairs += 1;
                if a.u_rtn[j] * b.u_rtn[j] < 0.0 {
                    flips += 1;
                }
            }
            if pairs == 0 {
                0.0
            } else {
                100.0 * flips as f64 / pairs as f64
            }
        })
        .fold(0.0, f64::max)
}

/// Pairs of consecutive samples where every surface is outside its layer
/// and the command was applied unaltered; returns (checked, violations)
/// of strict Lyapunov decrease.
pub fn lyapunov_decrease(records: &[LogRecord]) -> (usize, usize) {
    let mut checked = 0;
    let mut bad = 0;
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.target != b.target || a.blackout || a.saturated.iter().any(|s| *s) {
            continue;
        }
        if !(0..3).all(|j| a.s[j].abs() > a.phi[j]) {
            continue;
        }
        checked += 1;
        if b.lyapunov >= a.lyapunov {
            bad += 1;
        }
    }
    (checked, bad)
}

/// Least-squares slope of ln|e~_R| against the swept angle, from `from` on,
/// while |e~_R| stays above `floor`.
pub fn decay_slope(records: &[LogRecord], guidance: &Guidance, from: f64, floor: f64) -> Option<f64> {
    let mut theta = 0.0;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let rate = |r: &LogRecord| {
        let rr = Vector3::from(r.rel_r).norm();
        r.h / (rr * rr)
    };
    for (i, rec) in records.iter().enumerate() {
        if i > 0 {
            let prev = &records[i - 1];
            theta += 0.5 * (rate(prev) + rate(rec)) * (rec.t - prev.t);
        }
        if rec.t < from {
            continue;
        }
        let target = guidance.target(rec.target);
        let r_hat = Vector3::from(rec.rel_r).normalize();
        let e_r = (Vector3::from(rec.e) - target.e_d()).dot(&r_hat);
        if e_r.abs() <= floor {
            break;
        }
        pts.push((theta, e_r.abs().ln()));
    }
    if pts.len() < 10 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Start of the first sustained run with every surface deep inside its layer.
pub fn settled_capture(records: &[LogRecord], control_dt: f64) -> Option<f64> {
    first_capture(records, 0.0, CAPTURE_PERIODS * control_dt, |r| {
        (0..3).all(|j| r.s[j].abs() <= SETTLED_FRACTION * r.phi[j] || r.s[j].abs() < 1e-12)
    })
}

fn e_error(rec: &LogRecord, guidance: &Guidance) -> f64 {
    (Vector3::from(rec.e) - guidance.target(rec.target).e_d()).norm()
}

/// Per-target segments of the log.
pub fn leg_metrics(records: &[LogRecord], guidance: &Guidance) -> Vec<LegMetrics> {
    let mut legs: Vec<LegMetrics> = Vec::new();
    for rec in records {
        let err = e_error(rec, guidance);
        match legs.last_mut() {
            Some(leg) if leg.target == rec.target => {
                leg.t_end = rec.t;
                leg.final_e_err = err;
                leg.min_e_err = leg.min_e_err.min(err);
            }
            _ => legs.push(LegMetrics {
                target: rec.target,
                t_start: rec.t,
                t_end: rec.t,
                e_d_mag: guidance.target(rec.target).e_d().norm(),
                final_e_err: err,
                min_e_err: err,
            }),
        }
    }
    legs
}

/// Quantifies a run: cost, capture, terminal accuracy and chattering.
pub fn compute_metrics(log: &TrajectoryLog, scenario: &Scenario) -> Result<MetricsReport> {
    let recs = &log.records;
    let last = recs
        .last()
        .ok_or_else(|| Error::InvalidConfig("empty trajectory log".into()))?;
    let min_len = CAPTURE_PERIODS * log.control_dt;
    let capture_time: [Option<f64>; 3] =
        std::array::from_fn(|j| first_capture(recs, 0.0, min_len, |r| surface_inside(r, j)));
    let capture_time_all = first_capture(recs, 0.0, min_len, all_inside);
    let recapture_delay = scenario.sim.blackout.and_then(|[_, end]| {
        first_capture(recs, end, min_len, |r| !r.blackout && all_inside(r)).map(|t| t - end)
    });
    let mut max_ratio = [0.0f64; 3];
    if let Some(tc) = capture_time_all {
        for rec in recs.iter().filter(|r| r.t >= tc) {
            for j in 0..3 {
                if rec.phi[j] > 0.0 {
                    max_ratio[j] = max_ratio[j].max(rec.s[j].abs() / rec.phi[j]);
                }
            }
        }
    }
    let (lyapunov_checked, lyapunov_violations) = lyapunov_decrease(recs);
    let target = scenario.guidance.target(last.target);
    let beta = {
        let r = Vector3::from(last.rel_r);
        let v = Vector3::from(last.rel_v);
        let h = r.cross(&v).normalize();
        crate::control::angle_between(&h, &target.h_d_hat())
    };
    Ok(MetricsReport {
        delta_v_total: delta_v_trapezoid(recs),
        capture_time,
        capture_time_all,
        recapture_delay,
        terminal_h_err_rel: (last.h - target.h_d_mag()).abs() / target.h_d_mag(),
        terminal_e_err: e_error(last, &scenario.guidance),
        terminal_beta_deg: beta.to_degrees(),
        max_s_over_phi_after_capture: max_ratio,
        chattering_index: chattering_index(recs),
        lyapunov_checked,
        lyapunov_violations,
        decay_slope: settled_capture(recs, log.control_dt).and_then(|tc| decay_slope(recs, &scenario.guidance, tc, 1e-9)),
        legs: leg_metrics(recs, &scenario.guidance),
        termination: log.termination,
        t_final: last.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_selection() {
        let cps = [[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [20.0, 0.0, 0.0]];
        assert_eq!(switch_checkpoint(&Vector3::new(5.0, 3.0, 0.0), &cps, None, 0.01), 0);
        assert_eq!(switch_checkpoint(&Vector3::new(20.0, 0.0, 0.0), &cps, None, 0.01), 2);
        // just past the 0/1 bisector, within the band: keep 0
        assert_eq!(switch_checkpoint(&Vector3::new(5.02, 0.0, 0.0), &cps, Some(0), 0.01), 0);
        // well past: switch
        assert_eq!(switch_checkpoint(&Vector3::new(5.2, 0.0, 0.0), &cps, Some(0), 0.01), 1);
    }

    #[test]
    fn builtin_targets_are_consistent() {
        let t = mpf_target();
        assert_eq!(t.h_d().dot(&t.e_d()), 0.0);
        assert!((t.e_d().norm() - 0.6001).abs() < 1e-4);
        let s = scenario_mpf();
        let [a, b] = s.sim.blackout.unwrap();
        assert_eq!(b - a, 15.0);
        let it = itokawa_target();
        assert_eq!(it.h_d().dot(&it.e_d()), 0.0);
        assert!((it.semi_latus_rectum() - 343.7).abs() < 0.1);
        for t in hyperbola_targets() {
            assert!(t.e_d().norm() > 1.0);
            assert!(t.h_d_hat().z > 0.999_999);
        }
    }

    #[test]
    fn trapezoid_of_constant_control() {
        let recs: Vec<LogRecord> = (0..=100)
            .map(|i| LogRecord {
                t: i as f64 * 0.5,
                u: [3.0, 0.0, 4.0],
                ..LogRecord::default()
            })
            .collect();
        assert!((delta_v_trapezoid(&recs) - 5.0 * 50.0).abs() < 1e-12);
        let zero: Vec<LogRecord> = recs.iter().map(|r| LogRecord { u: [0.0; 3], ..*r }).collect();
        assert_eq!(delta_v_trapezoid(&zero), 0.0);
    }

    #[test]
    fn capture_needs_residence() {
        let recs: Vec<LogRecord> = (0..40)
            .map(|i| LogRecord {
                t: i as f64,
                s: [if (5..12).contains(&i) || i >= 20 { 0.0 } else { 5.0 }, 0.0, 0.0],
                phi: [1.0; 3],
                ..LogRecord::default()
            })
            .collect();
        assert_eq!(first_capture(&recs, 0.0, 10.0, all_inside), Some(20.0));
        assert_eq!(first_capture(&recs, 0.0, 40.0, all_inside), None);
    }
}
