//! Fixed-step closed-loop propagation of
//! `r'' = f(r, v, t) + d(r, v, t) + u(r, v, t)`.

pub mod integrator;
pub mod log;
pub mod models;

use serde::{Deserialize, Serialize};

use crate::control::{command_from_state, lyapunov_value, sliding_state, ControlCommand, ControllerConfig};
use crate::error::{Error, Result};
use crate::frame::{build_frame, StateVector};
use crate::orbit::{eccentricity_rtn, specific_angular_momentum};
use crate::scenario::Guidance;
use crate::Vector3;

pub use integrator::{step_rk4, two_body_accel};
pub use log::{LogRecord, Termination, TrajectoryLog};
pub use models::{
    moving_point_update, rotating_dumbbell, srp_cannonball, sum_accel, AccelModel, AccelTerm,
    DumbbellParams, MovingPoint, SrpParams, VelocityLaw,
};

/// Relative distance growth that aborts a run as a blowup.
pub const BLOWUP_FACTOR: f64 = 1e6;

fn default_true() -> bool {
    true
}

fn default_decimate() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// integration step (s)
    pub dt: f64,
    /// zero-order-hold period of the control (s); defaults to `dt`
    #[serde(default)]
    pub control_dt: Option<f64>,
    /// run length (s)
    pub duration: f64,
    /// per-inertial-axis actuator bound (m/s^2)
    #[serde(default)]
    pub actuator_limit: Option<f64>,
    /// control commands are lost on `[start, end)` (s)
    #[serde(default)]
    pub blackout: Option<[f64; 2]>,
    #[serde(default = "default_true")]
    pub control_enabled: bool,
    /// stop the run once the relative distance exceeds this (m)
    #[serde(default)]
    pub escape_radius: Option<f64>,
    /// keep every n-th control tick in the log
    #[serde(default = "default_decimate")]
    pub decimate: usize,
}

impl SimConfig {
    pub fn new(dt: f64, duration: f64) -> Self {
        Self {
            dt,
            control_dt: None,
            duration,
            actuator_limit: None,
            blackout: None,
            control_enabled: true,
            escape_radius: None,
            decimate: 1,
        }
    }

    pub fn control_dt(&self) -> f64 {
        self.control_dt.unwrap_or(self.dt)
    }

    fn substeps(&self) -> usize {
        (self.control_dt() / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        let cdt = self.control_dt();
        let ratio = cdt / self.dt;
        if !(cdt >= self.dt && (ratio - ratio.round()).abs() < 1e-9 * ratio) {
            return bad(format!("control_dt {cdt} must be an integer multiple of dt {}", self.dt));
        }
        if let Some(l) = self.actuator_limit {
            if !(l > 0.0) {
                return bad(format!("actuator limit must be positive, got {l}"));
            }
        }
        if let Some([a, b]) = self.blackout {
            if !(a <= b) {
                return bad(format!("blackout window [{a}, {b}] is reversed"));
            }
        }
        if self.decimate == 0 {
            return bad("decimate must be at least 1".into());
        }
        Ok(())
    }

    pub fn blackout_active(&self, t: f64) -> bool {
        matches!(self.blackout, Some([a, b]) if t >= a && t < b)
    }
}

/// Physical forces acting on the particle.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Plant {
    /// modelled forces, fed forward by the controller
    #[serde(default)]
    pub known: Vec<AccelModel>,
    /// unmodelled forces, only bounded through the controller's D
    #[serde(default)]
    pub disturbances: Vec<AccelModel>,
    /// reference point that moves in inertial space, starting at the origin
    #[serde(default)]
    pub moving_point: Option<VelocityLaw>,
}

impl Plant {
    pub fn validate(&self) -> Result<()> {
        self.known.iter().chain(&self.disturbances).try_for_each(AccelModel::validate)
    }
}

/// Actuator output after limits and blackout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitedCommand {
    pub u: Vector3,
    pub saturated: [bool; 3],
    pub blackout: bool,
}

/// Per-axis clamp to `±limit`, or zero during a blackout.
pub fn apply_actuator_limits(u: &Vector3, limit: Option<f64>, blackout_active: bool) -> LimitedCommand {
    if blackout_active {
        return LimitedCommand {
            u: Vector3::zeros(),
            saturated: [false; 3],
            blackout: true,
        };
    }
    let Some(lim) = limit else {
        return LimitedCommand {
            u: *u,
            saturated: [false; 3],
            blackout: false,
        };
    };
    let mut saturated = [false; 3];
    let clamped = Vector3::from_fn(|i, _| {
        saturated[i] = u[i].abs() > lim;
        u[i].clamp(-lim, lim)
    });
    LimitedCommand {
        u: clamped,
        saturated,
        blackout: false,
    }
}

/// Sum of known forces, disturbances and the held control.
pub fn compose_acceleration(
    t: f64,
    state: &StateVector,
    known: &[&dyn AccelTerm],
    disturbances: &[&dyn AccelTerm],
    command: &ControlCommand,
) -> Result<Vector3> {
    let f = sum_accel(known.iter().copied(), t, &state.r, &state.v)?;
    let d = sum_accel(disturbances.iter().copied(), t, &state.r, &state.v)?;
    Ok(f + d + command.u_inertial)
}

/// Everything a closed-loop run needs.
#[derive(Clone, Copy)]
pub struct RunInputs<'a> {
    /// inertial initial state; the moving point, if any, starts at the origin
    pub initial: &'a StateVector,
    pub guidance: &'a Guidance,
    pub controller: &'a ControllerConfig,
    pub sim: &'a SimConfig,
    pub plant: &'a Plant,
}

/// Closed-loop run with the plant's own models only.
pub fn run_simulation(inputs: RunInputs<'_>) -> Result<TrajectoryLog> {
    run_simulation_with(inputs, &[])
}

/// Closed-loop run with additional disturbance terms that are not part of the
/// serializable plant (for instance state-dependent test disturbances).
pub fn run_simulation_with(inputs: RunInputs<'_>, extra: &[&dyn AccelTerm]) -> Result<TrajectoryLog> {
    let RunInputs {
        initial,
        guidance,
        controller,
        sim,
        plant,
    } = inputs;
    sim.validate()?;
    controller.validate()?;
    plant.validate()?;
    guidance.validate()?;
    if !initial.is_finite() {
        return Err(Error::InvalidConfig("initial state is not finite".into()));
    }

    let known: Vec<&dyn AccelTerm> = plant.known.iter().map(|m| m as &dyn AccelTerm).collect();
    let mut unknown: Vec<&dyn AccelTerm> = plant.disturbances.iter().map(|m| m as &dyn AccelTerm).collect();
    unknown.extend_from_slice(extra);
    let bodies: Vec<&dyn AccelTerm> = known.iter().chain(&unknown).copied().collect();

    let cdt = sim.control_dt();
    let n_sub = sim.substeps();
    let n_ticks = (sim.duration / cdt).round() as usize;

    let mut state = StateVector { t: 0.0, ..*initial };
    let mut point = plant
        .moving_point
        .map(|law| MovingPoint::new(law, Vector3::zeros(), 0.0));
    let mut active: Option<usize> = None;
    let mut dv = 0.0;
    let mut records = Vec::with_capacity(n_ticks / sim.decimate + 2);
    let mut termination = Termination::Completed;
    let mut r0: Option<f64> = None;

    for k in 0..=n_ticks {
        let t = k as f64 * cdt;
        state.t = t;

        let idx = guidance.select(&state.r, active);
        active = Some(idx);
        let (ref_r, ref_v) = match &point {
            Some(p) => (p.position, p.velocity()),
            None => (guidance.anchor(idx), Vector3::zeros()),
        };
        let rel = StateVector::new(state.r - ref_r, state.v - ref_v, t);
        let dist = rel.r.norm();
        let r_init = *r0.get_or_insert(dist);
        if !rel.is_finite() || dist > BLOWUP_FACTOR * r_init {
            return Err(Error::NumericalBlowup { t });
        }

        let escaped = sim.escape_radius.is_some_and(|lim| dist > lim);
        let hit = bodies.iter().any(|b| b.impact(t, &state.r));

        let target = guidance.target(idx);
        let frame = build_frame(&rel).map_err(|e| e.at(t))?;
        let st = sliding_state(&frame, target, controller).map_err(|e| e.at(t))?;
        let f_inertial = sum_accel(known.iter().copied(), t, &state.r, &state.v).map_err(|e| e.at(t))?;

        let nominal = if sim.control_enabled {
            let f_rtn = frame.to_rtn(&f_inertial);
            let u_rtn = command_from_state(&frame, &st, &f_rtn, controller).map_err(|e| e.at(t))?;
            frame.from_rtn(&u_rtn)
        } else {
            Vector3::zeros()
        };
        let limited = apply_actuator_limits(&nominal, sim.actuator_limit, sim.blackout_active(t));
        let cmd = ControlCommand {
            u_rtn: frame.to_rtn(&limited.u),
            u_inertial: limited.u,
            saturated: limited.saturated,
            blackout: limited.blackout,
        };

        let stop = escaped || hit || k == n_ticks;
        if k % sim.decimate == 0 || stop {
            let e_rtn = eccentricity_rtn(&frame, target.mu());
            let e_vec = frame.from_rtn(&e_rtn);
            let h_vec = specific_angular_momentum(&rel);
            records.push(LogRecord {
                t,
                r: state.r.into(),
                v: state.v.into(),
                rel_r: rel.r.into(),
                rel_v: rel.v.into(),
                u_rtn: cmd.u_rtn.to_array(),
                u: cmd.u_inertial.into(),
                s: st.s,
                k: st.k,
                phi: st.phi,
                h: h_vec.norm(),
                e: e_vec.into(),
                beta_deg: st.beta.to_degrees(),
                lyapunov: lyapunov_value(&st.s),
                dv_cum: dv,
                saturated: cmd.saturated,
                blackout: cmd.blackout,
                target: idx,
            });
        }
        if escaped {
            termination = Termination::Escaped { t };
            break;
        }
        if hit {
            termination = Termination::Impact { t };
            break;
        }
        if k == n_ticks {
            break;
        }

        let dt = sim.dt;
        for j in 0..n_sub {
            let t_sub = t + j as f64 * dt;
            state.t = t_sub;
            state = step_rk4(
                &state,
                |s| compose_acceleration(s.t, s, &known, &unknown, &cmd),
                dt,
            )
            .map_err(|e| e.at(t_sub))?;
            if let Some(p) = point.as_mut() {
                *p = moving_point_update(p, dt);
            }
        }
        dv += cmd.u_inertial.norm() * cdt;
    }

    Ok(TrajectoryLog {
        records,
        termination,
        delta_v: dv,
        control_dt: cdt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actuator_clamp_and_blackout() {
        let u = Vector3::new(30.0, -5.0, 0.0);
        let l = apply_actuator_limits(&u, Some(20.0), false);
        assert_eq!(l.u, Vector3::new(20.0, -5.0, 0.0));
        assert_eq!(l.saturated, [true, false, false]);
        let l = apply_actuator_limits(&u, Some(20.0), true);
        assert_eq!(l.u, Vector3::zeros());
        assert!(l.blackout);
        let small = Vector3::new(1.0, -19.0, 20.0);
        let l = apply_actuator_limits(&small, Some(20.0), false);
        assert_eq!(l.u, small);
        assert_eq!(l.saturated, [false; 3]);
    }

    #[test]
    fn control_period_must_divide() {
        let mut c = SimConfig::new(0.1, 10.0);
        c.control_dt = Some(0.25);
        assert!(c.validate().is_err());
        c.control_dt = Some(0.3);
        assert!(c.validate().is_ok());
        c.control_dt = Some(0.05);
        assert!(c.validate().is_err());
    }

    #[test]
    fn blackout_window_is_half_open() {
        let mut c = SimConfig::new(0.1, 10.0);
        c.blackout = Some([360.0, 375.0]);
        assert!(!c.blackout_active(359.99));
        assert!(c.blackout_active(360.0));
        assert!(c.blackout_active(374.99));
        assert!(!c.blackout_active(375.0));
    }
}
