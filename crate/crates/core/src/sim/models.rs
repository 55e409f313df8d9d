//! Acceleration models: known forces, disturbances and the moving reference point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::R_MIN;
use crate::sim::integrator::two_body_accel;
use crate::Vector3;

/// Solar radiation pressure at 1 AU (N/m^2).
pub const SOLAR_PRESSURE_1AU: f64 = 4.56e-6;

/// Anything that produces an acceleration at an inertial state.
pub trait AccelTerm: Send + Sync {
    fn accel(&self, t: f64, r: &Vector3, v: &Vector3) -> Result<Vector3>;

    /// True when `r` lies inside a solid body of the model.
    fn impact(&self, _t: f64, _r: &Vector3) -> bool {
        false
    }
}

/// Cannonball solar radiation pressure with a fixed sun direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrpParams {
    /// heliocentric distance (AU)
    pub distance_au: f64,
    /// mass-to-area ratio (kg/m^2)
    pub b_sc: f64,
    /// reflectivity coefficient, 1 + rho scales the pressure
    pub rho: f64,
    /// unit vector toward the sun (inertial)
    pub sun_dir: [f64; 3],
}

/// Two point masses rotating rigidly about a fixed axis through their
/// barycentre, a stand-in for an elongated asteroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DumbbellParams {
    /// total gravitational parameter (m^3/s^2)
    pub mu_total: f64,
    /// share of `mu_total` carried by the first mass
    pub mass_split: f64,
    /// distance between the two masses (m)
    pub separation: f64,
    pub spin_axis: [f64; 3],
    /// rotation period (s)
    pub spin_period: f64,
    /// direction from the barycentre to the first mass at t = 0
    pub initial_axis: [f64; 3],
    /// radius of the solid sphere around each mass used for impact detection (m)
    #[serde(default)]
    pub lobe_radius: f64,
}

impl DumbbellParams {
    /// Positions of the two masses at time `t`.
    pub fn mass_positions(&self, t: f64) -> [Vector3; 2] {
        let k = Vector3::from(self.spin_axis).normalize();
        let a0 = Vector3::from(self.initial_axis);
        let a0 = (a0 - k * k.dot(&a0)).normalize();
        let ang = 2.0 * PI * t / self.spin_period;
        let (s, c) = ang.sin_cos();
        let axis = a0 * c + k.cross(&a0) * s;
        let d1 = (1.0 - self.mass_split) * self.separation;
        let d2 = self.mass_split * self.separation;
        [axis * d1, -axis * d2]
    }

    pub fn accel(&self, t: f64, r: &Vector3) -> Result<Vector3> {
        let [p1, p2] = self.mass_positions(t);
        let mus = [self.mass_split * self.mu_total, (1.0 - self.mass_split) * self.mu_total];
        let mut a = Vector3::zeros();
        for (p, mu) in [p1, p2].iter().zip(mus) {
            let d = r - p;
            let dn = d.norm();
            if dn < R_MIN {
                return Err(Error::DegenerateState { r: dn, h: 0.0 });
            }
            a -= d * (mu / (dn * dn * dn));
        }
        Ok(a)
    }

    fn hits(&self, t: f64, r: &Vector3) -> bool {
        self.lobe_radius > 0.0
            && self
                .mass_positions(t)
                .iter()
                .any(|p| (r - p).norm() < self.lobe_radius)
    }
}

/// Serializable acceleration models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AccelModel {
    PointMass {
        mu: f64,
    },
    Constant {
        accel: [f64; 3],
    },
    /// a_i = bias_i + amplitude_i sin(omega_i t + phase_i)
    Sinusoidal {
        amplitude: [f64; 3],
        omega: [f64; 3],
        phase: [f64; 3],
        #[serde(default)]
        bias: [f64; 3],
    },
    SrpCannonball(SrpParams),
    RotatingDumbbell(DumbbellParams),
    /// Dumbbell field minus the point mass of the same total parameter.
    DumbbellResidual(DumbbellParams),
}

/// Cannonball SRP acceleration; constant in the inertial frame.
pub fn srp_cannonball(p: &SrpParams) -> Vector3 {
    let mag = (1.0 + p.rho) * SOLAR_PRESSURE_1AU / (p.b_sc * p.distance_au * p.distance_au);
    -Vector3::from(p.sun_dir).normalize() * mag
}

/// Gravity of a rotating two-mass body at inertial position `r`.
pub fn rotating_dumbbell(p: &DumbbellParams, t: f64, r: &Vector3) -> Result<Vector3> {
    p.accel(t, r)
}

impl AccelTerm for AccelModel {
    fn accel(&self, t: f64, r: &Vector3, _v: &Vector3) -> Result<Vector3> {
        match self {
            AccelModel::PointMass { mu } => {
                if r.norm() < R_MIN {
                    return Err(Error::DegenerateState { r: r.norm(), h: 0.0 });
                }
                Ok(two_body_accel(r, *mu))
            }
            AccelModel::Constant { accel } => Ok(Vector3::from(*accel)),
            AccelModel::Sinusoidal {
                amplitude,
                omega,
                phase,
                bias,
            } => Ok(Vector3::from_fn(|i, _| {
                bias[i] + amplitude[i] * (omega[i] * t + phase[i]).sin()
            })),
            AccelModel::SrpCannonball(p) => Ok(srp_cannonball(p)),
            AccelModel::RotatingDumbbell(p) => p.accel(t, r),
            AccelModel::DumbbellResidual(p) => Ok(p.accel(t, r)? - two_body_accel(r, p.mu_total)),
        }
    }

    fn impact(&self, t: f64, r: &Vector3) -> bool {
        match self {
            AccelModel::RotatingDumbbell(p) | AccelModel::DumbbellResidual(p) => p.hits(t, r),
            _ => false,
        }
    }
}

impl AccelModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        match self {
            AccelModel::PointMass { mu } if !(*mu > 0.0) => bad("point mass mu must be positive"),
            AccelModel::SrpCannonball(p) if !(p.distance_au > 0.0 && p.b_sc > 0.0) => {
                bad("SRP needs positive distance and mass-to-area ratio")
            }
            AccelModel::SrpCannonball(p) if Vector3::from(p.sun_dir).norm() == 0.0 => {
                bad("SRP sun direction must be non-zero")
            }
            AccelModel::RotatingDumbbell(p) | AccelModel::DumbbellResidual(p)
                if !(p.mu_total > 0.0
                    && (0.0..=1.0).contains(&p.mass_split)
                    && p.separation >= 0.0
                    && p.spin_period > 0.0) =>
            {
                bad("dumbbell needs mu_total > 0, mass_split in [0,1], separation >= 0, spin_period > 0")
            }
            AccelModel::RotatingDumbbell(p) | AccelModel::DumbbellResidual(p) => {
                let k = Vector3::from(p.spin_axis);
                let a = Vector3::from(p.initial_axis);
                if k.norm() == 0.0 || (a - k * (k.dot(&a) / k.norm_squared())).norm() == 0.0 {
                    bad("dumbbell initial axis must not be parallel to the spin axis")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Sum of accelerations from a list of terms.
pub fn sum_accel<'a, I>(terms: I, t: f64, r: &Vector3, v: &Vector3) -> Result<Vector3>
where
    I: IntoIterator<Item = &'a dyn AccelTerm>,
{
    let mut a = Vector3::zeros();
    for term in terms {
        a += term.accel(t, r, v)?;
    }
    Ok(a)
}

/// Velocity law of a moving reference point, component-wise
/// `V_i(t) = bias_i + amplitude_i cos(omega_i t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityLaw {
    pub bias: [f64; 3],
    pub amplitude: [f64; 3],
    pub omega: [f64; 3],
}

impl VelocityLaw {
    pub fn velocity(&self, t: f64) -> Vector3 {
        Vector3::from_fn(|i, _| self.bias[i] + self.amplitude[i] * (self.omega[i] * t).cos())
    }

    /// Analytic time derivative of [`velocity`](Self::velocity).
    pub fn acceleration(&self, t: f64) -> Vector3 {
        Vector3::from_fn(|i, _| -self.amplitude[i] * self.omega[i] * (self.omega[i] * t).sin())
    }
}

/// A reference point whose position is integrated from its velocity law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovingPoint {
    pub law: VelocityLaw,
    pub position: Vector3,
    pub t: f64,
}

impl MovingPoint {
    pub fn new(law: VelocityLaw, position: Vector3, t: f64) -> Self {
        Self { law, position, t }
    }

    pub fn velocity(&self) -> Vector3 {
        self.law.velocity(self.t)
    }

    pub fn acceleration(&self) -> Vector3 {
        self.law.acceleration(self.t)
    }
}

/// Advances the point by `dt` with the same fourth-order scheme as the plant.
pub fn moving_point_update(mp: &MovingPoint, dt: f64) -> MovingPoint {
    let v1 = mp.law.velocity(mp.t);
    let v2 = mp.law.velocity(mp.t + 0.5 * dt);
    let v4 = mp.law.velocity(mp.t + dt);
    MovingPoint {
        law: mp.law,
        position: mp.position + (v1 + v2 * 4.0 + v4) * (dt / 6.0),
        t: mp.t + dt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn itokawa_like(separation: f64) -> DumbbellParams {
        DumbbellParams {
            mu_total: 2.36,
            mass_split: 0.5,
            separation,
            spin_axis: [1.0, 0.0, 0.0],
            spin_period: 43675.2,
            initial_axis: [0.0, 1.0, 0.0],
            lobe_radius: 0.0,
        }
    }

    #[test]
    fn srp_magnitude_and_edge_cases() {
        let p = SrpParams { distance_au: 1.695, b_sc: 20.0, rho: 1.0, sun_dir: [0.0, 0.0, 2.0] };
        let a = srp_cannonball(&p);
        let expected = 2.0 * 4.56e-6 / (20.0 * 1.695 * 1.695);
        assert!((a.norm() - expected).abs() < 1e-22);
        assert!((a.norm() - 1.59e-7).abs() < 0.01e-7);
        assert!(a.z < 0.0 && a.x == 0.0);
        let absorber = SrpParams { rho: -1.0, ..p };
        assert_eq!(srp_cannonball(&absorber).norm(), 0.0);
        // fixed inertial direction: independent of position and time
        let m = AccelModel::SrpCannonball(p);
        let a1 = m.accel(0.0, &Vector3::x(), &Vector3::y()).unwrap();
        let a2 = m.accel(5e4, &Vector3::new(-300.0, 20.0, 1.0), &Vector3::z()).unwrap();
        assert_eq!(a1, a2);
    }

    #[test]
    fn dumbbell_collapses_to_point_mass() {
        let p = itokawa_like(0.0);
        let r = Vector3::new(120.0, -40.0, 310.0);
        let a = rotating_dumbbell(&p, 1234.0, &r).unwrap();
        let pm = two_body_accel(&r, p.mu_total);
        assert!((a - pm).norm() <= 1e-12 * pm.norm());
    }

    #[test]
    fn dumbbell_far_field_quadrupole_scaling() {
        // Monopole error of an equal-mass dumbbell decays as (d/r)^2.
        let p = itokawa_like(250.0);
        for factor in [100.0, 200.0] {
            let r = Vector3::new(0.3, 0.5, 0.8).normalize() * (factor * 250.0);
            let a = rotating_dumbbell(&p, 777.0, &r).unwrap();
            let pm = two_body_accel(&r, p.mu_total);
            let rel = (a - pm).norm() / pm.norm();
            let bound = 1.5 * (250.0 / r.norm()).powi(2);
            assert!(rel < bound, "rel = {rel:e}, bound = {bound:e}");
            assert!(rel > 0.05 * bound);
        }
    }

    #[test]
    fn dumbbell_on_axis_pull_is_axial() {
        let p = itokawa_like(250.0);
        let r = Vector3::new(400.0, 0.0, 0.0);
        for t in [0.0, 1000.0, 20000.0] {
            let a = rotating_dumbbell(&p, t, &r).unwrap();
            assert!(a.y.abs() < 1e-18 && a.z.abs() < 1e-18);
            assert!(a.x < 0.0);
        }
    }

    #[test]
    fn dumbbell_collision_is_degenerate() {
        let p = itokawa_like(250.0);
        let [p1, _] = p.mass_positions(0.0);
        assert!(matches!(rotating_dumbbell(&p, 0.0, &p1), Err(Error::DegenerateState { .. })));
    }

    #[test]
    fn composition_is_linear() {
        let a = AccelModel::Constant { accel: [0.0, 0.0, -3.0] };
        let b = AccelModel::Sinusoidal {
            amplitude: [5.0, 5.0, 5.0],
            omega: [1.0, 1.0 / 3.0, 0.2],
            phase: [0.0, std::f64::consts::FRAC_PI_2, 0.0],
            bias: [0.0, 0.0, -3.0],
        };
        let r = Vector3::new(1.0, 2.0, 3.0);
        let v = Vector3::zeros();
        let none: Vec<&dyn AccelTerm> = vec![];
        assert_eq!(sum_accel(none, 0.0, &r, &v).unwrap(), Vector3::zeros());
        let only_a: Vec<&dyn AccelTerm> = vec![&a];
        assert_eq!(sum_accel(only_a, 4.0, &r, &v).unwrap(), Vector3::new(0.0, 0.0, -3.0));
        let both: Vec<&dyn AccelTerm> = vec![&a, &b];
        let sum = sum_accel(both, 2.5, &r, &v).unwrap();
        let parts = a.accel(2.5, &r, &v).unwrap() + b.accel(2.5, &r, &v).unwrap();
        assert_eq!(sum, parts);
        let d0 = b.accel(0.0, &r, &v).unwrap();
        assert!((d0 - Vector3::new(0.0, 5.0, -3.0)).norm() < 1e-15);
    }

    fn mpf_law() -> VelocityLaw {
        VelocityLaw { bias: [5.0, 0.0, 0.0], amplitude: [0.0, 5.0 / 3.0, 50.0], omega: [0.0, 1.0 / 6.0, 1.0 / 7.0] }
    }

    #[test]
    fn moving_point_initial_values_and_bounds() {
        let law = mpf_law();
        assert_eq!(law.velocity(0.0), Vector3::new(5.0, 5.0 / 3.0, 50.0));
        assert_eq!(law.acceleration(0.0), Vector3::new(0.0, 0.0, 0.0));
        for i in 0..2000 {
            let a = law.acceleration(i as f64 * 0.37);
            assert!(a.x == 0.0 && a.y.abs() <= 5.0 / 18.0 + 1e-15 && a.z.abs() <= 50.0 / 7.0 + 1e-15);
        }
    }

    #[test]
    fn moving_point_position_tracks_velocity() {
        let dt = 0.01;
        let mut mp = MovingPoint::new(mpf_law(), Vector3::zeros(), 0.0);
        for _ in 0..1000 {
            let prev = mp;
            mp = moving_point_update(&mp, dt);
            let mid_v = prev.law.velocity(prev.t + 0.5 * dt);
            assert!(((mp.position - prev.position) / dt - mid_v).norm() < 1e-3 * dt);
        }
        // closed form: x = 5t, y = 10 sin(t/6), z = 350 sin(t/7)
        let t = mp.t;
        let exact = Vector3::new(5.0 * t, 10.0 * (t / 6.0).sin(), 350.0 * (t / 7.0).sin());
        assert!((mp.position - exact).norm() < 1e-9);
    }

    #[test]
    fn acceleration_matches_velocity_differences() {
        let law = mpf_law();
        let t = 3.7;
        let eps = 1e-4;
        let fd = (law.velocity(t + eps) - law.velocity(t - eps)) / (2.0 * eps);
        assert!((fd - law.acceleration(t)).norm() < 1e-7);
    }
}
