use std::f64::consts::PI;

use conicpath::orbit::{
    eccentricity_rtn, eccentricity_rtn_rate, eccentricity_vector, mu_from_period, specific_angular_momentum,
    specific_energy, target_from_elements,
};
use conicpath::{build_frame, ConicElements, Error, OrbitTarget, StateVector, Vector3};
use proptest::prelude::*;

fn vec3(lo: f64, hi: f64) -> impl Strategy<Value = Vector3> {
    prop::array::uniform3(lo..hi).prop_map(Vector3::from)
}

fn state() -> impl Strategy<Value = StateVector> {
    (vec3(-3.0, 3.0), vec3(-2.0, 2.0))
        .prop_filter("non-degenerate", |(r, v)| r.norm() > 0.3 && r.cross(v).norm() > 0.05 * r.norm() * v.norm().max(0.1))
        .prop_map(|(r, v)| StateVector::new(r, v, 0.0))
}

fn elements() -> impl Strategy<Value = ConicElements> {
    (0.2..5.0, 0.0..2.5, -PI..PI, 0.0..PI, -PI..PI)
        .prop_map(|(p, e, raan, inc, argp)| ConicElements { p, e, raan, inc, argp })
}

// e = v x (r x v) / mu - r/|r|, written out component-wise
fn ecc_oracle(r: &Vector3, v: &Vector3, mu: f64) -> Vector3 {
    let rv = r.dot(v);
    let v2 = v.norm_squared();
    (r * (v2 - mu / r.norm()) - v * rv) / mu
}

proptest! {
    #[test]
    fn eccentricity_closed_form_matches_inertial(s in state(), mu in 0.3..3.0f64) {
        let f = build_frame(&s).unwrap();
        let e = eccentricity_vector(&s, mu).unwrap();
        let want = ecc_oracle(&s.r, &s.v, mu);
        prop_assert!((e - want).norm() < 1e-11 * (1.0 + want.norm()));
        let rtn = eccentricity_rtn(&f, mu);
        prop_assert!((f.from_rtn(&rtn) - want).norm() < 1e-11 * (1.0 + want.norm()));
        prop_assert!(rtn.n == 0.0);
        // e . h = 0
        prop_assert!(e.dot(&specific_angular_momentum(&s)).abs() < 1e-11 * (1.0 + want.norm()) * f.h);
    }

    #[test]
    fn eccentricity_rate_matches_finite_differences(s in state(), a in vec3(-1.0, 1.0), mu in 0.3..3.0f64) {
        // constant total acceleration: exact quadratic motion
        let at = |t: f64| ecc_oracle(&(s.r + s.v * t + a * (0.5 * t * t)), &(s.v + a * t), mu);
        let f = build_frame(&s).unwrap();
        let scale = s.v.norm() / f.r + 1.0;
        let h = 1e-3 / scale;
        let fd = (at(-2.0 * h) - at(2.0 * h) + (at(h) - at(-h)) * 8.0) / (12.0 * h);
        let got = f.from_rtn(&eccentricity_rtn_rate(&f, &f.to_rtn(&a), mu));
        let mag = (1.0 + s.v.norm_squared() + mu / f.r) * scale * (1.0 + a.norm()) / mu;
        prop_assert!((fd - got).norm() < 1e-7 * mag, "fd {fd} got {got}");
    }

    #[test]
    fn conic_points_carry_the_invariants(el in elements(), mu in 0.5..5.0f64, frac in -0.95..0.95f64) {
        let t = target_from_elements(&el, mu).unwrap();
        prop_assert!((t.h_d_mag() - (mu * el.p).sqrt()).abs() < 1e-12 * t.h_d_mag());
        prop_assert!((t.e_d().norm() - el.e).abs() < 1e-12);
        prop_assert!((t.h_d_hat().z - el.inc.cos()).abs() < 1e-12);
        let lim = if el.e < 1.0 { PI } else { (-1.0 / el.e).acos() };
        let nu = frac * lim;
        let s = t.state_at(nu, 0.0);
        let h = specific_angular_momentum(&s);
        prop_assert!((h - t.h_d()).norm() < 1e-9 * t.h_d_mag());
        let e = ecc_oracle(&s.r, &s.v, mu);
        prop_assert!((e - t.e_d()).norm() < 1e-9 * (1.0 + el.e));
        let rn = s.r.norm();
        prop_assert!((rn - el.p / (1.0 + el.e * nu.cos())).abs() < 1e-9 * rn);
        prop_assert!(t.conic_residual(&s.r) < 1e-9 * rn);
        let off = t.h_d_hat() * 0.1 * rn;
        prop_assert!((t.conic_residual(&(s.r + off)) - 0.1 * rn).abs() < 1e-9 * rn);
    }

    #[test]
    fn period_inversion(h in 0.1..1e4f64, e in 0.0..0.95f64, period in 1.0..1e4f64) {
        let mu = mu_from_period(period, h, e).unwrap();
        let a = h * h / mu / (1.0 - e * e);
        let t = 2.0 * PI * (a.powi(3) / mu).sqrt();
        prop_assert!((t - period).abs() < 1e-10 * period);
    }

    #[test]
    fn energy_sign_follows_eccentricity(s in state(), mu in 0.3..3.0f64) {
        let e = ecc_oracle(&s.r, &s.v, mu).norm();
        let en = specific_energy(&s, mu);
        let h = specific_angular_momentum(&s).norm();
        // e^2 = 1 + 2 E h^2 / mu^2
        prop_assert!((e * e - 1.0 - 2.0 * en * h * h / (mu * mu)).abs() < 1e-9 * (1.0 + e * e));
    }
}

#[test]
fn invalid_targets_are_rejected() {
    let z = Vector3::z();
    assert!(matches!(OrbitTarget::new(z, Vector3::new(0.0, 0.0, 0.5), 1.0), Err(Error::InvalidTarget(_))));
    assert!(OrbitTarget::new(Vector3::zeros(), Vector3::x(), 1.0).is_err());
    assert!(OrbitTarget::new(z, Vector3::x(), -1.0).is_err());
    assert!(OrbitTarget::new(z, Vector3::x() * 0.5, 1.0).is_ok());
    assert!(mu_from_period(100.0, 1.0, 1.2).is_err());
    assert!(mu_from_period(-1.0, 1.0, 0.2).is_err());
    let bad = ConicElements { p: -1.0, e: 0.1, raan: 0.0, inc: 0.0, argp: 0.0 };
    assert!(target_from_elements(&bad, 1.0).is_err());
}

#[test]
fn conic_sampling_stays_on_the_curve() {
    let el = ConicElements { p: 2.0, e: 1.4, raan: 0.3, inc: 0.4, argp: 1.0 };
    let t = target_from_elements(&el, 1.5).unwrap();
    let pts = t.sample(50, 0.05);
    assert_eq!(pts.len(), 50);
    for p in &pts {
        assert!(p.norm().is_finite());
        assert!(t.conic_residual(p) < 1e-9 * p.norm());
    }
}
