use std::f64::consts::PI;

use conicpath::scenario::{
    builtin, delta_v_trapezoid, first_capture, hyperbola_targets, mpf_target, switch_checkpoint, BUILTIN_SCENARIOS,
    HYPERBOLA_CHECKPOINTS,
};
use conicpath::sim::log::LogRecord;
use conicpath::{compute_metrics, Scenario, Vector3};
use proptest::prelude::*;

#[test]
fn builtins_validate_and_round_trip_through_json() {
    for name in BUILTIN_SCENARIOS {
        let sc = builtin(name).unwrap();
        assert_eq!(sc.name, name);
        sc.validate().unwrap();
        let js = serde_json::to_string_pretty(&sc).unwrap();
        assert_eq!(serde_json::from_str::<Scenario>(&js).unwrap(), sc);
    }
    assert!(builtin("mars").is_none());
}

#[test]
fn mpf_target_has_a_100_s_period() {
    let t = mpf_target();
    let e = t.e_d().norm();
    let a = t.semi_latus_rectum() / (1.0 - e * e);
    let period = 2.0 * PI * (a.powi(3) / t.mu()).sqrt();
    assert!((period - 100.0).abs() < 1e-9);
    assert!(t.h_d().dot(&t.e_d()).abs() < 1e-9 * t.h_d_mag());
}

#[test]
fn hyperbola_legs_are_open_conics_in_one_plane() {
    let legs = hyperbola_targets();
    assert_eq!(legs.len(), HYPERBOLA_CHECKPOINTS.len());
    for t in &legs {
        assert!(t.e_d().norm() > 1.0);
        assert!((t.h_d_hat() - Vector3::z()).norm() < 1e-12);
    }
}

#[test]
fn offset_start_rotates_and_scales_the_relative_velocity() {
    for name in BUILTIN_SCENARIOS {
        let sc = builtin(name).unwrap();
        let off = sc.with_offset_start(30.0, 1.2);
        let frame_v = sc.plant.moving_point.map_or_else(Vector3::zeros, |l| l.velocity(0.0));
        let r = Vector3::from(sc.initial.r);
        assert_eq!(off.initial.r, sc.initial.r);
        let v0 = Vector3::from(sc.initial.v) - frame_v;
        let v1 = Vector3::from(off.initial.v) - frame_v;
        assert!((v1.norm() - 1.2 * v0.norm()).abs() < 1e-9 * v0.norm());
        let rh = r.normalize();
        assert!((v1.dot(&rh) - 1.2 * v0.dot(&rh)).abs() < 1e-9 * v0.norm());
        let p0 = v0 - rh * v0.dot(&rh);
        let p1 = v1 - rh * v1.dot(&rh);
        let ang = p0.cross(&p1).norm().atan2(p0.dot(&p1));
        assert!((ang.to_degrees() - 30.0).abs() < 1e-6, "{name}: {}", ang.to_degrees());
    }
}

fn rec(t: f64, u: f64) -> LogRecord {
    LogRecord { t, u: [u, 0.0, 0.0], ..LogRecord::default() }
}

#[test]
fn capture_needs_a_sustained_run() {
    let recs: Vec<_> = (0..40).map(|i| rec(i as f64, 0.0)).collect();
    let inside = |r: &LogRecord| !(5.0..=6.0).contains(&r.t) && r.t != 20.0;
    // 0..4 too short, 7..19 lasts 12 s
    assert_eq!(first_capture(&recs, 0.0, 10.0, inside), Some(7.0));
    assert_eq!(first_capture(&recs, 0.0, 13.0, inside), Some(21.0));
    assert_eq!(first_capture(&recs, 0.0, 100.0, inside), None);
}

#[test]
fn trapezoidal_delta_v() {
    let recs = [rec(0.0, 1.0), rec(1.0, -3.0), rec(3.0, 3.0)];
    assert_eq!(delta_v_trapezoid(&recs), 2.0 + 6.0);
}

#[test]
fn short_run_metrics_are_consistent() {
    let mut sc = builtin("hyperbolas").unwrap();
    sc.sim.duration = 20.0;
    let log = sc.run().unwrap();
    let m = compute_metrics(&log, &sc).unwrap();
    assert_eq!(m.delta_v_total, delta_v_trapezoid(&log.records));
    assert!((m.delta_v_total - log.delta_v).abs() < 0.05 * log.delta_v);
    assert_eq!(m.t_final, log.records.last().unwrap().t);
    assert!(m.lyapunov_violations <= m.lyapunov_checked);
    assert!(m.chattering_index.is_finite() && m.terminal_e_err.is_finite());
    assert!(!m.legs.is_empty());
    let js = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<conicpath::MetricsReport>(&js).unwrap(), m);
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-100.0..100.0f64)
}

proptest! {
    #[test]
    fn checkpoint_switch_respects_the_band(
        r in point(), cps in prop::collection::vec(point(), 1..6), prev in 0usize..6, band in 0.0..0.5f64
    ) {
        let r = Vector3::from(r);
        let d: Vec<f64> = cps.iter().map(|c| (r - Vector3::from(*c)).norm()).collect();
        let best = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let nearest = d.iter().position(|&x| x == best).unwrap();
        prop_assert_eq!(switch_checkpoint(&r, &cps, None, band), nearest);
        let got = switch_checkpoint(&r, &cps, Some(prev), band);
        if prev < cps.len() && d[prev] <= best * (1.0 + band) {
            prop_assert_eq!(got, prev);
        } else {
            prop_assert_eq!(got, nearest);
        }
        prop_assert_eq!(switch_checkpoint(&r, &cps, Some(prev), 0.0) , if prev < cps.len() && d[prev] == best { prev } else { nearest });
    }
}
