use conicpath::control::{
    angle_between, beta_safeguard, build_f_g, control_full, gains_from_bounds, sat, sign, sliding_state,
    surface_vector, BoundaryLayer, ControlLaw, NormalLaw, Switching,
};
use conicpath::orbit::{eccentricity_vector, target_from_elements};
use conicpath::{build_frame, ConicElements, ControllerConfig, OrbitTarget, StateVector, Vector3, Vector3Rtn};
use proptest::prelude::*;

fn vec3(lo: f64, hi: f64) -> impl Strategy<Value = Vector3> {
    prop::array::uniform3(lo..hi).prop_map(Vector3::from)
}

#[derive(Debug, Clone)]
struct Case {
    s: StateVector,
    target: OrbitTarget,
    cfg: ControllerConfig,
}

// state, plus a target whose plane lies within 60 deg of the current one
fn case() -> impl Strategy<Value = Case> {
    (
        vec3(-2.0, 2.0),
        vec3(-1.5, 1.5),
        0.0..1.0f64,
        0.0..std::f64::consts::TAU,
        0.5..1.5f64,
        0.0..1.5f64,
        0.0..std::f64::consts::TAU,
        0.5..2.0f64,
        prop::array::uniform3(0.01..0.5f64),
        (0.2..3.0f64, 0.2..3.0f64),
    )
        .prop_filter_map("bad geometry", |(r, v, tilt, az, hs, em, eang, mu, d, (lr, ln))| {
            if r.norm() < 0.4 || r.cross(&v).norm() < 0.1 * r.norm() * v.norm().max(0.2) {
                return None;
            }
            let s = StateVector::new(r, v, 0.0);
            let f = build_frame(&s).ok()?;
            let ang = tilt * 60f64.to_radians();
            let side = f.r_hat * az.cos() + f.theta_hat * az.sin();
            let n = f.h_hat * ang.cos() + side * ang.sin();
            let p = n.cross(&Vector3::new(0.3, 0.7, 0.2)).normalize();
            let q = n.cross(&p);
            let e_d = (p * eang.cos() + q * eang.sin()) * em;
            let target = OrbitTarget::new(n * f.h * hs, e_d, mu).ok()?;
            let cfg = ControllerConfig {
                lambda_r: lr,
                lambda_n: ln,
                disturbance_bound: d,
                ..ControllerConfig::default()
            };
            Some(Case { s, target, cfg })
        })
}

fn fd_s(c: &Case, a: &Vector3, h: f64) -> [f64; 3] {
    let s_at = |t: f64| {
        let st = StateVector::new(c.s.r + c.s.v * t + a * (0.5 * t * t), c.s.v + a * t, t);
        surface_vector(&build_frame(&st).unwrap(), &c.target, &c.cfg).unwrap()
    };
    let (m2, m1, p1, p2) = (s_at(-2.0 * h), s_at(-h), s_at(h), s_at(2.0 * h));
    std::array::from_fn(|j| (8.0 * (p1[j] - m1[j]) - (p2[j] - m2[j])) / (12.0 * h))
}

fn step_for(c: &Case, a: &Vector3) -> f64 {
    let f = build_frame(&c.s).unwrap();
    let an = a.norm().max(1e-12);
    1e-3 * (1.0 / f.theta_dot()).min(c.s.v.norm() / an).min((f.r / an).sqrt())
}

proptest! {
    #[test]
    fn saturation_is_bounded_odd_and_monotone(s in -10.0..10.0f64, ds in 0.0..5.0f64, phi in 1e-3..3.0f64) {
        let y = sat(s, phi);
        prop_assert!(y.abs() <= 1.0);
        prop_assert_eq!(sat(-s, phi), -y);
        prop_assert!(sat(s + ds, phi) >= y);
        if s.abs() > phi {
            prop_assert_eq!(y, sign(s));
        } else {
            prop_assert!((y - s / phi).abs() < 1e-15);
        }
    }

    #[test]
    fn surfaces_vanish_on_the_target(el_e in 0.0..2.0f64, p in 0.3..4.0f64, inc in 0.0..3.0f64,
                                     argp in -3.0..3.0f64, frac in -0.9..0.9f64, mu in 0.5..3.0f64) {
        let t = target_from_elements(&ConicElements { p, e: el_e, raan: 0.4, inc, argp }, mu).unwrap();
        let lim = if el_e < 1.0 { std::f64::consts::PI } else { (-1.0 / el_e).acos() };
        let st = t.state_at(frac * lim, 0.0);
        let f = build_frame(&st).unwrap();
        let s = surface_vector(&f, &t, &ControllerConfig::default()).unwrap();
        for v in s {
            prop_assert!(v.abs() < 1e-9 * (1.0 + t.h_d_mag()), "{s:?}");
        }
    }

    #[test]
    fn f_is_upper_triangular_with_known_determinant(c in case()) {
        let f = build_frame(&c.s).unwrap();
        let (m, _) = build_f_g(&f, &c.target, &c.cfg).unwrap();
        prop_assert_eq!(m[(1, 0)], 0.0);
        prop_assert_eq!(m[(2, 0)], 0.0);
        prop_assert_eq!(m[(2, 1)], 0.0);
        let hdn = c.target.h_d_hat().dot(&f.h_hat);
        let det = -f.r * f.r * hdn / c.target.mu();
        prop_assert!((m.determinant() - det).abs() < 1e-10 * det.abs().max(1e-6));
    }

    #[test]
    fn rate_matrices_predict_surface_motion(c in case(), a in vec3(-1.0, 1.0)) {
        let f = build_frame(&c.s).unwrap();
        let (m, g) = build_f_g(&f, &c.target, &c.cfg).unwrap();
        let pred = m * f.to_rtn(&a).as_vector() + g;
        let fd = fd_s(&c, &a, step_for(&c, &a));
        let scale = m.abs().max() * a.norm() + g.norm() + f.r * a.norm() + 1e-9;
        for j in 0..3 {
            prop_assert!((pred[j] - fd[j]).abs() < 1e-7 * scale, "j {j}: {} vs {}", pred[j], fd[j]);
        }
    }

    #[test]
    fn closed_loop_reaching_law(c in case(), mu_body in 0.2..3.0f64) {
        // natural dynamics: point mass unrelated to the target's mu
        let f = build_frame(&c.s).unwrap();
        let grav = -c.s.r * (mu_body / c.s.r.norm().powi(3));
        let cfg = ControllerConfig { switching: Switching::Saturation, ..c.cfg.clone() };
        let cmd = control_full(&f, &c.target, &f.to_rtn(&grav), &cfg).unwrap();
        let st = sliding_state(&f, &c.target, &cfg).unwrap();
        let a = grav + cmd.u_inertial;
        let fd = fd_s(&c, &a, step_for(&c, &a));
        let scale = st.f.abs().max() * a.norm() + st.g.norm() + f.r * a.norm() + 1e-9;
        for j in 0..3 {
            let want = -st.k[j] * sat(st.s[j], st.phi[j]);
            prop_assert!((fd[j] - want).abs() < 1e-7 * scale, "j {j}: {} vs {want}", fd[j]);
        }
    }

    #[test]
    fn gains_dominate_every_bounded_disturbance(c in case(), w in prop::array::uniform3(-1.0..1.0f64)) {
        let f = build_frame(&c.s).unwrap();
        let (m, _) = build_f_g(&f, &c.target, &c.cfg).unwrap();
        let k = gains_from_bounds(&f, &c.target, &c.cfg).unwrap();
        let d = Vector3::from_fn(|i, _| w[i] * c.cfg.disturbance_bound[i]);
        let fd = m * d;
        for j in 0..3 {
            prop_assert!(fd[j].abs() <= k[j] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn safeguard_caps_the_plane_error(a in vec3(-1.0, 1.0), b in vec3(-1.0, 1.0), cap in 0.1..1.5f64) {
        prop_assume!(a.norm() > 0.1 && b.norm() > 0.1);
        let (a, b) = (a.normalize(), b.normalize());
        prop_assume!(a.dot(&b) > -0.99);
        let out = beta_safeguard(&a, &b, cap).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let beta = angle_between(&a, &b);
        prop_assert!((angle_between(&a, &out) - beta.min(cap)).abs() < 1e-9);
        prop_assert!(out.dot(&a.cross(&b)).abs() < 1e-9);
    }
}

#[test]
fn antiparallel_normals_are_an_error() {
    assert!(beta_safeguard(&Vector3::z(), &-Vector3::z(), 1.0).is_err());
}

#[test]
fn plane_only_law_commands_only_the_normal_axis() {
    let s = StateVector::new(Vector3::x(), Vector3::y(), 0.0);
    let f = build_frame(&s).unwrap();
    let n = Vector3::new(0.0, -0.5, 0.75f64.sqrt());
    let e_d = n.cross(&Vector3::x()).normalize() * 0.2;
    let target = OrbitTarget::new(n, e_d, 1.0).unwrap();
    for variant in [NormalLaw::Asymptotic, NormalLaw::FiniteTime] {
        let cfg = ControllerConfig {
            law: ControlLaw::PlaneOnly(variant),
            disturbance_bound: [0.0, 0.0, 0.05],
            ..ControllerConfig::default()
        };
        let cmd = control_full(&f, &target, &Vector3Rtn::ZERO, &cfg).unwrap();
        assert_eq!(cmd.u_rtn.r, 0.0);
        assert_eq!(cmd.u_rtn.t, 0.0);
        assert!(cmd.u_rtn.n != 0.0);
    }
}

#[test]
fn boundary_layer_modes() {
    let s = StateVector::new(Vector3::new(1.0, 0.2, 0.0), Vector3::new(0.1, 1.1, 0.1), 0.0);
    let f = build_frame(&s).unwrap();
    let e = eccentricity_vector(&s, 1.0).unwrap();
    let target = OrbitTarget::new(Vector3::z(), Vector3::new(e.x, e.y, 0.0) * 0.5, 1.0).unwrap();
    let mut cfg = ControllerConfig {
        disturbance_bound: [0.1; 3],
        ..ControllerConfig::default()
    };
    let st = sliding_state(&f, &target, &cfg).unwrap();
    for j in 0..3 {
        assert!((st.phi[j] - 0.05 * st.k[j]).abs() <= 1e-15 * st.k[j]);
    }
    cfg.boundary_layer = BoundaryLayer::Absolute([0.1, 0.2, 0.3]);
    assert_eq!(sliding_state(&f, &target, &cfg).unwrap().phi, [0.1, 0.2, 0.3]);
    cfg.gain_override = Some([1.0, 2.0, 3.0]);
    assert_eq!(sliding_state(&f, &target, &cfg).unwrap().k, [1.0, 2.0, 3.0]);
}

#[test]
fn config_serde_round_trip() {
    let cfg = ControllerConfig {
        law: ControlLaw::PlaneOnly(NormalLaw::FiniteTime),
        switching: Switching::Sign,
        boundary_layer: BoundaryLayer::MultipleOfGain(2.0),
        ..ControllerConfig::default()
    };
    let js = serde_json::to_string(&cfg).unwrap();
    assert_eq!(serde_json::from_str::<ControllerConfig>(&js).unwrap(), cfg);
}
