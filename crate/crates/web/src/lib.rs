//! Browser bindings: run a built-in scenario with a few knobs, trace the
//! eccentricity decay for a chosen slope, and sample target conics.
//!
//! Errors come back as strings, which JavaScript sees as thrown values.

use conicpath::control::{BoundaryLayer, Switching};
use conicpath::scenario::{builtin, decay_scenario, decay_slope, settled_capture, BUILTIN_SCENARIOS};
use conicpath::{compute_metrics, OrbitTarget, Vector3};
use wasm_bindgen::prelude::*;

/// Names accepted by [`simulate`], comma-separated.
#[wasm_bindgen]
pub fn scenario_names() -> String {
    BUILTIN_SCENARIOS.join(",")
}

/// Logged series of one closed-loop run, flattened for typed arrays.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct RunResult {
    t: Vec<f64>,
    r: Vec<f64>,
    rel_r: Vec<f64>,
    u_rtn: Vec<f64>,
    s_over_phi: Vec<f64>,
    target: Vec<u32>,
    conics: Vec<f64>,
    anchors: Vec<f64>,
    metrics_json: String,
}

#[wasm_bindgen]
impl RunResult {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    /// inertial position, xyz per sample
    #[wasm_bindgen(getter)]
    pub fn r(&self) -> Vec<f64> {
        self.r.clone()
    }

    /// position relative to the active reference, xyz per sample
    #[wasm_bindgen(getter)]
    pub fn rel_r(&self) -> Vec<f64> {
        self.rel_r.clone()
    }

    /// RTN command, three values per sample
    #[wasm_bindgen(getter)]
    pub fn u_rtn(&self) -> Vec<f64> {
        self.u_rtn.clone()
    }

    /// |s_j| / phi_j, three values per sample
    #[wasm_bindgen(getter)]
    pub fn s_over_phi(&self) -> Vec<f64> {
        self.s_over_phi.clone()
    }

    /// active target index per sample
    #[wasm_bindgen(getter)]
    pub fn target(&self) -> Vec<u32> {
        self.target.clone()
    }

    /// Every target conic, `CONIC_POINTS` xyz points each, about its own anchor.
    #[wasm_bindgen(getter)]
    pub fn conics(&self) -> Vec<f64> {
        self.conics.clone()
    }

    /// centre of each target conic, xyz per target
    #[wasm_bindgen(getter)]
    pub fn anchors(&self) -> Vec<f64> {
        self.anchors.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn metrics_json(&self) -> String {
        self.metrics_json.clone()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

pub const CONIC_POINTS: usize = 360;

/// Runs a built-in scenario.
///
/// `layer_scale` multiplies the scenario's boundary-layer coefficient;
/// `sign_switching` replaces the saturation by the discontinuous sign.
/// The log is decimated to at most `max_points` samples.
#[wasm_bindgen]
pub fn simulate(
    name: &str,
    lambda_r: f64,
    layer_scale: f64,
    sign_switching: bool,
    duration: f64,
    max_points: usize,
) -> Result<RunResult, String> {
    let mut sc = builtin(name).ok_or_else(|| format!("unknown scenario '{name}'; try {}", scenario_names()))?;
    if !(layer_scale > 0.0 && layer_scale.is_finite()) {
        return Err(format!("layer scale must be positive, got {layer_scale}"));
    }
    sc.controller.lambda_r = lambda_r;
    sc.controller.boundary_layer = match sc.controller.boundary_layer {
        BoundaryLayer::FractionOfGain(c) => BoundaryLayer::FractionOfGain(c * layer_scale),
        BoundaryLayer::MultipleOfGain(c) => BoundaryLayer::MultipleOfGain(c * layer_scale),
        BoundaryLayer::Absolute(w) => BoundaryLayer::Absolute(w.map(|x| x * layer_scale)),
    };
    if sign_switching {
        sc.controller.switching = Switching::Sign;
    }
    sc.sim.duration = duration;
    let ticks = (duration / sc.sim.control_dt()).ceil() as usize + 1;
    let step = ticks.div_ceil(max_points.max(2)).max(1);

    let log = sc.run().map_err(|e| e.to_string())?;
    let metrics = compute_metrics(&log, &sc).map_err(|e| e.to_string())?;
    let shown = log.decimated(step);
    let recs = &shown.records;
    let flat = |f: &dyn Fn(&conicpath::sim::LogRecord) -> [f64; 3]| recs.iter().flat_map(f).collect::<Vec<f64>>();
    let conics = (0..sc.guidance.len())
        .flat_map(|i| conic_samples(sc.guidance.target(i), CONIC_POINTS))
        .collect();
    Ok(RunResult {
        t: recs.iter().map(|r| r.t).collect(),
        r: flat(&|r| r.r),
        rel_r: flat(&|r| r.rel_r),
        u_rtn: flat(&|r| r.u_rtn),
        s_over_phi: flat(&|r| std::array::from_fn(|j| if r.phi[j] > 0.0 { r.s[j].abs() / r.phi[j] } else { 0.0 })),
        target: recs.iter().map(|r| r.target as u32).collect(),
        conics,
        anchors: (0..sc.guidance.len()).flat_map(|i| <[f64; 3]>::from(sc.guidance.anchor(i))).collect(),
        metrics_json: serde_json::to_string(&metrics).map_err(|e| e.to_string())?,
    })
}

/// ln|e~_R| against swept angle once the surfaces have settled.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct DecayCurve {
    theta: Vec<f64>,
    ln_err: Vec<f64>,
    slope: f64,
}

#[wasm_bindgen]
impl DecayCurve {
    #[wasm_bindgen(getter)]
    pub fn theta(&self) -> Vec<f64> {
        self.theta.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn ln_err(&self) -> Vec<f64> {
        self.ln_err.clone()
    }

    /// least-squares slope, expected near -lambda_r
    #[wasm_bindgen(getter)]
    pub fn slope(&self) -> f64 {
        self.slope
    }
}

/// Disturbance-free run about a point mass with eccentricity slope `lambda_r`.
#[wasm_bindgen]
pub fn decay_curve(lambda_r: f64) -> Result<DecayCurve, String> {
    let sc = decay_scenario(lambda_r);
    let log = sc.run().map_err(|e| e.to_string())?;
    let tc = settled_capture(&log.records, log.control_dt).ok_or("surfaces never settled")?;
    let slope = decay_slope(&log.records, &sc.guidance, tc, 1e-9).ok_or("too few settled samples")?;
    let e_d = sc.guidance.target(0).e_d();
    let mut theta = Vec::new();
    let mut ln_err = Vec::new();
    let mut swept = 0.0;
    for (i, r) in log.records.iter().enumerate() {
        let rel = Vector3::from(r.rel_r);
        if i > 0 {
            let p = &log.records[i - 1];
            let pr = Vector3::from(p.rel_r).norm_squared();
            swept += 0.5 * (p.h / pr + r.h / rel.norm_squared()) * (r.t - p.t);
        }
        if r.t < tc || i % 10 != 0 {
            continue;
        }
        let e_r = (Vector3::from(r.e) - e_d).dot(&rel.normalize()).abs();
        if e_r <= 1e-9 {
            break;
        }
        theta.push(swept);
        ln_err.push(e_r.ln());
    }
    Ok(DecayCurve { theta, ln_err, slope })
}

/// Samples the conic with invariants `h_d`, `e_d` and `mu` as xyz triples.
#[wasm_bindgen]
pub fn conic_points(h_d: &[f64], e_d: &[f64], mu: f64, n: usize) -> Result<Vec<f64>, String> {
    let v3 = |a: &[f64], what: &str| -> Result<Vector3, String> {
        <[f64; 3]>::try_from(a)
            .map(Vector3::from)
            .map_err(|_| format!("{what} needs 3 components, got {}", a.len()))
    };
    let target = OrbitTarget::new(v3(h_d, "h_d")?, v3(e_d, "e_d")?, mu).map_err(|e| e.to_string())?;
    Ok(conic_samples(&target, n))
}

fn conic_samples(target: &OrbitTarget, n: usize) -> Vec<f64> {
    target.sample(n, 0.05).iter().flat_map(|p| [p.x, p.y, p.z]).collect()
}
