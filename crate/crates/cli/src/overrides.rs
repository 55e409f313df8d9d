//! `key=value` overrides applied to the JSON form of a scenario.
//!
//! Keys are either short aliases or dotted paths into the scenario
//! (`controller.lambda_r`, `sim.blackout.1`). Values are parsed as JSON,
//! falling back to a bare string; `none` means null and a trailing `%`
//! divides a number by 100. The result is type-checked when the scenario is
//! deserialized again.

use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub value: Value,
}

/// Short names for the common knobs.
pub const ALIASES: [(&str, &str); 20] = [
    ("dt", "sim.dt"),
    ("control_dt", "sim.control_dt"),
    ("duration", "sim.duration"),
    ("actuator_limit", "sim.actuator_limit"),
    ("blackout", "sim.blackout"),
    ("escape_radius", "sim.escape_radius"),
    ("control_enabled", "sim.control_enabled"),
    ("decimate", "sim.decimate"),
    ("lambda_r", "controller.lambda_r"),
    ("lambda_n", "controller.lambda_n"),
    ("D", "controller.disturbance_bound"),
    ("D_R", "controller.disturbance_bound.0"),
    ("D_T", "controller.disturbance_bound.1"),
    ("D_N", "controller.disturbance_bound.2"),
    ("switching", "controller.switching"),
    ("gain_margin", "controller.gain_margin"),
    ("gain_override", "controller.gain_override"),
    ("beta_safe_max_deg", "controller.beta_safe_max_deg"),
    ("phi_fraction", "controller.boundary_layer"),
    ("phi_multiple", "controller.boundary_layer"),
];

fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    if raw.eq_ignore_ascii_case("none") {
        return Value::Null;
    }
    if let Some(pct) = raw.strip_suffix('%') {
        if let Ok(x) = pct.trim().parse::<f64>() {
            return json!(x / 100.0);
        }
    }
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

pub fn parse_override(raw: &str) -> Result<Override, String> {
    let (key, val) = raw
        .split_once('=')
        .ok_or_else(|| format!("override '{raw}' is not key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(format!("override '{raw}' has an empty key"));
    }
    let mut value = parse_value(val);
    let path = match ALIASES.iter().find(|(a, _)| *a == key) {
        Some((alias, target)) => {
            match *alias {
                "phi_fraction" => value = json!({"mode": "fraction_of_gain", "value": value}),
                "phi_multiple" => value = json!({"mode": "multiple_of_gain", "value": value}),
                "D" if value.is_number() => value = json!([value, value, value]),
                _ => {}
            }
            *target
        }
        None => key,
    };
    Ok(Override {
        path: path.split('.').map(str::to_string).collect(),
        value,
    })
}

/// Replaces the value at `ov.path`. Every parent must already exist, so a
/// mistyped key is an error instead of a silently ignored field.
pub fn apply_override(root: &mut Value, ov: &Override) -> Result<(), String> {
    let dotted = ov.path.join(".");
    let mut node = root;
    for seg in &ov.path {
        node = match node {
            Value::Object(map) => map
                .get_mut(seg.as_str())
                .ok_or_else(|| format!("unknown key '{dotted}' (no field '{seg}')"))?,
            Value::Array(items) => {
                let len = items.len();
                let i: usize = seg
                    .parse()
                    .map_err(|_| format!("'{dotted}': '{seg}' is not an array index"))?;
                items
                    .get_mut(i)
                    .ok_or_else(|| format!("'{dotted}': index {i} out of range (len {len})"))?
            }
            _ => return Err(format!("'{dotted}': cannot descend into '{seg}'")),
        };
    }
    *node = ov.value.clone();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_and_values() {
        let o = parse_override("duration=3600").unwrap();
        assert_eq!(o.path, ["sim", "duration"]);
        assert_eq!(o.value, json!(3600));
        assert_eq!(parse_override("phi_fraction=5%").unwrap().value, json!({"mode": "fraction_of_gain", "value": 0.05}));
        assert_eq!(parse_override("D=0.5").unwrap().value, json!([0.5, 0.5, 0.5]));
        assert_eq!(parse_override("switching=sign").unwrap().value, json!("sign"));
        assert_eq!(parse_override("blackout=none").unwrap().value, Value::Null);
        assert_eq!(parse_override("sim.blackout.1=380").unwrap().path, ["sim", "blackout", "1"]);
        assert!(parse_override("dt").is_err());
        assert!(parse_override("=3").is_err());
    }

    #[test]
    fn unknown_paths_fail() {
        let mut v = json!({"sim": {"dt": 0.1, "blackout": [1.0, 2.0]}});
        apply_override(&mut v, &parse_override("sim.blackout.1=3").unwrap()).unwrap();
        assert_eq!(v["sim"]["blackout"], json!([1.0, 3]));
        assert!(apply_override(&mut v, &parse_override("sim.dtt=1").unwrap()).is_err());
        assert!(apply_override(&mut v, &parse_override("sim.blackout.5=1").unwrap()).is_err());
        assert!(apply_override(&mut v, &parse_override("sim.dt.x=1").unwrap()).is_err());
    }
}
