use super::grid::AxisSpec;
use super::params::ParamValue;
use super::{ResidualReport, SCHEMA, TOOL};

/// 17 significant digits; non-finite values become `null`.
pub fn json_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// 17 significant digits; non-finite values spelled `nan`, `inf`, `-inf`.
pub fn csv_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn axis(a: &AxisSpec) -> String {
    format!(
        "{{\"min\": {}, \"max\": {}, \"count\": {}}}",
        json_f64(a.min),
        json_f64(a.max),
        a.count
    )
}

fn object(entries: &[(String, String)], indent: &str) -> String {
    if entries.is_empty() {
        return "{}".to_string();
    }
    let body: Vec<String> = entries
        .iter()
        .map(|(k, v)| format!("{indent}  {}: {v}", json_str(k)))
        .collect();
    format!("{{\n{}\n{indent}}}", body.join(",\n"))
}

pub(crate) fn report_json(r: &ResidualReport, with_timing: bool) -> String {
    let params: Vec<(String, String)> = r
        .params
        .iter()
        .map(|(k, v)| {
            let v = match v {
                ParamValue::Num(x) => json_f64(*x),
                ParamValue::Text(s) => json_str(s),
            };
            (k.clone(), v)
        })
        .collect();
    let grid = vec![
        ("nu".to_string(), axis(&r.grid.nu)),
        ("r".to_string(), axis(&r.grid.r)),
        ("x".to_string(), axis(&r.grid.x)),
    ];
    let comps: Vec<(String, String)> =
        r.components.iter().map(|(k, v)| (k.clone(), json_f64(*v))).collect();
    let mut top = vec![
        ("schema".to_string(), SCHEMA.to_string()),
        ("tool".to_string(), json_str(TOOL)),
        ("version".to_string(), json_str(r.version)),
        ("check".to_string(), json_str(&r.check)),
        ("anchor".to_string(), json_str(r.anchor)),
        ("params".to_string(), object(&params, "  ")),
        ("grid".to_string(), object(&grid, "  ")),
        ("points".to_string(), r.grid.len().to_string()),
        ("tolerance".to_string(), json_f64(r.tolerance)),
        ("components".to_string(), object(&comps, "  ")),
        ("overall_max".to_string(), json_f64(r.overall_max)),
        ("pass".to_string(), r.pass.to_string()),
        ("expect_fail".to_string(), r.expect_fail.to_string()),
        ("exit_code".to_string(), r.exit_code().to_string()),
    ];
    if with_timing {
        top.push(("wall_time_s".to_string(), json_f64(r.wall_time_s)));
    }
    object(&top, "") + "\n"
}
