//! Verification driver: resolves a check id into a residual pipeline,
//! samples it over a grid in parallel and renders reports.
//!
//! Reports are deterministic. Grid points are evaluated on the rayon pool
//! with an ordered collect, reductions run sequentially in grid order, and
//! floats are written with 17 significant digits. Wall time appears in the
//! JSON only on request.

mod checks;
mod format;
mod grid;
mod params;
mod scan;

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jets::Point;

pub use checks::{anchor, check_ids, JET_TOLERANCE, NUMERIC_TOLERANCE};
pub use format::{csv_f64, json_f64};
pub use grid::{parse_axis, AxisSpec, GridSpec, DEFAULT_COUNT};
pub use params::{parse_config, parse_f64, CheckParams, ParamValue};
pub use scan::{cmd_scan_c, write_scan_csv, ScanRow, ScanSeed, ScanStatus, SCAN_HEADER};

pub const TOOL: &str = "ewh";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA: u32 = 1;

/// Outcome of one verification run.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub check: String,
    pub anchor: &'static str,
    pub params: Vec<(String, ParamValue)>,
    pub grid: GridSpec,
    pub tolerance: f64,
    /// Max-abs residual per component, in evaluation order.
    pub components: Vec<(String, f64)>,
    pub overall_max: f64,
    pub pass: bool,
    pub expect_fail: bool,
    pub version: &'static str,
    pub wall_time_s: f64,
    /// Per-point residuals, `nu` slowest.
    pub samples: Vec<(Point, Vec<f64>)>,
}

impl ResidualReport {
    /// 0 when the outcome matches the expectation, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass != self.expect_fail {
            0
        } else {
            2
        }
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {} ({} points) max = {:.3e}, tol = {:.1e}{}\n  anchor: \"{}\"\n",
            self.check,
            self.grid.len(),
            self.overall_max,
            self.tolerance,
            if self.expect_fail { " [failure expected]" } else { "" },
            self.anchor,
        );
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if !params.is_empty() {
            s += &format!("  params: {}\n", params.join(" "));
        }
        s += &format!(
            "  grid: nu={} r={} x={}\n",
            self.grid.nu, self.grid.r, self.grid.x
        );
        for (n, v) in &self.components {
            s += &format!("  {n:<24} {v:.3e}\n");
        }
        s += &format!("  time: {:.3} s\n", self.wall_time_s);
        s
    }

    /// Versioned flat JSON with fixed key order.
    pub fn to_json(&self, with_timing: bool) -> String {
        format::report_json(self, with_timing)
    }

    /// Per-point residual table: `nu,r,x,<components>`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let names: Vec<&str> = self.components.iter().map(|(n, _)| n.as_str()).collect();
        writeln!(out, "nu,r,x,{}", names.join(","))?;
        for (p, v) in &self.samples {
            let cells: Vec<String> = v.iter().map(|x| csv_f64(*x)).collect();
            writeln!(out, "{},{},{},{}", csv_f64(p.nu), csv_f64(p.r), csv_f64(p.x), cells.join(","))?;
        }
        Ok(())
    }
}

/// NaN-propagating max.
fn nan_max(acc: f64, v: f64) -> f64 {
    if v.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(v)
    }
}

/// Runs check `check` with `params`. `grid` holds overrides of the form
/// `axis=min:max:count`; `tolerance` replaces the check default.
pub fn cmd_verify(
    check: &str,
    params: &CheckParams,
    grid: &[String],
    tolerance: Option<f64>,
    expect_fail: bool,
) -> Result<ResidualReport> {
    let start = Instant::now();
    let plan = checks::build_plan(check, params)?;
    let mut spec = plan.grid;
    for g in grid {
        spec.apply(g)?;
    }
    spec.validate(plan.admissible)?;
    let tolerance = tolerance.unwrap_or(plan.tolerance);
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tolerance}")));
    }
    let points = spec.points();
    let eval = &plan.eval;
    let values: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&p| eval(p))
        .collect::<Result<Vec<_>>>()?;
    let n = plan.components.len();
    let mut maxima = vec![0.0f64; n];
    for v in &values {
        if v.len() != n {
            return Err(Error::InvalidParams(format!(
                "check {check} produced {} components, expected {n}",
                v.len()
            )));
        }
        for (m, x) in maxima.iter_mut().zip(v) {
            *m = nan_max(*m, *x);
        }
    }
    let overall = maxima.iter().copied().fold(0.0, nan_max);
    Ok(ResidualReport {
        check: plan.check,
        anchor: plan.anchor,
        params: plan.params,
        grid: spec,
        tolerance,
        components: plan.components.into_iter().zip(maxima).collect(),
        overall_max: overall,
        pass: overall < tolerance,
        expect_fail,
        version: VERSION,
        wall_time_s: start.elapsed().as_secs_f64(),
        samples: points.into_iter().zip(values).collect(),
    })
}

/// Sampling axis for plot export.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotAxis {
    Nu,
    R,
    X,
}

impl std::str::FromStr for PlotAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nu" => Ok(PlotAxis::Nu),
            "r" => Ok(PlotAxis::R),
            "x" => Ok(PlotAxis::X),
            _ => Err(Error::Parse(format!("axis must be x, r or nu, got '{s}'"))),
        }
    }
}

/// Plot export request. `range` replaces the default extent of the sampled
/// axis; `at` fixes the other coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotRequest {
    pub axis: PlotAxis,
    pub samples: usize,
    pub range: Option<(f64, f64)>,
    pub at: Option<Point>,
}

/// Rendered plot data.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Requested samples dropped because they left the admissible window.
    pub clipped: bool,
}

impl PlotData {
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| csv_f64(*x)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        if self.clipped {
            writeln!(out, "# window-clipped")?;
        }
        Ok(())
    }
}

/// Samples the largest residual component of `check` along one axis.
///
/// Along `x`, checks built on near-horizon data emit `x,h,F,residual`;
/// everything else emits `nu,r,x,residual`. Samples outside the admissible
/// window are dropped and flagged.
pub fn cmd_export_plot(check: &str, params: &CheckParams, req: &PlotRequest) -> Result<PlotData> {
    if req.samples < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 samples, got {}", req.samples)));
    }
    let plan = checks::build_plan(check, params)?;
    let g = plan.grid;
    let mid = |a: AxisSpec| 0.5 * (a.min + a.max);
    let base = req.at.unwrap_or(Point::new(0.5, 0.5, mid(g.x)));
    if !plan.admissible.contains(base.x) {
        return Err(Error::Window {
            what: "plot base point".into(),
            x: base.x,
            lo: plan.admissible.lo,
            hi: plan.admissible.hi,
        });
    }
    let default = match req.axis {
        PlotAxis::Nu => g.nu,
        PlotAxis::R => g.r,
        PlotAxis::X => g.x,
    };
    let (lo, hi) = req.range.unwrap_or((default.min, default.max));
    if !(lo < hi) {
        return Err(Error::InvalidParams(format!("plot range needs min < max, got {lo}:{hi}")));
    }
    let ts = AxisSpec::new(lo, hi, req.samples).samples();
    let mut points = Vec::with_capacity(ts.len());
    let mut clipped = false;
    for t in ts {
        let p = match req.axis {
            PlotAxis::Nu => Point::new(t, base.r, base.x),
            PlotAxis::R => Point::new(base.nu, t, base.x),
            PlotAxis::X => Point::new(base.nu, base.r, t),
        };
        if plan.admissible.contains(p.x) {
            points.push(p);
        } else {
            clipped = true;
        }
    }
    let profile = match req.axis {
        PlotAxis::X => plan.profile.clone(),
        _ => None,
    };
    let eval = &plan.eval;
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&p| -> Result<Vec<f64>> {
            let res = eval(p)?.into_iter().fold(0.0, nan_max);
            Ok(match &profile {
                Some(pr) => vec![p.x, pr.h.value(p.x)?, pr.f.value(p.x)?, res],
                None => vec![p.nu, p.r, p.x, res],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let header = if profile.is_some() {
        vec!["x", "h", "F", "residual"]
    } else {
        vec!["nu", "r", "x", "residual"]
    };
    Ok(PlotData { header, rows, clipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(check: &str, pairs: &[(&str, &str)]) -> ResidualReport {
        cmd_verify(check, &CheckParams::from_pairs(pairs.iter().copied()), &[], None, false).unwrap()
    }

    #[test]
    fn thm1_zero_passes() {
        let r = run("thm1", &[("h", "zero"), ("a", "0.1"), ("b", "1.0")]);
        assert!(r.pass, "{}", r.summary());
        assert_eq!(r.tolerance, JET_TOLERANCE);
        assert_eq!(r.grid.len(), 125);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn overall_is_max_of_components() {
        let r = run("thm1", &[("h", "sin")]);
        let m = r.components.iter().map(|c| c.1).fold(0.0, f64::max);
        assert_eq!(m, r.overall_max);
        assert_eq!(r.pass, r.overall_max < r.tolerance);
    }

    #[test]
    fn prop1_converse_fails_with_expectation() {
        let p = CheckParams::from_pairs([("h", "one"), ("F", "one")]);
        let r = cmd_verify("prop1-iff", &p, &[], None, true).unwrap();
        assert!(!r.pass);
        assert!(r.component("cotton").unwrap() > 1e-4);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn family_linear_example() {
        let r = run("family:linear", &[("l", "1"), ("b", "0"), ("c", "1")]);
        assert!(r.pass, "{}", r.summary());
    }

    #[test]
    fn grid_outside_window_is_rejected() {
        let p = CheckParams::from_pairs([("c", "0")]);
        let e = cmd_verify("family:tan", &p, &["x=0:5:5".into()], None, false).unwrap_err();
        assert!(matches!(e, Error::Window { .. }), "{e}");
    }

    #[test]
    fn json_is_stable() {
        let a = run("dkp", &[]).to_json(false);
        let b = run("dkp", &[]).to_json(false);
        assert_eq!(a, b);
        assert!(a.starts_with("{\n  \"schema\": 1,"));
        assert!(!a.contains("wall_time"));
    }

    #[test]
    fn plot_rows_and_clipping() {
        let req = PlotRequest { axis: PlotAxis::X, samples: 200, range: None, at: None };
        let d = cmd_export_plot("thm1", &CheckParams::new(), &req).unwrap();
        assert_eq!(d.rows.len(), 200);
        assert_eq!(d.header, vec!["x", "h", "F", "residual"]);
        assert!(!d.clipped);

        let p = CheckParams::from_pairs([("c", "0")]);
        let req = PlotRequest { axis: PlotAxis::X, samples: 50, range: Some((0.5, 3.0)), at: None };
        let d = cmd_export_plot("family:tan", &p, &req).unwrap();
        assert!(d.clipped);
        assert!(d.rows.len() < 50);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("# window-clipped\n"));
    }

    #[test]
    fn plot_dkp_over_r() {
        let req = PlotRequest { axis: PlotAxis::R, samples: 40, range: None, at: None };
        let d = cmd_export_plot("dkp", &CheckParams::new(), &req).unwrap();
        assert_eq!(d.header, vec!["nu", "r", "x", "residual"]);
        assert!(d.rows.iter().all(|r| r[3] < 1e-8));
    }
}
