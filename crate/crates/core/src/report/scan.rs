use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nearhorizon::{integrate_ode4, periodicity_check, trajectory_field, Window};
use crate::odesolve::{StopReason, Trajectory};

use super::format::csv_f64;

/// `|h|` above this counts as a blow-up even if the integrator kept going.
const BLOWUP_LEVEL: f64 = 1e8;
const SAMPLES: usize = 2001;

pub const SCAN_HEADER: &str = "c,status,x_start,x_end,min_h,max_h,blowup,periodic,closed_form_dev";

/// Initial jet for the scan, taken from a closed-form member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanSeed {
    /// `h = x^2`, exact at `c = 1`.
    Quadratic,
    /// `h = -tanh x`, exact at `c = -1`.
    Tanh,
    /// `h = x`, exact at `c = 1`.
    Linear,
    /// `h = 0`: rejected by the guard.
    Zero,
}

impl FromStr for ScanSeed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(ScanSeed::Quadratic),
            "tanh" => Ok(ScanSeed::Tanh),
            "linear" => Ok(ScanSeed::Linear),
            "zero" => Ok(ScanSeed::Zero),
            _ => Err(Error::Parse(format!(
                "seed must be quadratic, tanh, linear or zero, got '{s}'"
            ))),
        }
    }
}

impl ScanSeed {
    /// `(h, h', h'', h''')` of the closed form at `x`.
    pub fn state(self, x: f64) -> [f64; 4] {
        match self {
            ScanSeed::Quadratic => [x * x, 2.0 * x, 2.0, 0.0],
            ScanSeed::Tanh => {
                let t = x.tanh();
                let s = 1.0 - t * t;
                [-t, -s, 2.0 * t * s, 2.0 * s * (1.0 - 3.0 * t * t)]
            }
            ScanSeed::Linear => [x, 1.0, 0.0, 0.0],
            ScanSeed::Zero => [0.0; 4],
        }
    }

    /// The `c` at which the closed form solves the fourth-order ODE.
    pub fn exact_c(self) -> Option<f64> {
        match self {
            ScanSeed::Quadratic | ScanSeed::Linear => Some(1.0),
            ScanSeed::Tanh => Some(-1.0),
            ScanSeed::Zero => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanStatus {
    Completed,
    /// `|h|` fell to the guard.
    Guard,
    /// Step size underflow or non-finite state.
    Blowup,
    MaxSteps,
    SingularStart,
    Error,
}

impl ScanStatus {
    pub fn name(self) -> &'static str {
        match self {
            ScanStatus::Completed => "completed",
            ScanStatus::Guard => "guard",
            ScanStatus::Blowup => "blowup",
            ScanStatus::MaxSteps => "max-steps",
            ScanStatus::SingularStart => "singular-start",
            ScanStatus::Error => "error",
        }
    }
}

/// One `c` value of a scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub c: f64,
    pub status: ScanStatus,
    pub x_start: f64,
    pub x_end: f64,
    pub min_h: f64,
    pub max_h: f64,
    pub blowup: bool,
    pub periodic: bool,
    /// Max deviation from the seed's closed form, when it is exact at `c`.
    pub closed_form_dev: Option<f64>,
}

impl ScanRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            csv_f64(self.c),
            self.status.name(),
            csv_f64(self.x_start),
            csv_f64(self.x_end),
            csv_f64(self.min_h),
            csv_f64(self.max_h),
            self.blowup,
            self.periodic,
            self.closed_form_dev.map(csv_f64).unwrap_or_default(),
        )
    }
}

pub fn write_scan_csv(rows: &[ScanRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Integrates the fourth-order ODE from the seed jet at `x0` over
/// `[x0, x0 + span]` for `steps` values of `c` spread over `[from, to]`.
/// Integration failures are recorded per row.
pub fn cmd_scan_c(
    from: f64,
    to: f64,
    steps: usize,
    seed: ScanSeed,
    x0: f64,
    span: f64,
) -> Result<Vec<ScanRow>> {
    if steps == 0 || !(from.is_finite() && to.is_finite()) || (steps > 1 && !(from < to)) {
        return Err(Error::InvalidParams(format!(
            "scan needs finite from < to and steps >= 1 (got {from}, {to}, {steps})"
        )));
    }
    if !(span > 0.0 && span.is_finite() && x0.is_finite()) {
        return Err(Error::InvalidParams(format!("scan needs a positive span, got {span}")));
    }
    let cs: Vec<f64> = if steps == 1 {
        vec![from]
    } else {
        Window::new(from, to).linspace(steps)
    };
    Ok(cs.par_iter().map(|&c| scan_one(c, seed, x0, span)).collect())
}

fn scan_one(c: f64, seed: ScanSeed, x0: f64, span: f64) -> ScanRow {
    let mut row = ScanRow {
        c,
        status: ScanStatus::Error,
        x_start: x0,
        x_end: x0,
        min_h: f64::NAN,
        max_h: f64::NAN,
        blowup: false,
        periodic: false,
        closed_form_dev: None,
    };
    let traj = match integrate_ode4(c, x0, seed.state(x0), x0 + span) {
        Ok(t) => t,
        Err(Error::SingularStart { .. }) => {
            row.status = ScanStatus::SingularStart;
            return row;
        }
        Err(_) => return row,
    };
    if traj.num_segments() == 0 {
        row.status = ScanStatus::SingularStart;
        return row;
    }
    row.status = match traj.stop {
        StopReason::Completed => ScanStatus::Completed,
        StopReason::Guard { .. } => ScanStatus::Guard,
        StopReason::StepUnderflow { .. } | StopReason::NonFinite { .. } => ScanStatus::Blowup,
        StopReason::MaxSteps { .. } => ScanStatus::MaxSteps,
    };
    row.x_start = traj.x_start();
    row.x_end = traj.x_end();
    let xs = Window::new(row.x_start, row.x_end).linspace(SAMPLES);
    let states: Vec<Vec<f64>> = xs.iter().filter_map(|&x| traj.eval(x)).collect();
    let hs: Vec<f64> = states.iter().map(|s| s[0]).collect();
    row.min_h = hs.iter().copied().fold(f64::INFINITY, f64::min);
    row.max_h = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    row.blowup = row.status == ScanStatus::Blowup || hs.iter().any(|h| h.abs() > BLOWUP_LEVEL);
    if seed.exact_c() == Some(c) {
        let dev = xs
            .iter()
            .zip(&hs)
            .map(|(&x, &h)| (h - seed.state(x)[0]).abs())
            .fold(0.0, f64::max);
        row.closed_form_dev = Some(dev);
    }
    row.periodic = detect_period(&xs, &states)
        .map(|t| periodic_on(traj, c, t))
        .unwrap_or(false);
    row
}

/// Spacing of the first two maxima of `h`, if there are two.
fn detect_period(xs: &[f64], states: &[Vec<f64>]) -> Option<f64> {
    let mut maxima = Vec::new();
    for i in 1..states.len() {
        if states[i - 1][1] > 0.0 && states[i][1] <= 0.0 {
            maxima.push(xs[i]);
            if maxima.len() == 2 {
                break;
            }
        }
    }
    match maxima[..] {
        [a, b] => Some(b - a),
        _ => None,
    }
}

fn periodic_on(traj: Trajectory, c: f64, period: f64) -> bool {
    let (lo, hi) = (traj.x_start(), traj.x_end() - period);
    if !(hi > lo) {
        return false;
    }
    let h = trajectory_field(Arc::new(traj), c, "scan trajectory");
    periodicity_check(&h, period, Window::new(lo, hi)).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_matches_closed_form_at_c_one() {
        let rows = cmd_scan_c(1.0, 1.0, 1, ScanSeed::Quadratic, 1.0, 2.0).unwrap();
        let r = &rows[0];
        assert_eq!(r.status, ScanStatus::Completed);
        assert!(r.closed_form_dev.unwrap() < 1e-7, "{r:?}");
        assert!(!r.periodic);
    }

    #[test]
    fn tanh_seed_at_c_minus_one_spans_window() {
        let rows = cmd_scan_c(-1.0, -1.0, 1, ScanSeed::Tanh, 1.0, 4.0).unwrap();
        let r = &rows[0];
        assert_eq!(r.status, ScanStatus::Completed);
        assert_eq!(r.x_end, 5.0);
        assert!(r.closed_form_dev.unwrap() < 1e-7, "{r:?}");
    }

    #[test]
    fn zero_seed_is_flagged() {
        let rows = cmd_scan_c(-1.0, 2.0, 4, ScanSeed::Zero, 1.0, 2.0).unwrap();
        assert!(rows.iter().all(|r| r.status == ScanStatus::SingularStart));
        assert!(rows[0].csv_line().contains(",singular-start,"));
    }

    #[test]
    fn rows_follow_c_order() {
        let rows = cmd_scan_c(-1.0, 2.0, 7, ScanSeed::Linear, 1.0, 1.0).unwrap();
        let cs: Vec<f64> = rows.iter().map(|r| r.c).collect();
        assert_eq!(cs, Window::new(-1.0, 2.0).linspace(7));
    }

    #[test]
    fn bad_ranges() {
        assert!(cmd_scan_c(1.0, 0.0, 3, ScanSeed::Linear, 1.0, 1.0).is_err());
        assert!(cmd_scan_c(0.0, 1.0, 0, ScanSeed::Linear, 1.0, 1.0).is_err());
        assert!(cmd_scan_c(0.0, 1.0, 3, ScanSeed::Linear, 1.0, -1.0).is_err());
    }
}
