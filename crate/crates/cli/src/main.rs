//! `ewh`: runs Einstein-Weyl verification checks from the command line.
//!
//! Exit codes: 0 when a check meets its expectation, 2 when it does not,
//! 1 for usage and runtime errors.

mod split;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ewh_core::jets::Point;
use ewh_core::report::{
    cmd_export_plot, cmd_scan_c, cmd_verify, parse_config, parse_f64, write_scan_csv,
    CheckParams, PlotAxis, PlotRequest, ScanSeed,
};

#[derive(Parser, Debug)]
#[command(name = "ewh", version, about = "Verify Einstein-Weyl structures on near-horizon metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a check over a grid and compare against its tolerance.
    ///
    /// Check parameters are passed as `--name value` after the check id,
    /// e.g. `ewh verify thm1 --h sin --a 0.1 --b 1`.
    Verify {
        /// thm1, thm2-ode, prop1-iff, dkp, hypercr-family, prop4,
        /// family:<tag> or chalf-Fode.
        check: String,
        /// Axis override `axis=min:max:count`; repeatable.
        #[arg(long = "grid", value_name = "SPEC")]
        grid: Vec<String>,
        /// Pass threshold for the overall max residual.
        #[arg(long)]
        tol: Option<f64>,
        /// Exit 0 when the check fails and 2 when it passes.
        #[arg(long)]
        expect_fail: bool,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write per-point residuals here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// `key = value` parameter file; command-line values win.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Include wall time in the JSON report.
        #[arg(long)]
        with_timing: bool,
        /// Suppress the summary on stdout.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Integrate the fourth-order ODE for a range of c from a seed jet.
    ScanC {
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// quadratic, tanh, linear or zero.
        #[arg(long)]
        seed: String,
        /// Start of integration.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x0: f64,
        /// Length of the integration interval.
        #[arg(long, default_value_t = 4.0)]
        span: f64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sample a check's largest residual along one axis as CSV.
    ExportPlot {
        check: String,
        /// x, r or nu.
        #[arg(long)]
        axis: String,
        #[arg(long)]
        samples: usize,
        /// Extent `min:max` of the sampled axis.
        #[arg(long, allow_negative_numbers = true)]
        range: Option<String>,
        /// Fixed coordinates `nu,r,x` for the other axes.
        #[arg(long, allow_negative_numbers = true)]
        at: Option<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let (argv, pairs) = match split::split_params(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match with_pool(|| run(cli, pairs)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Runs `f` on a pool capped by `EWH_THREADS`, or on the global pool.
fn with_pool(f: impl FnOnce() -> Result<u8> + Send) -> Result<u8> {
    match std::env::var("EWH_THREADS") {
        Ok(s) if !s.trim().is_empty() => {
            let n: usize = s
                .trim()
                .parse()
                .ok()
                .filter(|n| *n > 0)
                .with_context(|| format!("EWH_THREADS must be a positive integer, got '{s}'"))?;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(f)
        }
        _ => f(),
    }
}

fn load_params(pairs: Vec<(String, String)>, config: Option<&Path>) -> Result<CheckParams> {
    let cli = CheckParams::from_pairs(pairs);
    Ok(match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            cli.with_defaults_from(&parse_config(&text)?)
        }
        None => cli,
    })
}

/// `family` plus a `tag` parameter names the family check.
fn resolve_check(check: &str, params: &mut CheckParams) -> Result<String> {
    match (check, params.remove("tag")) {
        ("family", Some(tag)) => Ok(format!("family:{tag}")),
        ("family", None) => bail!("check 'family' needs a tag (--tag or 'tag = ...' in the config)"),
        (_, Some(_)) => bail!("only the 'family' check takes a tag"),
        (c, None) => Ok(c.to_string()),
    }
}

fn write_out(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            body(&mut buf)?;
            fs::write(p, buf).with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || anyhow::anyhow!("range '{s}' must look like min:max");
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((parse_f64(a).ok_or_else(bad)?, parse_f64(b).ok_or_else(bad)?))
}

fn parse_point(s: &str) -> Result<Point> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| parse_f64(t).ok_or_else(|| anyhow::anyhow!("'{s}' must look like nu,r,x")))
        .collect::<Result<_>>()?;
    match v[..] {
        [nu, r, x] => Ok(Point::new(nu, r, x)),
        _ => bail!("'{s}' must look like nu,r,x"),
    }
}

fn run(cli: Cli, pairs: Vec<(String, String)>) -> Result<u8> {
    match cli.command {
        Command::Verify {
            check,
            grid,
            tol,
            expect_fail,
            json,
            csv,
            config,
            with_timing,
            quiet,
        } => {
            let mut params = load_params(pairs, config.as_deref())?;
            let check = resolve_check(&check, &mut params)?;
            let report = cmd_verify(&check, &params, &grid, tol, expect_fail)?;
            if !quiet {
                print!("{}", report.summary());
            }
            if let Some(p) = json {
                fs::write(&p, report.to_json(with_timing))
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            if let Some(p) = csv {
                write_out(Some(&p), |w| report.write_csv(&mut WriteRef(w)))?;
            }
            Ok(report.exit_code() as u8)
        }
        Command::ScanC {
            from,
            to,
            steps,
            seed,
            x0,
            span,
            csv,
        } => {
            if !pairs.is_empty() {
                bail!("scan-c takes no check parameters");
            }
            let seed: ScanSeed = seed.parse()?;
            let rows = cmd_scan_c(from, to, steps, seed, x0, span)?;
            write_out(csv.as_deref(), |w| write_scan_csv(&rows, &mut WriteRef(w)))?;
            Ok(0)
        }
        Command::ExportPlot {
            check,
            axis,
            samples,
            range,
            at,
            csv,
            config,
        } => {
            let mut params = load_params(pairs, config.as_deref())?;
            let check = resolve_check(&check, &mut params)?;
            let req = PlotRequest {
                axis: axis.parse::<PlotAxis>()?,
                samples,
                range: range.as_deref().map(parse_range).transpose()?,
                at: at.as_deref().map(parse_point).transpose()?,
            };
            let data = cmd_export_plot(&check, &params, &req)?;
            write_out(csv.as_deref(), |w| data.write_csv(&mut WriteRef(w)))?;
            Ok(0)
        }
    }
}

/// Adapts `&mut dyn Write` to the `impl Write` writers of the core crate.
struct WriteRef<'a>(&'a mut dyn Write);

impl Write for WriteRef<'_> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.0.flush()
    }
}
