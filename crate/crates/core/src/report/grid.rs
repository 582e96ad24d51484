use std::fmt;

use crate::error::{Error, Result};
use crate::jets::Point;
use crate::nearhorizon::Window;

use super::params::parse_f64;

/// `count` evenly spaced samples of `[min, max]`, both ends included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn from_window(w: Window, count: usize) -> Self {
        Self::new(w.lo, w.hi, count)
    }

    pub fn samples(&self) -> Vec<f64> {
        Window::new(self.min, self.max).linspace(self.count)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidParams(format!(
                "grid axis {name} needs at least 2 points, got {}",
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidParams(format!(
                "grid axis {name} needs finite min < max, got {}:{}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

/// Tensor-product sampling grid over `(nu, r, x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nu: AxisSpec,
    pub r: AxisSpec,
    pub x: AxisSpec,
}

pub const DEFAULT_COUNT: usize = 5;

impl GridSpec {
    /// `nu, r` in `[-1, 1]`, `x` over `window`, 5 points per axis.
    pub fn default_for(window: Window) -> Self {
        Self {
            nu: AxisSpec::new(-1.0, 1.0, DEFAULT_COUNT),
            r: AxisSpec::new(-1.0, 1.0, DEFAULT_COUNT),
            x: AxisSpec::from_window(window, DEFAULT_COUNT),
        }
    }

    pub fn axis_mut(&mut self, name: &str) -> Result<&mut AxisSpec> {
        match name {
            "nu" => Ok(&mut self.nu),
            "r" => Ok(&mut self.r),
            "x" => Ok(&mut self.x),
            _ => Err(Error::Parse(format!("unknown grid axis '{name}' (nu, r or x)"))),
        }
    }

    pub fn axis(&self, name: &str) -> Result<AxisSpec> {
        match name {
            "nu" => Ok(self.nu),
            "r" => Ok(self.r),
            "x" => Ok(self.x),
            _ => Err(Error::Parse(format!("unknown grid axis '{name}' (nu, r or x)"))),
        }
    }

    /// Applies overrides of the form `axis=min:max:count`, comma separated.
    pub fn apply(&mut self, spec: &str) -> Result<()> {
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, rest) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("grid override '{part}' lacks '='")))?;
            let axis = parse_axis(rest)?;
            *self.axis_mut(name.trim())? = axis;
        }
        Ok(())
    }

    /// Checks point counts and that the `x` range lies inside `admissible`.
    pub fn validate(&self, admissible: Window) -> Result<()> {
        self.nu.validate("nu")?;
        self.r.validate("r")?;
        self.x.validate("x")?;
        let xs = Window::new(self.x.min, self.x.max);
        if !admissible.contains_window(&xs) {
            return Err(Error::Window {
                what: "grid x range".into(),
                x: if xs.lo < admissible.lo { xs.lo } else { xs.hi },
                lo: admissible.lo,
                hi: admissible.hi,
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nu.count * self.r.count * self.x.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points, `nu` slowest and `x` fastest.
    pub fn points(&self) -> Vec<Point> {
        let (ns, rs, xs) = (self.nu.samples(), self.r.samples(), self.x.samples());
        let mut out = Vec::with_capacity(self.len());
        for &nu in &ns {
            for &r in &rs {
                for &x in &xs {
                    out.push(Point::new(nu, r, x));
                }
            }
        }
        out
    }
}

/// `min:max:count`.
pub fn parse_axis(s: &str) -> Result<AxisSpec> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let bad = || Error::Parse(format!("axis range '{s}' must look like min:max:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min = parse_f64(parts[0]).ok_or_else(bad)?;
    let max = parse_f64(parts[1]).ok_or_else(bad)?;
    let count = parts[2].parse::<usize>().map_err(|_| bad())?;
    Ok(AxisSpec::new(min, max, count))
}
