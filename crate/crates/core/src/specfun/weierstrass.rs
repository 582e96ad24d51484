use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::jets::Jet1;

/// Default pole-avoidance radius.
pub const DEFAULT_POLE_GUARD: f64 = 1e-3;

// Laurent coefficients c_k of z^(2k-2), k = 2..=LAURENT_TERMS (through z^16).
const LAURENT_TERMS: usize = 9;
const MAX_DUPLICATIONS: u32 = 60;

/// `p(z; 0, g3)` on the real axis.
///
/// Near the origin the Laurent series is summed directly; elsewhere the
/// argument is reduced modulo the real period, halved until it lies inside
/// the series radius and then doubled back with the duplication formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeierstrassParams {
    pub g3: f64,
    pub pole_guard: f64,
}

/// `(p(z; 0, b), p'(z; 0, b))` with the default pole guard.
pub fn wp(z: f64, b: f64) -> Result<(f64, f64)> {
    WeierstrassParams::new(b).eval(z)
}

fn period_cache() -> &'static RwLock<HashMap<u64, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

impl WeierstrassParams {
    pub fn new(g3: f64) -> Self {
        Self {
            g3,
            pole_guard: DEFAULT_POLE_GUARD,
        }
    }

    pub fn with_pole_guard(mut self, delta: f64) -> Self {
        self.pole_guard = delta;
        self
    }

    fn laurent_coeffs(&self) -> [f64; LAURENT_TERMS + 1] {
        let mut c = [0.0; LAURENT_TERMS + 1];
        c[3] = self.g3 / 28.0;
        for k in 4..=LAURENT_TERMS {
            let s: f64 = (2..=k - 2).map(|m| c[m] * c[k - m]).sum();
            c[k] = 3.0 * s / ((2 * k + 1) as f64 * (k - 3) as f64);
        }
        c
    }

    // Radius inside which the truncated Laurent series is used. The nearest
    // nonzero lattice point sits at 3.06 |g3|^(-1/6) from the origin.
    fn series_radius(&self) -> f64 {
        if self.g3 == 0.0 {
            f64::INFINITY
        } else {
            0.5 * self.g3.abs().powf(-1.0 / 6.0).min(1.0)
        }
    }

    fn series(&self, z: f64) -> (f64, f64) {
        let c = self.laurent_coeffs();
        let z2 = z * z;
        let mut p = 1.0 / z2;
        let mut dp = -2.0 / (z2 * z);
        for (k, &ck) in c.iter().enumerate().skip(2) {
            if ck == 0.0 {
                continue;
            }
            let e = (2 * k - 2) as i32;
            p += ck * z.powi(e);
            dp += ck * e as f64 * z.powi(e - 1);
        }
        (p, dp)
    }

    // p(2w) = p (p^3 + 2 g3) / p'^2 and p'(2w) = (2 p^6 - 10 g3 p^3 - g3^2) / p'^3,
    // both obtained from the duplication formula after eliminating p'^2 in
    // the numerators with p'^2 = 4 p^3 - g3.
    fn duplicate(&self, (p, dp): (f64, f64)) -> (f64, f64) {
        let b = self.g3;
        let p3 = p * p * p;
        let dp2 = dp * dp;
        let p_new = p * (p3 + 2.0 * b) / dp2;
        let dp_new = (2.0 * p3 * p3 - 10.0 * b * p3 - b * b) / (dp2 * dp);
        (p_new, dp_new)
    }

    /// Evaluates without period reduction, using at least `extra` more
    /// halvings than strictly required.
    fn eval_unreduced(&self, z: f64, extra: u32) -> (f64, f64) {
        let radius = self.series_radius();
        let mut n = 0;
        while n < MAX_DUPLICATIONS && z.abs() / 2f64.powi(n as i32) > radius {
            n += 1;
        }
        n += extra;
        let mut v = self.series(z / 2f64.powi(n as i32));
        for _ in 0..n {
            v = self.duplicate(v);
        }
        v
    }

    /// Real half-period `omega`: the first positive zero of `p'`, located by
    /// bisection and cached per `g3`. `None` when `g3 = 0` (`p = 1/z^2`).
    pub fn half_period(&self) -> Option<f64> {
        if self.g3 == 0.0 {
            return None;
        }
        let key = self.g3.to_bits();
        if let Some(&w) = period_cache().read().expect("period cache").get(&key) {
            return Some(w);
        }
        let w = self.bisect_half_period();
        period_cache()
            .write()
            .expect("period cache")
            .entry(key)
            .or_insert(w);
        Some(w)
    }

    fn bisect_half_period(&self) -> f64 {
        let step = 0.2 * self.g3.abs().powf(-1.0 / 6.0);
        let mut lo = step;
        let mut hi = 2.0 * step;
        while self.eval_unreduced(hi, 0).1 < 0.0 {
            lo = hi;
            hi += step;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_unreduced(mid, 0).1 < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Real period `2 omega`.
    pub fn real_period(&self) -> Option<f64> {
        self.half_period().map(|w| 2.0 * w)
    }

    /// Nearest real pole and the argument reduced to `[-omega, omega]`.
    pub fn reduce(&self, z: f64) -> (f64, f64) {
        match self.real_period() {
            None => (0.0, z),
            Some(t) => {
                let pole = t * (z / t).round();
                (pole, z - pole)
            }
        }
    }

    fn eval_impl(&self, z: f64, extra: u32) -> Result<(f64, f64)> {
        if !z.is_finite() {
            return Err(Error::Domain {
                op: "wp",
                value: z,
                reason: "argument must be finite",
            });
        }
        let (pole, w) = self.reduce(z);
        if w.abs() < self.pole_guard {
            return Err(Error::Pole {
                z,
                nearest_pole: pole,
                distance: w.abs(),
            });
        }
        Ok(self.eval_unreduced(w, extra))
    }

    /// `(p(z), p'(z))`.
    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        self.eval_impl(z, 0)
    }

    /// As [`eval`](Self::eval) with `extra` additional halving/duplication
    /// steps; used to check duplication consistency.
    pub fn eval_with_extra_steps(&self, z: f64, extra: u32) -> Result<(f64, f64)> {
        self.eval_impl(z, extra)
    }

    /// Jet of `p` at `z`, derivatives from `p'' = 6p^2`, `p''' = 12 p p'`,
    /// `p'''' = 12 p'^2 + 72 p^3`.
    pub fn jet(&self, z: f64) -> Result<Jet1> {
        let (p, dp) = self.eval(z)?;
        Ok(Jet1::from_derivatives([
            p,
            dp,
            6.0 * p * p,
            12.0 * p * dp,
            12.0 * dp * dp + 72.0 * p * p * p,
        ]))
    }
}
