use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::{Jet, INV_FACT, ORDER};
use crate::error::{Error, Result};

/// Univariate jet: Taylor coefficients `f^(k)(x0) / k!` for `k = 0..=4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    c: [f64; ORDER + 1],
}

impl Jet1 {
    pub const fn from_coeffs(c: [f64; ORDER + 1]) -> Self {
        Self { c }
    }

    /// Builds a jet from the derivatives `[f, f', f'', f''', f'''']`.
    pub fn from_derivatives(d: [f64; ORDER + 1]) -> Self {
        let mut c = d;
        for (k, v) in c.iter_mut().enumerate() {
            *v *= INV_FACT[k];
        }
        Self { c }
    }

    /// The identity function seeded at `x`.
    pub fn var(x: f64) -> Self {
        Self {
            c: [x, 1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn coeffs(&self) -> &[f64; ORDER + 1] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c[k]
    }

    /// `d^k f / dx^k = k! * coeff[k]`.
    pub fn deriv(&self, k: usize) -> f64 {
        self.c[k] / INV_FACT[k]
    }

    pub fn derivatives(&self) -> [f64; ORDER + 1] {
        std::array::from_fn(|k| self.deriv(k))
    }

    /// Jet of `f'`. The top coefficient is unknown after differentiation and
    /// is set to zero, so the result is exact only through order 3.
    pub fn derivative(&self) -> Self {
        let mut c = [0.0; ORDER + 1];
        for k in 0..ORDER {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Self { c }
    }

    /// Jet of the antiderivative taking `value` at the expansion point.
    pub fn antiderivative(&self, value: f64) -> Self {
        let mut c = [0.0; ORDER + 1];
        c[0] = value;
        for k in 1..=ORDER {
            c[k] = self.c[k - 1] / k as f64;
        }
        Self { c }
    }

    /// Composes this expansion (taken at `arg.value()`) with an inner jet of
    /// any dimension, yielding the jet of `f(arg)`.
    pub fn compose_into<J: Jet>(&self, arg: J) -> J {
        arg.compose(&self.c)
    }

    /// Jet of the inverse function at `f(x0)`, valued `x0`, where this jet is
    /// the expansion of `f` at `x0`.
    ///
    /// Requires `f'(x0) != 0`. The series is obtained by fixed-point
    /// iteration on `w = (t - sum_{n>=2} c_n w^n) / c_1`; each pass fixes one
    /// more order.
    pub fn revert(&self, x0: f64) -> Result<Self> {
        let slope = self.c[1];
        if slope == 0.0 || !slope.is_finite() {
            return Err(Error::SingularPoint {
                op: "series reversion",
                value: slope,
            });
        }
        let t = Jet1::from_coeffs([0.0, 1.0, 0.0, 0.0, 0.0]);
        let mut w = Jet1::zero();
        for _ in 0..ORDER {
            let mut higher = Jet1::zero();
            let mut wn = w;
            for n in 2..=ORDER {
                wn = wn * w;
                higher += wn * self.c[n];
            }
            w = (t - higher) * (1.0 / slope);
        }
        Ok(w + x0)
    }

    /// Replaces the value part, keeping all derivatives.
    pub fn with_value(mut self, v: f64) -> Self {
        self.c[0] = v;
        self
    }
}

impl Jet for Jet1 {
    fn constant(v: f64) -> Self {
        Self {
            c: [v, 0.0, 0.0, 0.0, 0.0],
        }
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }
}

impl Add for Jet1 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            c: std::array::from_fn(|k| self.c[k] + rhs.c[k]),
        }
    }
}

impl Sub for Jet1 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            c: std::array::from_fn(|k| self.c[k] - rhs.c[k]),
        }
    }
}

impl Mul for Jet1 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; ORDER + 1];
        for i in 0..=ORDER {
            for j in 0..=ORDER - i {
                c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Self { c }
    }
}

impl Neg for Jet1 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            c: self.c.map(|v| -v),
        }
    }
}

impl Add<f64> for Jet1 {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet1 {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet1 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self {
            c: self.c.map(|v| v * rhs),
        }
    }
}

impl AddAssign for Jet1 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet1 {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}
