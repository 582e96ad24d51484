//! Truncated Taylor arithmetic ("jets") used as the exact derivative engine.
//!
//! A jet stores the Taylor coefficients of a smooth function at a point,
//! truncated at total order [`ORDER`]. Arithmetic on jets is exact up to
//! that truncation, so derivatives extracted from a jet carry no
//! discretisation error. [`Jet1`] is univariate, [`Jet3`] covers the
//! coordinate triple `(nu, r, x)`. Plain `f64` implements [`Jet`] as the
//! order-zero case, which lets special functions be written once.

mod fd;
mod jet1;
mod jet3;

pub use fd::{fd_oracle, fd_step};
pub use jet1::Jet1;
pub use jet3::{Jet3, Point, NUM_COEFFS};

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Highest total derivative order carried by every jet.
pub const ORDER: usize = 4;

const INV_FACT: [f64; ORDER + 1] = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];

/// Common interface of truncated Taylor expansions.
///
/// Every fallible elementary function checks its domain on the value part
/// only; the higher coefficients follow from the univariate Taylor series
/// of the function composed with the jet's nilpotent part.
pub trait Jet:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + SubAssign
{
    fn constant(v: f64) -> Self;

    fn value(&self) -> f64;

    /// Largest absolute Taylor coefficient; used for series stopping rules.
    fn max_abs(&self) -> f64;

    fn is_finite(&self) -> bool;

    /// `sum_n taylor[n] * (self - value)^n`, i.e. composition with a scalar
    /// function whose Taylor coefficients at `self.value()` are `taylor`.
    fn compose(self, taylor: &[f64; ORDER + 1]) -> Self {
        let d = self - self.value();
        let mut acc = Self::constant(taylor[ORDER]);
        for n in (0..ORDER).rev() {
            acc = acc * d + taylor[n];
        }
        acc
    }

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn square(self) -> Self {
        self * self
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    fn recip(self) -> Result<Self> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(Error::SingularPoint {
                op: "reciprocal",
                value: a,
            });
        }
        let q = 1.0 / a;
        Ok(self.compose(&[q, -q * q, q * q * q, -q * q * q * q, q * q * q * q * q]))
    }

    fn checked_div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }

    fn exp(self) -> Self {
        let e = self.value().exp();
        self.compose(&INV_FACT.map(|f| f * e))
    }

    fn ln(self) -> Result<Self> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(Error::Domain {
                op: "ln",
                value: a,
                reason: "requires a positive value",
            });
        }
        let q = 1.0 / a;
        Ok(self.compose(&[
            a.ln(),
            q,
            -0.5 * q * q,
            q * q * q / 3.0,
            -0.25 * q * q * q * q,
        ]))
    }

    /// `self^p` for real `p`; the value part must be positive.
    fn powf(self, p: f64) -> Result<Self> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(Error::Domain {
                op: "powf",
                value: a,
                reason: "requires a positive value",
            });
        }
        let base = a.powf(p);
        let mut t = [0.0; ORDER + 1];
        let mut falling = 1.0;
        for (n, slot) in t.iter_mut().enumerate() {
            *slot = base * falling * INV_FACT[n] / a.powi(n as i32);
            falling *= p - n as f64;
        }
        Ok(self.compose(&t))
    }

    fn sqrt(self) -> Result<Self> {
        let a = self.value();
        if a == 0.0 {
            return Err(Error::SingularPoint {
                op: "sqrt",
                value: a,
            });
        }
        self.powf(0.5)
    }

    fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s / 2.0, -c / 6.0, s / 24.0])
    }

    fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c / 2.0, s / 6.0, c / 24.0])
    }

    fn tan(self) -> Result<Self> {
        let a = self.value();
        if a.cos().abs() < 1e-12 {
            return Err(Error::SingularPoint {
                op: "tan",
                value: a,
            });
        }
        let t = a.tan();
        let u = 1.0 + t * t;
        Ok(self.compose(&[
            t,
            u,
            t * u,
            (2.0 + 6.0 * t * t) * u / 6.0,
            (16.0 * t + 24.0 * t * t * t) * u / 24.0,
        ]))
    }

    fn tanh(self) -> Self {
        let t = self.value().tanh();
        let u = 1.0 - t * t;
        self.compose(&[
            t,
            u,
            -t * u,
            (-2.0 + 6.0 * t * t) * u / 6.0,
            (16.0 * t - 24.0 * t * t * t) * u / 24.0,
        ])
    }

    fn atan(self) -> Self {
        let a = self.value();
        let q = 1.0 / (1.0 + a * a);
        self.compose(&[
            a.atan(),
            q,
            -a * q * q,
            (6.0 * a * a - 2.0) * q * q * q / 6.0,
            a * (1.0 - a * a) * q * q * q * q,
        ])
    }

    /// Real part of `atanh`, `0.5 ln|(1 + u) / (1 - u)|`, defined for every
    /// `|u| != 1`. Inside `(-1, 1)` this is `atanh`; outside it differs from
    /// the principal complex branch by the constant `i pi / 2`.
    fn atanh_real(self) -> Result<Self> {
        let a = self.value();
        if (a.abs() - 1.0).abs() < 1e-15 {
            return Err(Error::SingularPoint {
                op: "atanh",
                value: a,
            });
        }
        let q = 1.0 / (1.0 - a * a);
        Ok(self.compose(&[
            0.5 * ((1.0 + a) / (1.0 - a)).abs().ln(),
            q,
            a * q * q,
            (2.0 + 6.0 * a * a) * q * q * q / 6.0,
            a * (1.0 + a * a) * q * q * q * q,
        ]))
    }
}

impl Jet for f64 {
    fn constant(v: f64) -> Self {
        v
    }

    fn value(&self) -> f64 {
        *self
    }

    fn max_abs(&self) -> f64 {
        self.abs()
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn compose(self, taylor: &[f64; ORDER + 1]) -> Self {
        taylor[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn f64_is_order_zero() {
        let v = 0.7_f64;
        assert_eq!(Jet::exp(v), v.exp());
        assert_eq!(Jet::sin(v), v.sin());
        assert_relative_eq!(Jet::powf(v, 1.5).unwrap(), v.powf(1.5));
        assert_relative_eq!(v.atanh_real().unwrap(), v.atanh(), max_relative = 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(Jet::ln(-1.0_f64), Err(Error::Domain { .. })));
        assert!(matches!(Jet1::var(0.0).sqrt(), Err(Error::SingularPoint { .. })));
        assert!(matches!(
            Jet1::var(std::f64::consts::FRAC_PI_2).tan(),
            Err(Error::SingularPoint { .. })
        ));
        assert!(matches!(
            Jet1::constant(0.0).recip(),
            Err(Error::SingularPoint { op: "reciprocal", .. })
        ));
    }

    #[test]
    fn atanh_real_outside_unit_interval_has_atanh_derivative() {
        let j = Jet1::var(2.0).atanh_real().unwrap();
        assert_relative_eq!(j.value(), 0.5 * 3.0_f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(j.deriv(1), 1.0 / (1.0 - 4.0), max_relative = 1e-15);
    }
}
