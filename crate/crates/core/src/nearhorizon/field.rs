use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jets::{Jet, Jet1, ORDER};

type Eval1 = dyn Fn(f64) -> Result<Jet1> + Send + Sync;
type Primitive = dyn Fn(f64) -> f64 + Send + Sync;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const REAL_LINE: Window = Window {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Evenly spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// Sub-window keeping the fraction `[a, b]` of this one.
    pub fn fraction(&self, a: f64, b: f64) -> Window {
        let w = self.width();
        Window::new(self.lo + a * w, self.lo + b * w)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A scalar function of `x` evaluated into jets.
///
/// `order` is the derivative order through which the jets are exact. An
/// optional closed-form primitive avoids quadrature where one is known.
#[derive(Clone)]
pub struct ScalarField1D {
    label: String,
    order: usize,
    period: Option<f64>,
    primitive: Option<Arc<Primitive>>,
    constant: Option<f64>,
    f: Arc<Eval1>,
}

impl ScalarField1D {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> Result<Jet1> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            order: ORDER,
            period: None,
            primitive: None,
            constant: None,
            f: Arc::new(f),
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.min(ORDER);
        self
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn with_primitive(mut self, p: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.primitive = Some(Arc::new(p));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// Closed-form primitive, defined up to a constant.
    pub fn primitive(&self, x: f64) -> Option<f64> {
        self.primitive.as_ref().map(|p| p(x))
    }

    /// The value, when the field is known to be constant.
    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn has_primitive(&self) -> bool {
        self.primitive.is_some()
    }

    pub fn jet(&self, x: f64) -> Result<Jet1> {
        let j = (self.f)(x)?;
        if !j.value().is_finite() {
            return Err(Error::SingularPoint {
                op: "scalar field evaluation",
                value: x,
            });
        }
        Ok(j)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x)?.value())
    }

    /// `f(arg)` for a jet argument of any dimension.
    pub fn compose<J: Jet>(&self, arg: J) -> Result<J> {
        Ok(self.jet(arg.value())?.compose_into(arg))
    }

    pub fn constant(k: f64) -> Self {
        let mut out = Self::new(format!("{k}"), move |_| Ok(Jet1::constant(k)))
            .with_primitive(move |x| k * x);
        out.constant = Some(k);
        out
    }

    /// `l x + b`.
    pub fn linear(l: f64, b: f64) -> Self {
        Self::new(format!("{l} x + {b}"), move |x| Ok(Jet1::var(x) * l + b))
            .with_primitive(move |x| 0.5 * l * x * x + b * x)
    }

    pub fn sin() -> Self {
        Self::new("sin x", |x| Ok(Jet1::var(x).sin()))
            .with_period(std::f64::consts::TAU)
            .with_primitive(|x| -x.cos())
    }

    pub fn cos() -> Self {
        Self::new("cos x", |x| Ok(Jet1::var(x).cos()))
            .with_period(std::f64::consts::TAU)
            .with_primitive(f64::sin)
    }

    pub fn tanh() -> Self {
        Self::new("tanh x", |x| Ok(Jet1::var(x).tanh()))
            .with_primitive(|x: f64| x.cosh().ln())
    }

    /// `exp(k x)`.
    pub fn exp(k: f64) -> Self {
        Self::new(format!("exp({k} x)"), move |x| Ok((Jet1::var(x) * k).exp()))
    }

    /// `self + eps * other`.
    pub fn plus_scaled(&self, eps: f64, other: &ScalarField1D) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let mut out = Self::new(format!("{} + {eps} ({})", a.label, b.label), move |x| {
            Ok(a.jet(x)? + b.jet(x)? * eps)
        })
        .with_order(self.order.min(other.order));
        if let (Some(pa), Some(pb)) = (self.primitive.clone(), other.primitive.clone()) {
            out = out.with_primitive(move |x| pa(x) + eps * pb(x));
        }
        out
    }

    /// `s * self`.
    pub fn scaled(&self, s: f64) -> Self {
        let a = self.clone();
        let mut out = Self::new(format!("{s} ({})", a.label), move |x| Ok(a.jet(x)? * s))
            .with_order(self.order);
        if let Some(p) = self.primitive.clone() {
            out = out.with_primitive(move |x| s * p(x));
        }
        if let Some(t) = self.period {
            out = out.with_period(t);
        }
        out
    }
}

impl fmt::Debug for ScalarField1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField1D")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

/// Whether `h(x + T) = h(x)` and `h'(x + T) = h'(x)` to `1e-8` at 64 evenly
/// spaced samples of `window`.
pub fn periodicity_check(h: &ScalarField1D, period: f64, window: Window) -> Result<bool> {
    if !(period > 0.0) {
        return Err(Error::InvalidParams(format!(
            "period must be positive, got {period}"
        )));
    }
    if !(window.lo.is_finite() && window.hi.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "periodicity samples need a bounded window, got {window}"
        )));
    }
    for x in window.linspace(64) {
        let a = h.jet(x)?;
        let b = match h.jet(x + period) {
            Ok(j) => j,
            Err(Error::Window { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        if (a.value() - b.value()).abs() >= 1e-8 || (a.deriv(1) - b.deriv(1)).abs() >= 1e-8 {
            return Ok(false);
        }
    }
    Ok(true)
}
