use super::field::{ScalarField1D, Window};
use crate::curvature::{MetricField, OneFormField};
use crate::error::{Error, Result};
use crate::jets::{Jet, Jet1, Jet3};
use crate::odesolve::quad;
use crate::specfun::WeierstrassParams;

/// Smallest `|h|` accepted when `F` is built from `h`.
pub const F_FROM_H_GUARD: f64 = 1e-10;

/// The functions `h`, `F` of the near-horizon metric and the constant `c`
/// of the Weyl 1-form.
#[derive(Clone, Debug)]
pub struct NearHorizonData {
    pub h: ScalarField1D,
    pub f: ScalarField1D,
    pub c: f64,
}

impl NearHorizonData {
    pub fn new(h: ScalarField1D, f: ScalarField1D, c: f64) -> Self {
        Self { h, f, c }
    }

    /// Data with `F` fixed by `h` and `c`.
    pub fn from_h(h: ScalarField1D, c: f64) -> Self {
        let f = f_from_h_field(&h, c);
        Self { h, f, c }
    }

    /// Derivative order through which metric jets are exact.
    pub fn metric_order(&self) -> usize {
        self.h.order().min(self.f.order())
    }
}

/// `g = 2 dnu (dr + r h dx + r^2 F dnu / 2) + dx^2` in `(nu, r, x)` order.
pub fn nh_metric(d: &NearHorizonData) -> MetricField {
    let (h, f) = (d.h.clone(), d.f.clone());
    MetricField::new(
        format!("near-horizon(h = {}, F = {})", h.label(), f.label()),
        d.metric_order(),
        move |c| {
            let [_, r, x] = *c;
            let hx = h.compose(x)?;
            let fx = f.compose(x)?;
            let (zero, one) = (Jet3::zero(), Jet3::one());
            Ok([
                [r * r * fx, one, r * hx],
                [zero, zero, zero],
                [zero, zero, one],
            ])
        },
    )
}

/// `F' - F h`; vanishes on an interval exactly when the metric is
/// conformally flat there.
pub fn flatness_defect(d: &NearHorizonData, x: f64) -> Result<f64> {
    let f = d.f.jet(x)?;
    let h = d.h.value(x)?;
    Ok(f.deriv(1) - f.value() * h)
}

/// `X = c h dx + r ((2c+1) h' + c (2c+1) h^2 - 2 F) dnu`.
pub fn weyl_oneform_generic(d: &NearHorizonData) -> OneFormField {
    let (h, f, c) = (d.h.clone(), d.f.clone(), d.c);
    OneFormField::new(
        format!("weyl(c = {c}, h = {})", h.label()),
        d.h.order().saturating_sub(1).min(d.f.order()),
        move |co| {
            let [_, r, x] = *co;
            let hj = h.jet(x.value())?;
            let hx = hj.compose_into(x);
            let hpx = hj.derivative().compose_into(x);
            let fx = f.compose(x)?;
            let k = 2.0 * c + 1.0;
            let nu = r * (hpx * k + hx.square() * (c * k) - fx * 2.0);
            Ok([nu, Jet3::zero(), hx * c])
        },
    )
}

fn f_from_h_jet(h: &Jet1, c: f64) -> Result<Jet1> {
    if !(h.value().abs() > F_FROM_H_GUARD) {
        return Err(Error::SingularPoint {
            op: "F from h",
            value: h.value(),
        });
    }
    let h1 = h.derivative();
    let h2 = h1.derivative();
    let num = h2 + *h * h1 * (4.0 * c) + h.powi(3) * (2.0 * c * c);
    num.checked_div(*h * 2.0)
}

/// `F = (h'' + 4 c h h' + 2 c^2 h^3) / (2 h)`.
pub fn f_from_h(h: &ScalarField1D, c: f64, x: f64) -> Result<f64> {
    Ok(f_from_h_jet(&h.jet(x)?, c)?.value())
}

/// [`f_from_h`] as a field; exact through two fewer orders than `h`.
pub fn f_from_h_field(h: &ScalarField1D, c: f64) -> ScalarField1D {
    let hh = h.clone();
    ScalarField1D::new(format!("F[{}; c = {c}]", h.label()), move |x| {
        f_from_h_jet(&hh.jet(x)?, c)
    })
    .with_order(h.order().saturating_sub(2))
}

/// `phi(x) = int_{x0}^x h`, closed form when available.
fn phi(h: &ScalarField1D, x0: f64, x: f64) -> Result<f64> {
    match (h.primitive(x), h.primitive(x0)) {
        (Some(px), Some(p0)) => Ok(px - p0),
        _ => quad(|t| h.value(t).unwrap_or(f64::NAN), x0, x),
    }
}

/// `s(x) = int_{x0}^x exp(phi / 2)`.
fn s_of(h: &ScalarField1D, x0: f64, x: f64) -> Result<f64> {
    if let Some(k) = h.as_constant() {
        let d = x - x0;
        return Ok(if k == 0.0 {
            d
        } else {
            2.0 / k * (0.5 * k * d).exp_m1()
        });
    }
    quad(|t| phi(h, x0, t).map_or(f64::NAN, |p| (0.5 * p).exp()), x0, x)
}

/// Data for the `c = -1/2` family driven by an arbitrary `h`:
/// `F = P(s(x) + a; 0, b) exp(phi(x))` with `phi = int h`,
/// `s = int exp(phi / 2)`, both taken from the basepoint `x0`.
///
/// Closed forms are used for constant `h` and for `phi` when `h` carries a
/// primitive; everything else goes through adaptive quadrature.
pub fn weierstrass_data(h: &ScalarField1D, a: f64, b: f64, x0: f64) -> NearHorizonData {
    let wp = WeierstrassParams::new(b);
    let hh = h.clone();
    let f = ScalarField1D::new(
        format!("P(int exp(int h / 2) + {a}; 0, {b}) exp(int h) [h = {}]", h.label()),
        move |x| {
            let hj = hh.jet(x)?;
            let phi_j = hj.antiderivative(phi(&hh, x0, x)?);
            let half = (phi_j * 0.5).exp();
            let s_j = half.antiderivative(s_of(&hh, x0, x)?);
            let z = s_j + a;
            let p = wp.jet(z.value())?;
            Ok(p.compose_into(z) * phi_j.exp())
        },
    )
    .with_order((h.order() + 1).min(crate::jets::ORDER));
    NearHorizonData::new(h.clone(), f, -0.5)
}

/// The interval of `x` on which `s(x) + a` stays inside the period cell of
/// `P(.; 0, b)` containing `a`, at a distance of at least `margin` periods
/// from the poles.
pub fn weierstrass_window(
    h: &ScalarField1D,
    a: f64,
    b: f64,
    x0: f64,
    margin: f64,
) -> Result<Window> {
    let wp = WeierstrassParams::new(b);
    let (z_lo, z_hi) = match wp.real_period() {
        Some(t) => {
            let n = (a / t).floor();
            (n * t + margin * t, (n + 1.0) * t - margin * t)
        }
        // b = 0: the only pole is the origin
        None if a > 0.0 => (margin.max(1e-3) * a, a + 3.0),
        None => (a - 3.0, margin.max(1e-3) * a),
    };
    if !(z_lo < z_hi) {
        return Err(Error::InvalidParams(format!(
            "pole margin {margin} leaves no room in the period cell"
        )));
    }
    let lo = solve_monotone(|x| s_of(h, x0, x), z_lo - a, x0)?;
    let hi = solve_monotone(|x| s_of(h, x0, x), z_hi - a, x0)?;
    Ok(Window::new(lo, hi))
}

/// Solves `s(x) = target` for increasing `s` with `s(x0) = 0`.
fn solve_monotone(s: impl Fn(f64) -> Result<f64>, target: f64, x0: f64) -> Result<f64> {
    let dir = if target >= 0.0 { 1.0 } else { -1.0 };
    let mut step = 0.25;
    let mut inner = x0;
    let mut outer = x0 + dir * step;
    let mut found = false;
    for _ in 0..40 {
        let v = s(outer)?;
        if (v - target) * dir >= 0.0 {
            found = true;
            break;
        }
        inner = outer;
        step *= 2.0;
        outer = x0 + dir * step;
    }
    if !found {
        return Err(Error::Window {
            what: "primitive of exp(int h / 2)".into(),
            x: outer,
            lo: target,
            hi: target,
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (inner + outer);
        if mid == inner || mid == outer {
            break;
        }
        if (s(mid)? - target) * dir >= 0.0 {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Ok(inner)
}
