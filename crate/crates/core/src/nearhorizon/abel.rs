//! Parametric solutions of `h'' = alpha h h' + beta h^3` obtained from the
//! Abel equation for `y = h^2 dx/dh`.
//!
//! The printed exponent `atanh((2 beta y + alpha) / sqrt(D)) / sqrt(D)` with
//! `D = alpha^2 + 8 beta` is evaluated in real form: through
//! `ln|(1 + u)/(1 - u)| / 2` when `D > 0`, and through
//! `atanh(i v) = i atan(v)` when `D < 0`. Fourth roots of a negative
//! `beta y^2 + alpha y - 2` are taken of its modulus, which flips the sign
//! of `dx/dy`.

use crate::error::{Error, Result};
use crate::jets::{Jet, Jet1};
use crate::odesolve::quad;
use crate::specfun::hyp2f1_jet;

fn quadratic<J: Jet>(y: J, alpha: f64, beta: f64) -> J {
    y * y * beta + y * alpha - 2.0
}

fn theta<J: Jet>(y: J, alpha: f64, beta: f64) -> Result<J> {
    let d = alpha * alpha + 8.0 * beta;
    let w = y * (2.0 * beta) + alpha;
    if d > 0.0 {
        let s = d.sqrt();
        Ok((w * (1.0 / s)).atanh_real()? * (1.0 / s))
    } else if d < 0.0 {
        let s = (-d).sqrt();
        Ok(-(w * (1.0 / s)).atan() * (1.0 / s))
    } else {
        w.recip()
    }
}

fn check_y<J: Jet>(y: &J, q: &J) -> Result<()> {
    if !(y.value() > 0.0) {
        return Err(Error::Domain {
            op: "abel parametric solution",
            value: y.value(),
            reason: "y must be positive",
        });
    }
    if q.value() == 0.0 {
        return Err(Error::SingularPoint {
            op: "abel parametric solution (branch point)",
            value: y.value(),
        });
    }
    Ok(())
}

/// `h(y) = gamma sqrt(y) exp(alpha theta / 2) / |beta y^2 + alpha y - 2|^(1/4)`.
pub fn abel_h<J: Jet>(y: J, alpha: f64, beta: f64, gamma: f64) -> Result<J> {
    let q = quadratic(y, alpha, beta);
    check_y(&y, &q)?;
    let qa = if q.value() < 0.0 { -q } else { q };
    let th = theta(y, alpha, beta)?;
    Ok(y.sqrt()? * (th * (0.5 * alpha)).exp() * qa.powf(-0.25)? * gamma)
}

/// `dx/dy = -sign(q) exp(-alpha theta / 2) / (gamma sqrt(y) |q|^(3/4))`.
pub fn abel_dxdy<J: Jet>(y: J, alpha: f64, beta: f64, gamma: f64) -> Result<J> {
    if gamma == 0.0 {
        return Err(Error::InvalidParams("gamma must be nonzero".into()));
    }
    let q = quadratic(y, alpha, beta);
    check_y(&y, &q)?;
    let (qa, sign) = if q.value() < 0.0 { (-q, -1.0) } else { (q, 1.0) };
    let th = theta(y, alpha, beta)?;
    let denom = y.sqrt()? * qa.powf(0.75)?;
    Ok((th * (-0.5 * alpha)).exp().checked_div(denom)? * (-sign / gamma))
}

/// Largest root of `beta y^2 + alpha y - 2`, if any.
fn largest_root(alpha: f64, beta: f64) -> Option<f64> {
    if beta == 0.0 {
        return (alpha != 0.0).then(|| 2.0 / alpha);
    }
    let d = alpha * alpha + 8.0 * beta;
    if d < 0.0 {
        return None;
    }
    let s = d.sqrt();
    let r = [(-alpha + s) / (2.0 * beta), (-alpha - s) / (2.0 * beta)];
    Some(r[0].max(r[1]))
}

/// The point `(h(y), x(y))` of the parametric solution, with the free
/// constant of `x` fixed by `x -> 0` as `y -> infinity`.
///
/// Needs `beta > 0` and `y` beyond the largest root of
/// `beta y^2 + alpha y - 2`, so that the path to infinity avoids branch
/// points.
pub fn abel_parametric(y: f64, alpha: f64, beta: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "anchoring x(y) at infinity needs beta > 0, got {beta}"
        )));
    }
    if let Some(root) = largest_root(alpha, beta) {
        if y <= root {
            return Err(Error::Window {
                what: "abel integration path to infinity".into(),
                x: y,
                lo: root,
                hi: f64::INFINITY,
            });
        }
    }
    let h = abel_h(y, alpha, beta, gamma)?;
    let s = (alpha * alpha + 8.0 * beta).sqrt();
    // y = 1/t maps [y, inf) to (0, 1/y] with a smooth integrand
    let integrand = |t: f64| {
        let theta = ((2.0 * beta + (alpha + s) * t) / (2.0 * beta + (alpha - s) * t))
            .abs()
            .ln()
            / (2.0 * s);
        (-0.5 * alpha * theta).exp() * (beta + alpha * t - 2.0 * t * t).powf(-0.75)
    };
    let x = quad(integrand, 0.0, 1.0 / y)? / gamma;
    Ok((h, x))
}

/// As [`abel_parametric`], with the constant fixed by `x(y0) = 0` instead.
/// The segment between `y0` and `y` must not cross a branch point.
pub fn abel_parametric_anchored(
    y: f64,
    y0: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    let (lo, hi) = (y.min(y0), y.max(y0));
    if !(lo > 0.0) {
        return Err(Error::Domain {
            op: "abel parametric solution",
            value: lo,
            reason: "y must be positive",
        });
    }
    let d = alpha * alpha + 8.0 * beta;
    if beta != 0.0 && d >= 0.0 {
        let s = d.sqrt();
        for root in [(-alpha + s) / (2.0 * beta), (-alpha - s) / (2.0 * beta)] {
            if root >= lo && root <= hi {
                return Err(Error::Window {
                    what: "abel integration path".into(),
                    x: root,
                    lo,
                    hi,
                });
            }
        }
    } else if beta == 0.0 && alpha != 0.0 {
        let root = 2.0 / alpha;
        if root >= lo && root <= hi {
            return Err(Error::Window {
                what: "abel integration path".into(),
                x: root,
                lo,
                hi,
            });
        }
    }
    let h = abel_h(y, alpha, beta, gamma)?;
    let x = quad(
        |t| abel_dxdy(t, alpha, beta, gamma).unwrap_or(f64::NAN),
        y0,
        y,
    )?;
    Ok((h, x))
}

/// Jet of `h` as a function of `x` at the parameter value `y`, obtained by
/// series reversion of `x(y)`.
pub fn abel_h_of_x(y: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Jet1> {
    let yj = Jet1::var(y);
    let h_y = abel_h(yj, alpha, beta, gamma)?;
    let x_y = abel_dxdy(yj, alpha, beta, gamma)?.antiderivative(0.0);
    let y_x = x_y.revert(y)?;
    Ok(h_y.compose_into(y_x))
}

/// `y = (2 / (beta z))^(1/2)`.
pub fn abel_y_of_z(z: f64, beta: f64) -> f64 {
    (2.0 / (beta * z)).sqrt()
}

/// `h = gamma / (beta^(1/4) (1 - z)^(1/4))`, the `alpha = 0` solution in
/// the variable `z`.
pub fn hypergeometric_h<J: Jet>(z: J, beta: f64, gamma: f64) -> Result<J> {
    Ok((-z + 1.0).powf(-0.25)? * (gamma / beta.powf(0.25)))
}

/// `x = sqrt(2 z) 2F1(1/2, 3/4; 3/2; z) / (2 gamma beta^(1/4))`.
pub fn hypergeometric_x<J: Jet>(z: J, beta: f64, gamma: f64) -> Result<J> {
    let f = hyp2f1_jet(0.5, 0.75, 1.5, z)?;
    Ok((z * 2.0).sqrt()? * f * (1.0 / (2.0 * gamma * beta.powf(0.25))))
}
