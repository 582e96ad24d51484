use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::jets::Jet1;

const AGM_STEPS: usize = 32;

/// Complete elliptic integral of the first kind `K(m)`, `0 <= m < 1`,
/// via the arithmetic-geometric mean.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain {
            op: "elliptic_k",
            value: m,
            reason: "parameter m must lie in [0, 1)",
        });
    }
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..AGM_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(PI / (2.0 * a))
}

/// Jacobi elliptic functions `(sn, cn, dn)` of real argument and modulus
/// `0 <= k <= 1`, by the descending Landen / AGM scheme.
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&k) || !u.is_finite() {
        return Err(Error::Domain {
            op: "jacobi_sn_cn_dn",
            value: k,
            reason: "modulus must lie in [0, 1] and argument must be finite",
        });
    }
    let m = k * k;
    if m == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok((u.tanh(), sech, sech));
    }

    let mut a = [0.0; AGM_STEPS + 1];
    let mut c = [0.0; AGM_STEPS + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = (1.0 - m).sqrt();
    let mut n = 0;
    while n < AGM_STEPS && c[n].abs() > f64::EPSILON {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // dn > 0 for m < 1; the Landen ratio form is 0/0 at odd multiples of K
    let dn = (1.0 - m * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

/// `sn(u, i)`: modulus `k = i` (parameter `m = -1`), by the imaginary
/// modulus transformation `sn(u | -1) = sd(sqrt2 u | 1/2) / sqrt2`.
///
/// The function is bounded and entire on the real line; it satisfies
/// `w'' = -2 w^3` and `w'^2 = 1 - w^4`.
pub fn sn_imaginary_modulus(u: f64) -> Result<f64> {
    let (sn, _, dn) = jacobi_sn_cn_dn(SQRT_2 * u, FRAC_1_SQRT_2)?;
    Ok(sn / dn / SQRT_2)
}

/// Jet of `sn(u, i)` at `u`; `w' = cd nd` of the transformed argument, higher
/// derivatives from `w'' = -2 w^3`.
pub fn sn_imaginary_modulus_jet(u: f64) -> Result<Jet1> {
    let (sn, cn, dn) = jacobi_sn_cn_dn(SQRT_2 * u, FRAC_1_SQRT_2)?;
    let w = sn / dn / SQRT_2;
    let dw = cn / (dn * dn);
    let w2 = w * w;
    Ok(Jet1::from_derivatives([
        w,
        dw,
        -2.0 * w2 * w,
        -6.0 * w2 * dw,
        -12.0 * w * dw * dw + 12.0 * w2 * w2 * w,
    ]))
}
