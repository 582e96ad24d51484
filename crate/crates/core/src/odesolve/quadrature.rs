use crate::error::{Error, Result};

// 15-point Kronrod nodes (non-negative half) and weights; odd indices are
// the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = kron.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, &xk) in XGK.iter().take(7).enumerate() {
        let dx = half * xk;
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv[j] = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kron * half;
    let resasc = asc * half.abs();
    let resabs = abs_k * half.abs();
    let mut err = ((kron - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Adaptive Gauss-Kronrod (7, 15) quadrature. Always bisects the interval
/// with the largest error estimate, the earliest one on ties.
pub fn quad_with(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain {
            op: "quad",
            value: if a.is_finite() { b } else { a },
            reason: "integration limits must be finite",
        });
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Accuracy {
                estimate: err,
                bound: opts.abs_tol.max(opts.rel_tol * total.abs()),
            });
        }
        let bound = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= bound {
            return Ok(QuadResult {
                value: total,
                error: err,
            });
        }
        if parts.len() >= opts.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: err,
                bound,
            });
        }
        let worst = parts
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.3 > parts[best].3 { i } else { best });
        let (lo, hi, _, _) = parts[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            return Err(Error::Accuracy {
                estimate: err,
                bound,
            });
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts[worst] = (lo, mid, v1, e1);
        parts.insert(worst + 1, (mid, hi, v2, e2));
        total = parts.iter().map(|p| p.2).sum();
        err = parts.iter().map(|p| p.3).sum();
    }
}

/// [`quad_with`] at absolute and relative tolerance `1e-10`.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    quad_with(f, a, b, QuadOptions::default()).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = quad(|x| x * x, 0.0, 1.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_limits_negate() {
        let a = quad(f64::sin, 0.0, 2.0).unwrap();
        let b = quad(f64::sin, 2.0, 0.0).unwrap();
        assert!((a + b).abs() < 1e-14);
        assert!((a - (1.0 - 2.0_f64.cos())).abs() < 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let v = quad(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = quad(|x: f64| (20.0 * x).cos(), 0.0, 3.0).unwrap();
        assert!((v - (60.0_f64).sin() / 20.0).abs() < 1e-10);
    }

    #[test]
    fn non_integrable_reports_accuracy() {
        let r = quad_with(
            |x: f64| 1.0 / x,
            0.0,
            1.0,
            QuadOptions {
                max_subdivisions: 50,
                ..Default::default()
            },
        );
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (x * x).exp() * x.cos();
        let a = quad(f, -1.0, 2.0).unwrap();
        let b = quad(f, -1.0, 2.0).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
