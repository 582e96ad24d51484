//! The dispersionless integrable PDEs behind two classes of Einstein-Weyl
//! structures: dKP and hyperCR, with their explicit solutions.

use crate::curvature::{MetricField, OneFormField, ScalarField3D};
use crate::error::{Error, Result};
use crate::jets::{Jet, Jet3, Point, ORDER};
use crate::nearhorizon::{NearHorizonData, ScalarField1D};
use crate::specfun::WeierstrassParams;

/// Coordinate change `r_old = -r_new / 2` taking the hyperCR coordinates to
/// the near-horizon ones.
pub const R_RESCALE: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 1.0]];

/// A scalar potential with the parameters it was built from.
#[derive(Clone, Debug)]
pub struct PotentialField {
    pub field: ScalarField3D,
    pub params: Vec<(&'static str, f64)>,
}

impl PotentialField {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(&[Jet3; 3]) -> Result<Jet3> + Send + Sync + 'static,
    ) -> Self {
        Self {
            field: ScalarField3D::new(label, ORDER, f),
            params: Vec::new(),
        }
    }

    pub fn with_params(mut self, params: Vec<(&'static str, f64)>) -> Self {
        self.params = params;
        self
    }

    pub fn label(&self) -> &str {
        self.field.label()
    }

    pub fn jet(&self, p: Point) -> Result<Jet3> {
        self.field.jet(p)
    }

    /// `s * u`.
    pub fn scaled(&self, s: f64) -> Self {
        let inner = self.field.clone();
        Self {
            field: ScalarField3D::new(format!("{s} ({})", inner.label()), inner.order(), move |c| {
                Ok(inner.eval_at(c)? * s)
            }),
            params: self.params.clone(),
        }
    }
}

/// Parameters of the `tanh^3` hyperCR family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperCRParams {
    pub a: f64,
    pub b: f64,
    pub e: f64,
    pub j: f64,
    pub k: f64,
    pub l: f64,
}

fn need_order(u: &PotentialField, what: &'static str) -> Result<()> {
    if u.field.order() < 2 {
        return Err(Error::InvalidParams(format!(
            "{what} needs second derivatives of '{}'",
            u.label()
        )));
    }
    Ok(())
}

/// `2 (u_nu - u u_r)_r - u_xx = 2 u_nu r - 2 (u_r^2 + u u_rr) - u_xx`.
pub fn dkp_residual(u: &PotentialField, p: Point) -> Result<f64> {
    need_order(u, "dkp residual")?;
    let j = u.jet(p)?;
    let ur = j.d(1);
    Ok(2.0 * j.partial([1, 1, 0]) - 2.0 * (ur * ur + j.value() * j.partial([0, 2, 0]))
        - j.partial([0, 0, 2]))
}

/// `u = -(r^2 / 2) P(x + a; 0, b)`.
pub fn dkp_weierstrass(a: f64, b: f64) -> PotentialField {
    let wp = WeierstrassParams::new(b);
    PotentialField::new(format!("-(r^2/2) P(x + {a}; 0, {b})"), move |c| {
        let z = c[2] + a;
        let p = wp.jet(z.value())?.compose_into(z);
        Ok(c[1].square() * p * -0.5)
    })
    .with_params(vec![("a", a), ("b", b)])
}

/// `H_x H_rr - H_r H_xr - H_xx + H_r nu`.
pub fn hypercr_residual(h: &PotentialField, p: Point) -> Result<f64> {
    need_order(h, "hyperCR residual")?;
    let j = h.jet(p)?;
    Ok(j.d(2) * j.partial([0, 2, 0]) - j.d(1) * j.partial([0, 1, 1]) - j.partial([0, 0, 2])
        + j.partial([1, 1, 0]))
}

/// `H = j tanh^3(phi) + k tanh(phi) + l`, `phi = (a^2/b) r + b nu + a x + e`.
pub fn hypercr_tanh_family(q: HyperCRParams) -> Result<PotentialField> {
    if q.b == 0.0 || !q.b.is_finite() {
        return Err(Error::InvalidParams("hyperCR family needs b != 0".into()));
    }
    let HyperCRParams { a, b, e, j, k, l } = q;
    Ok(PotentialField::new(
        format!("{j} tanh^3 + {k} tanh + {l} of ({a}^2/{b}) r + {b} nu + {a} x + {e}"),
        move |c| {
            let phi = c[1] * (a * a / b) + c[0] * b + c[2] * a + e;
            let t = phi.tanh();
            Ok(t.powi(3) * j + t * k + l)
        },
    )
    .with_params(vec![("a", a), ("b", b), ("e", e), ("j", j), ("k", k), ("l", l)]))
}

/// `H = c h(x) r^2`, the potential whose structure restricts to
/// `c h dx` on `r = 0`.
pub fn hypercr_aligned_potential(h: &ScalarField1D, c: f64) -> PotentialField {
    let hh = h.clone();
    PotentialField::new(format!("{c} ({}) r^2", h.label()), move |co| {
        Ok(hh.compose(co[2])? * co[1].square() * c)
    })
    .with_params(vec![("c", c)])
}

/// Metric `(dx + H_r dnu)^2 - 4 (dr - H_x dnu) dnu` and 1-form
/// `X = H_rr dx / 2 + (H_r H_rr + 2 H_xr) dnu / 2`.
pub fn hypercr_structures(h: &PotentialField) -> (MetricField, OneFormField) {
    let order = h.field.order();
    let f = h.field.clone();
    let metric = MetricField::new(
        format!("hyperCR metric[{}]", h.label()),
        order.saturating_sub(1),
        move |c| {
            let v = f.eval_at(c)?;
            let (hr, hx) = (v.diff(1), v.diff(2));
            let z = Jet3::zero();
            Ok([
                [hx * 4.0 + hr.square(), Jet3::constant(-2.0), hr],
                [z, z, z],
                [z, z, Jet3::one()],
            ])
        },
    );
    let f = h.field.clone();
    let form = OneFormField::new(
        format!("hyperCR 1-form[{}]", h.label()),
        order.saturating_sub(2),
        move |c| {
            let v = f.eval_at(c)?;
            let hr = v.diff(1);
            let hrr = hr.diff(1);
            let hxr = hr.diff(2);
            Ok([(hr * hrr + hxr * 2.0) * 0.5, Jet3::zero(), hrr * 0.5])
        },
    );
    (metric, form)
}

/// `h = (sqrt(c l) / c) tanh(sqrt(c l) (x + b))`, real for `c l > 0`.
pub fn prop4_h(c: f64, l: f64, b: f64) -> Result<ScalarField1D> {
    if c == 0.0 {
        return Err(Error::InvalidParams("hyperCR tanh structure needs c != 0".into()));
    }
    if !(c * l > 0.0) {
        return Err(Error::InvalidParams(format!(
            "hyperCR tanh structure is real only for c l > 0 (c = {c}, l = {l})"
        )));
    }
    let s = (c * l).sqrt();
    let amp = s / c;
    Ok(ScalarField1D::new(format!("{amp} tanh({s} (x + {b}))"), move |x| {
        Ok(((crate::jets::Jet1::var(x) + b) * s).tanh() * amp)
    })
    .with_primitive(move |x| (s * (x + b)).cosh().ln() / c))
}

/// Metric `2 dnu (dr - c h r dx + (r^2/2)(c h' + c^2 h^2) dnu) + dx^2` and
/// 1-form `c h dx - c r (c h^2 + h') dnu` with the tanh profile of
/// [`prop4_h`].
pub fn prop4_structures(c: f64, l: f64, b: f64) -> Result<(MetricField, OneFormField)> {
    let h = prop4_h(c, l, b)?;
    let hm = h.clone();
    let metric = MetricField::new(format!("hyperCR tanh metric(c = {c}, l = {l}, b = {b})"), ORDER, move |co| {
        let [_, r, x] = *co;
        let hj = hm.jet(x.value())?;
        let hx = hj.compose_into(x);
        let hp = hj.derivative().compose_into(x);
        let z = Jet3::zero();
        Ok([
            [r * r * (hp * c + hx.square() * (c * c)), Jet3::one(), r * hx * -c],
            [z, z, z],
            [z, z, Jet3::one()],
        ])
    });
    let form = OneFormField::new(format!("hyperCR tanh 1-form(c = {c}, l = {l}, b = {b})"), 3, move |co| {
        let [_, r, x] = *co;
        let hj = h.jet(x.value())?;
        let hx = hj.compose_into(x);
        let hp = hj.derivative().compose_into(x);
        Ok([r * (hx.square() * c + hp) * -c, Jet3::zero(), hx * c])
    });
    Ok((metric, form))
}

/// Near-horizon data `(h, F = h^2 - h', c = -1)` that the `c = -1` tanh
/// structure reduces to.
pub fn prop4_near_horizon_data(l: f64, b: f64) -> Result<NearHorizonData> {
    let h = prop4_h(-1.0, l, b)?;
    let hh = h.clone();
    let f = ScalarField1D::new(format!("({})^2 - ({})'", h.label(), h.label()), move |x| {
        let j = hh.jet(x)?;
        Ok(j.square() - j.derivative())
    })
    .with_order(ORDER - 1);
    Ok(NearHorizonData::new(h, f, -1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{ew_residual, max_abs};
    use crate::nearhorizon::{nh_metric, ode2_residual, ode4_residual, weyl_oneform_generic};

    fn grid() -> Vec<Point> {
        let mut v = Vec::new();
        for nu in [-0.7, 0.2, 0.9] {
            for r in [-0.8, 0.1, 0.6] {
                for x in [-0.5, 0.4, 1.1] {
                    v.push(Point::new(nu, r, x));
                }
            }
        }
        v
    }

    #[test]
    fn dkp_weierstrass_solves() {
        let u = dkp_weierstrass(0.3, 1.0);
        for p in grid() {
            assert!(dkp_residual(&u, p).unwrap().abs() < 1e-8);
        }
        let bad = u.scaled(1.1);
        let worst = grid()
            .into_iter()
            .map(|p| dkp_residual(&bad, p).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn constant_potentials() {
        let zero = PotentialField::new("0", |_| Ok(Jet3::zero()));
        let h = PotentialField::new("2", |_| Ok(Jet3::constant(2.0)));
        let p = Point::new(0.1, 0.2, 0.3);
        assert_eq!(dkp_residual(&zero, p).unwrap(), 0.0);
        assert_eq!(hypercr_residual(&h, p).unwrap(), 0.0);
    }

    #[test]
    fn wrong_potential_detected() {
        let h = PotentialField::new("x r^2", |c| Ok(c[2] * c[1].square()));
        assert!(hypercr_residual(&h, Point::new(0.0, 1.0, 0.5)).unwrap().abs() > 0.1);
    }

    #[test]
    fn tanh_family_example_values() {
        let q = HyperCRParams { a: 1.0, b: 1.0, e: 0.0, j: 1.0, k: 0.0, l: 0.0 };
        let h = hypercr_tanh_family(q).unwrap();
        let j = h.jet(Point::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(j.value(), 0.0);
        assert_eq!(j.d(1), 0.0);
        let q = HyperCRParams { a: 1.0, b: 2.0, e: 0.3, j: 0.5, k: -1.0, l: 2.0 };
        let h = hypercr_tanh_family(q).unwrap();
        let (g, x) = hypercr_structures(&h);
        for p in grid() {
            assert!(hypercr_residual(&h, p).unwrap().abs() < 1e-9);
            assert!(max_abs(&ew_residual(&g, &x, p).unwrap()) < 1e-8);
        }
        assert!(hypercr_tanh_family(HyperCRParams { b: 0.0, ..q }).is_err());
    }

    #[test]
    fn zero_potential_structure_is_flat() {
        let h = PotentialField::new("0", |_| Ok(Jet3::zero()));
        let (g, x) = hypercr_structures(&h);
        let p = Point::new(0.5, 0.5, 0.5);
        assert_eq!(g.values(p).unwrap(), [[0.0, -2.0, 0.0], [-2.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(x.values(p).unwrap(), [0.0; 3]);
        assert_eq!(max_abs(&ew_residual(&g, &x, p).unwrap()), 0.0);
    }

    #[test]
    fn aligned_potential_structures() {
        let c = 1.0;
        let h = prop4_h(c, 1.0, 0.2).unwrap();
        let (g, x) = hypercr_structures(&hypercr_aligned_potential(&h, c));
        for p in grid() {
            assert!(max_abs(&ew_residual(&g, &x, p).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn tanh_profiles() {
        // c = -1, l = -1, b = 0 gives h = -tanh x
        let h = prop4_h(-1.0, -1.0, 0.0).unwrap();
        let j = h.jet(0.7).unwrap();
        assert!((j.value() + 0.7_f64.tanh()).abs() < 1e-15);
        assert!(ode2_residual(&j, 2.0, 0.0).abs() < 1e-14);
        assert!(ode4_residual(&j, -1.0).abs() < 1e-12);
        let j = prop4_h(1.0, 1.0, 0.3).unwrap().jet(0.4).unwrap();
        assert!((j.value() - 0.7_f64.tanh()).abs() < 1e-15);
        assert!((j.deriv(2) + 2.0 * j.value() * j.deriv(1)).abs() < 1e-14);
        assert!(prop4_h(0.0, 1.0, 0.0).is_err());
        assert!(prop4_h(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn c_minus_one_alignment() {
        let (g, x) = prop4_structures(-1.0, -1.0, 0.1).unwrap();
        let d = prop4_near_horizon_data(-1.0, 0.1).unwrap();
        let (gn, xn) = (nh_metric(&d), weyl_oneform_generic(&d));
        let h = prop4_h(-1.0, -1.0, 0.1).unwrap();
        let (gh, xh) = hypercr_structures(&hypercr_aligned_potential(&h, -1.0));
        let (gh, xh) = (gh.pullback_linear(R_RESCALE), xh.pullback_linear(R_RESCALE));
        for p in grid() {
            let (a, b, c) = (g.values(p).unwrap(), gn.values(p).unwrap(), gh.values(p).unwrap());
            for i in 0..3 {
                for k in 0..3 {
                    assert!((a[i][k] - b[i][k]).abs() < 1e-12);
                    assert!((a[i][k] - c[i][k]).abs() < 1e-12);
                }
            }
            let (u, v, w) = (x.values(p).unwrap(), xn.values(p).unwrap(), xh.values(p).unwrap());
            for i in 0..3 {
                assert!((u[i] - v[i]).abs() < 1e-12);
                assert!((u[i] - w[i]).abs() < 1e-12);
            }
            assert!(max_abs(&ew_residual(&g, &x, p).unwrap()) < 1e-8);
        }
    }
}
