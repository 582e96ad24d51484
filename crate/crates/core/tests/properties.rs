use ewh_core::curvature::{conformal_rescale, ew_residual, max_abs, ScalarField3D};
use ewh_core::jets::{Jet, Jet1, Jet3, Point};
use ewh_core::nearhorizon::{
    nh_metric, ode2_jet, ode4_residual, reduction_consistency, weierstrass_data,
    weierstrass_window, weyl_oneform_generic, NearHorizonData, ScalarField1D,
};
use ewh_core::specfun::WeierstrassParams;
use proptest::prelude::*;

fn close(a: &Jet3, b: &Jet3, tol: f64) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

/// A smooth jet with generic Taylor coefficients.
fn jet(q: [f64; 4], p: Point) -> Jet3 {
    let [nu, r, x] = p.coords();
    (nu * q[0] + r * q[1]).sin() + (x * q[2]).exp() * q[3] + r * x
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64)
}

fn point() -> impl Strategy<Value = Point> {
    prop::array::uniform3(-1.0..1.0f64).prop_map(Point::from_array)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(qa in coeffs(), qb in coeffs(), qc in coeffs(), p in point()) {
        let (a, b, c) = (jet(qa, p), jet(qb, p), jet(qc, p));
        prop_assert!(close(&((a + b) * c), &(a * c + b * c), 1e-12));
        prop_assert!(close(&(a * b), &(b * a), 1e-14));
        prop_assert!(close(&((a * b) * c), &(a * (b * c)), 1e-12));
        prop_assert!(close(&(a + Jet3::zero()), &a, 0.0));
        prop_assert!(close(&(a * Jet3::one()), &a, 0.0));
    }

    #[test]
    fn elementary_identities(qa in coeffs(), qb in coeffs(), p in point()) {
        let (a, b) = (jet(qa, p), jet(qb, p));
        prop_assert!(close(&(a + b).exp(), &(a.exp() * b.exp()), 1e-11));
        prop_assert!(close(&a.exp().ln().unwrap(), &a, 1e-11));
        let s = a.sin();
        let c = a.cos();
        prop_assert!(close(&(s * s + c * c), &Jet3::one(), 1e-12));
        let pos = a.exp();
        prop_assert!(close(&(pos.recip().unwrap() * pos), &Jet3::one(), 1e-12));
        prop_assert!(close(&pos.square().sqrt().unwrap(), &pos, 1e-11));
    }

    #[test]
    fn jet1_matches_closed_form_derivatives(x in -1.0..1.0f64, k in 0.2..2.0f64) {
        // f = sin(k x) e^x: f' = e^x (sin + k cos), f'' = e^x ((1 - k^2) sin + 2 k cos)
        let j = (Jet1::var(x) * k).sin() * Jet1::var(x).exp();
        let (s, c, e) = ((k * x).sin(), (k * x).cos(), x.exp());
        prop_assert!((j.deriv(1) - e * (s + k * c)).abs() < 1e-12);
        prop_assert!((j.deriv(2) - e * ((1.0 - k * k) * s + 2.0 * k * c)).abs() < 1e-12);
    }

    #[test]
    fn reduction_factorizes(alpha in -2.0..2.0f64, c in -2.0..3.0f64, h in 0.3..1.5f64, hp in -1.0..1.0f64) {
        let beta = reduction_consistency(alpha, c);
        let r = ode4_residual(&ode2_jet(h, hp, alpha, beta), c);
        prop_assert!(r.abs() < 1e-9, "{r}");
    }

    #[test]
    fn wrong_beta_breaks_factorization(alpha in -2.0..2.0f64, c in -2.0..3.0f64, h in 0.5..1.5f64, hp in 0.2..1.0f64) {
        let beta = reduction_consistency(alpha, c) + 0.5;
        let r = ode4_residual(&ode2_jet(h, hp, alpha, beta), c);
        prop_assert!(r.abs() > 1e-6, "{r}");
    }

    #[test]
    fn near_horizon_determinant(k in -2.0..2.0f64, p in point()) {
        let d = NearHorizonData::new(ScalarField1D::linear(k, 0.3), ScalarField1D::exp(k), 0.0);
        let det = nh_metric(&d).det(p).unwrap();
        prop_assert!((det + 1.0).abs() < 1e-12, "{det}");
    }

    #[test]
    fn residual_is_trace_free(k in -1.0..1.0f64, c in -2.0..2.0f64, p in point()) {
        let d = NearHorizonData::new(ScalarField1D::sin(), ScalarField1D::exp(k), c);
        let g = nh_metric(&d);
        let e = ew_residual(&g, &weyl_oneform_generic(&d), p).unwrap();
        let gv = g.values(p).unwrap();
        // inverse of the near-horizon metric in closed form
        let (h, f, r) = (p.x.sin(), (k * p.x).exp(), p.r);
        let gi = [
            [0.0, 1.0, 0.0],
            [1.0, -r * r * f + r * r * h * h, -r * h],
            [0.0, -r * h, 1.0],
        ];
        let mut tr = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let id: f64 = (0..3).map(|m| gi[a][m] * gv[m][b]).sum();
                let delta = if a == b { 1.0 } else { 0.0 };
                prop_assert!((id - delta).abs() < 1e-12);
                tr += gi[a][b] * e[a][b];
            }
        }
        prop_assert!(tr.abs() < 1e-10, "{tr}");
    }

    #[test]
    fn gauge_invariance(q in prop::array::uniform4(-0.5..0.5f64), p in point()) {
        let h = ScalarField1D::constant(0.0);
        let d = weierstrass_data(&h, 0.1, 1.0, 0.0);
        let w = weierstrass_window(&h, 0.1, 1.0, 0.0, 0.1).unwrap();
        let p = Point::new(p.nu, p.r, w.lo + 0.5 * (p.x + 1.0) * w.width());
        let ln_omega = ScalarField3D::new("ln omega", 4, move |c| {
            let [nu, r, x] = *c;
            Ok((nu * q[0] + x * q[1]).sin() + r * q[2] + r * x * q[3])
        });
        let (g, x) = conformal_rescale(&nh_metric(&d), &weyl_oneform_generic(&d), &ln_omega);
        let e = max_abs(&ew_residual(&g, &x, p).unwrap());
        prop_assert!(e < 1e-7, "{e}");
    }

    #[test]
    fn weierstrass_duplication(b in 0.2..3.0f64, t in 0.05..0.45f64) {
        let wp = WeierstrassParams::new(b);
        let z = t * wp.real_period().unwrap();
        let (p, dp) = wp.eval(z).unwrap();
        let (p2, _) = wp.eval(2.0 * z).unwrap();
        let ddp = 6.0 * p * p;
        let want = 0.25 * (ddp / dp).powi(2) - 2.0 * p;
        prop_assert!((p2 - want).abs() < 1e-9 * want.abs().max(1.0), "{p2} vs {want}");
        prop_assert!((dp * dp - (4.0 * p.powi(3) - b)).abs() < 1e-9 * (dp * dp).max(1.0));
    }
}
