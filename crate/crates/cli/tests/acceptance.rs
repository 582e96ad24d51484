//! Acceptance criteria, run in sequence with one status line each.
//!
//! Runs without the libtest harness so that timings are not distorted by
//! concurrent tests and the status lines always reach the output.

use std::process::Command as Proc;
use std::time::{Duration, Instant};

use ewh_core::curvature::{conformal_rescale, ew_residual, max_abs, MetricField, OneFormField, ScalarField3D};
use ewh_core::jets::{Jet, Point};
use ewh_core::nearhorizon::{
    abel_h_of_x, abel_parametric, abel_y_of_z, family_catalog, hypergeometric_h,
    hypergeometric_x, nh_metric, ode2_jet, ode2_residual, ode3_first_integral, ode4_residual,
    reduction_consistency, weierstrass_data, weierstrass_window, weyl_oneform_generic,
    FamilyParams, FamilyTag, ScalarField1D, Window,
};
use ewh_core::pdeverify::prop4_structures;
use ewh_core::report::{cmd_verify, CheckParams, GridSpec, ResidualReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn verify(check: &str, pairs: &[(&str, String)], tol: Option<f64>) -> ResidualReport {
    let p = CheckParams::from_pairs(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())));
    cmd_verify(check, &p, &[], tol, false).unwrap_or_else(|e| panic!("{check} {pairs:?}: {e}"))
}

fn s(v: f64) -> String {
    format!("{v}")
}

fn ew_only(r: &ResidualReport) -> f64 {
    r.components
        .iter()
        .filter(|(n, _)| n.starts_with("ew_"))
        .map(|c| c.1)
        .fold(0.0, f64::max)
}

fn c1_theorem1() -> Outcome {
    let zero = verify("thm1", &[("h", "zero".into()), ("a", s(0.1)), ("b", s(1.0))], Some(1e-8));
    let sine = verify("thm1", &[("h", "sin".into()), ("a", s(0.1)), ("b", s(1.0))], Some(1e-5));
    outcome(
        zero.pass && sine.pass && zero.grid.len() == 125,
        format!("h=0 max {:.2e} (< 1e-8), h=sin max {:.2e} (< 1e-5)", zero.overall_max, sine.overall_max),
    )
}

fn c2_negative_control() -> Outcome {
    let r = verify("thm1", &[("h", "zero".into()), ("x-scale", s(1.01))], None);
    outcome(r.overall_max > 1e-4, format!("X scaled by 1.01: max {:.2e} (> 1e-4)", r.overall_max))
}

fn c3_conformal_flatness() -> Outcome {
    let mut worst: f64 = 0.0;
    for h in ["one", "sin", "tanh"] {
        let r = verify("prop1-iff", &[("h", h.into()), ("F", "exp-int".into())], Some(1e-9));
        worst = worst.max(r.component("cotton").unwrap());
    }
    let bad = verify("prop1-iff", &[("h", "one".into()), ("F", "one".into())], None);
    let cot = bad.component("cotton").unwrap();
    outcome(
        worst < 1e-9 && cot > 1e-4,
        format!("F = exp(int h): Cotton {worst:.2e} (< 1e-9); (h,F) = (1,1): Cotton {cot:.2e} (> 1e-4)"),
    )
}

type Member = (f64, &'static str, Vec<(&'static str, String)>);

fn c4_theorem2() -> Outcome {
    let members: [Member; 4] = [
        (-1.0, "tanh", vec![]),
        (0.0, "tan", vec![("c", s(0.0))]),
        (1.0, "quadratic", vec![]),
        (2.0, "tan", vec![("c", s(2.0)), ("l", s(-1.0))]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (c, fam, extra) in members {
        let t0 = Instant::now();
        let mut base = vec![("family", fam.to_string())];
        base.extend(extra.iter().cloned());
        let numeric = vec![("family", "numeric".to_string()), ("c", s(c)), ("span", s(1.0))];
        let mut worst: f64 = 0.0;
        let mut broken = f64::INFINITY;
        for pairs in [base, numeric] {
            let good = verify("thm2-ode", &pairs, None);
            worst = worst.max(ew_only(&good));
            let mut pert = pairs.clone();
            pert.push(("perturb", s(1e-2)));
            broken = broken.min(verify("thm2-ode", &pert, None).overall_max);
        }
        let dt = t0.elapsed();
        ok &= worst < 1e-7 && broken > 1e-5 && dt < Duration::from_secs(5);
        parts.push(format!("c={c}: {worst:.1e}/{broken:.1e}"));
    }
    outcome(ok, format!("EW residual (< 1e-7) / perturbed (> 1e-5): {}", parts.join(", ")))
}

fn c5_factorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let alpha = rng.gen_range(-2.0..2.0);
        let c = rng.gen_range(-2.0..3.0);
        let beta = reduction_consistency(alpha, c);
        let h = rng.gen_range(0.3..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let hp = rng.gen_range(-1.0..1.0);
        let jet = ode2_jet(h, hp, alpha, beta);
        worst = worst.max(ode4_residual(&jet, c).abs());
    }
    outcome(worst < 1e-9, format!("200 random (alpha, c): max |ode4| {worst:.2e} (< 1e-9)"))
}

fn family(tag: FamilyTag, pairs: &[(&str, f64)]) -> ewh_core::nearhorizon::FamilyInstance {
    let p = pairs.iter().fold(FamilyParams::new(), |p, (k, v)| p.with(k, *v));
    family_catalog(tag, &p).unwrap()
}

fn c6_catalog() -> Outcome {
    let members = [
        ("linear", family(FamilyTag::Linear, &[("l", 1.5), ("b", 0.2)]), Some(-0.5 * 1.5f64.powi(3))),
        ("quadratic", family(FamilyTag::Quadratic, &[("b", 0.3)]), Some(0.0)),
        ("1/(x-b)", family(FamilyTag::RationalPole, &[("b", 0.4)]), Some(0.0)),
        ("2/(a(x-b))", family(FamilyTag::RationalPole, &[("alpha", 1.3), ("branch", 1.0)]), None),
        ("-1/(a(x-b))", family(FamilyTag::RationalPole, &[("alpha", 1.3), ("branch", 2.0)]), None),
        ("tan c=0", family(FamilyTag::TanFamily, &[("c", 0.0)]), None),
        ("tan c=2", family(FamilyTag::TanFamily, &[("c", 2.0), ("l", -1.0)]), None),
        ("tanh", family(FamilyTag::TanhHyperCR, &[]), None),
    ];
    let (mut worst, mut worst_i): (f64, f64) = (0.0, 0.0);
    for (_, inst, first) in &members {
        for x in inst.sample_window.linspace(40) {
            let j = inst.h.jet(x).unwrap();
            worst = worst.max(ode4_residual(&j, inst.c).abs());
            if let Some(want) = first {
                worst_i = worst_i.max((ode3_first_integral(&j) - want).abs());
            }
        }
    }
    outcome(
        worst < 1e-9 && worst_i < 1e-9,
        format!("{} members: max |ode4| {worst:.2e}, first-integral deviation {worst_i:.2e}", members.len()),
    )
}

fn c7_hypergeometric() -> Outcome {
    let (beta, gamma) = (2.0, 1.0);
    let (mut dev, mut res): (f64, f64) = (0.0, 0.0);
    for z in Window::new(0.05, 0.6).linspace(12) {
        let y = abel_y_of_z(z, beta);
        let (h, x) = abel_parametric(y, 0.0, beta, gamma).unwrap();
        dev = dev.max((h - hypergeometric_h(z, beta, gamma).unwrap()).abs());
        dev = dev.max((x - hypergeometric_x(z, beta, gamma).unwrap()).abs());
        res = res.max(ode2_residual(&abel_h_of_x(y, 0.0, beta, gamma).unwrap(), 0.0, beta).abs());
    }
    outcome(
        dev < 1e-7 && res < 1e-6,
        format!("parametric vs 2F1 {dev:.2e} (< 1e-7), ode2 via implicit derivatives {res:.2e} (< 1e-6)"),
    )
}

fn c8_dkp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let a = rng.gen_range(0.05..0.6);
        let b = rng.gen_range(0.2..3.0);
        let r = verify("dkp", &[("a", s(a)), ("b", s(b))], Some(1e-8));
        worst = worst.max(r.overall_max);
    }
    outcome(worst < 1e-8, format!("10 random (a, b): max dKP residual {worst:.2e} (< 1e-8)"))
}

fn c9_hypercr() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut pde, mut ew): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let pairs = [
            ("a", s(rng.gen_range(-1.0..1.0))),
            ("b", s(sign * rng.gen_range(0.5..1.5))),
            ("e", s(rng.gen_range(-1.0..1.0))),
            ("j", s(rng.gen_range(-1.0..1.0))),
            ("k", s(rng.gen_range(-1.0..1.0))),
            ("l", s(rng.gen_range(-1.0..1.0))),
        ];
        let r = verify("hypercr-family", &pairs, None);
        pde = pde.max(r.component("hypercr").unwrap());
        ew = ew.max(ew_only(&r));
    }
    let p4 = verify("prop4", &[("c", s(-1.0)), ("l", s(-1.0)), ("b", s(0.3))], None);
    let align = p4
        .component("hypercr_alignment")
        .unwrap()
        .max(p4.component("near_horizon_alignment").unwrap());
    let p4_ew = ew_only(&p4);
    outcome(
        pde < 1e-8 && ew < 1e-8 && p4_ew < 1e-8 && align < 1e-12,
        format!("family {pde:.2e}, structures {ew:.2e}, c=-1 structures {p4_ew:.2e} (< 1e-8); alignment {align:.2e} (< 1e-12)"),
    )
}

/// Test function built from elementary pieces with random coefficients.
fn sample_fn<J: Jet>(q: &[f64; 8], v: [J; 3]) -> J {
    let [nu, r, x] = v;
    let arg = nu * q[0] + r * q[1] + x * q[2];
    arg.sin() * (r * q[3]).exp() + (x * q[4] + nu * q[5]).tanh() * (r * r + 1.0)
        + (r * x * q[6]).atan() + nu * nu * x * q[7]
}

/// Nested central differences of `f` at step `h`.
fn central(f: &impl Fn([f64; 3]) -> f64, p: [f64; 3], multi: [usize; 3], h: f64) -> f64 {
    match (0..3).find(|&i| multi[i] > 0) {
        None => f(p),
        Some(i) => {
            let mut m = multi;
            m[i] -= 1;
            let (mut a, mut b) = (p, p);
            a[i] += h;
            b[i] -= h;
            (central(f, a, m, h) - central(f, b, m, h)) / (2.0 * h)
        }
    }
}

/// Two levels of Richardson extrapolation on top of [`central`].
fn fd(f: &impl Fn([f64; 3]) -> f64, p: [f64; 3], multi: [usize; 3]) -> f64 {
    let h = 0.08;
    let d = |k: f64| central(f, p, multi, h / k);
    let (d1, d2, d4) = (d(1.0), d(2.0), d(4.0));
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

fn c10_fd_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let q: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let order = rng.gen_range(1..=4usize);
        let mut multi = [0usize; 3];
        for _ in 0..order {
            multi[rng.gen_range(0..3)] += 1;
        }
        let jet = sample_fn(&q, Point::from_array(p).coords()).partial(multi);
        let reference = fd(&|v: [f64; 3]| sample_fn(&q, v), p, multi);
        worst = worst.max((jet - reference).abs() / reference.abs().max(1.0));
    }
    outcome(worst < 1e-5, format!("1000 comparisons up to order 4: max relative error {worst:.2e} (< 1e-5)"))
}

fn random_ln_omega(rng: &mut ChaCha8Rng) -> ScalarField3D {
    let q: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-0.5..0.5));
    ScalarField3D::new("random ln Omega", 4, move |c| {
        let [nu, r, x] = *c;
        Ok((nu * q[0] + r * q[1] + x * q[2]).sin() + r * x * q[3] + nu * nu * q[4])
    })
}

fn max_ew(g: &MetricField, x: &OneFormField, pts: &[Point]) -> f64 {
    pts.iter()
        .map(|&p| max_abs(&ew_residual(g, x, p).unwrap()))
        .fold(0.0, f64::max)
}

fn c11_gauge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut structures: Vec<(MetricField, OneFormField, Vec<Point>)> = Vec::new();
    for h in [ScalarField1D::constant(0.0), ScalarField1D::sin()] {
        let d = weierstrass_data(&h, 0.1, 1.0, 0.0);
        let w = weierstrass_window(&h, 0.1, 1.0, 0.0, 0.1).unwrap();
        structures.push((nh_metric(&d), weyl_oneform_generic(&d), GridSpec::default_for(w).points()));
    }
    let (g, x) = prop4_structures(-1.0, -1.0, 0.0).unwrap();
    structures.push((g, x, GridSpec::default_for(Window::new(-1.0, 1.0)).points()));
    let mut worst: f64 = 0.0;
    for (g, x, pts) in &structures {
        for _ in 0..2 {
            let (g2, x2) = conformal_rescale(g, x, &random_ln_omega(&mut rng));
            worst = worst.max(max_ew(&g2, &x2, pts));
        }
    }
    outcome(worst < 1e-7, format!("6 random rescalings: max EW residual {worst:.2e} (< 1e-7)"))
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["verify", "thm1", "--h", "sin"],
        &["verify", "family:numeric", "--c", "2"],
        &["verify", "prop4"],
        &["verify", "prop1-iff", "--h", "one", "--F", "one", "--expect-fail"],
    ];
    let mut ok = true;
    for (i, args) in runs.iter().enumerate() {
        let mut bodies = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("r{i}_{k}.json"));
            let st = Proc::new(env!("CARGO_BIN_EXE_ewh"))
                .args(*args)
                .arg("--json")
                .arg(&path)
                .arg("--quiet")
                .status()
                .unwrap();
            ok &= st.code() == Some(0);
            bodies.push(std::fs::read(&path).unwrap());
        }
        ok &= bodies[0] == bodies[1];
    }
    outcome(ok, format!("{} commands run twice: JSON byte-identical", runs.len()))
}

type Criterion = (u32, &'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "Weierstrass family EW residual", c1_theorem1, 2),
        (2, "negative control on X", c2_negative_control, 2),
        (3, "conformal flatness both directions", c3_conformal_flatness, 2),
        (4, "generic-c structures from the fourth-order ODE", c4_theorem2, 20),
        (5, "second-order reduction factorization", c5_factorization, 1),
        (6, "closed-form catalog", c6_catalog, 1),
        (7, "hypergeometric and Abel cross-check", c7_hypergeometric, 2),
        (8, "dKP identity", c8_dkp, 2),
        (9, "hyperCR family and structures", c9_hypercr, 3),
        (10, "jets against finite differences", c10_fd_oracle, 5),
        (11, "conformal gauge invariance", c11_gauge, 2),
        (12, "deterministic JSON reports", c12_determinism, 60),
    ];
    let mut failed = 0;
    for (n, name, run, budget) in criteria {
        let t0 = Instant::now();
        let out = run();
        let dt = t0.elapsed();
        let in_time = dt < Duration::from_secs(budget);
        let ok = out.ok && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {}: {name}: {} [{:.3} s, budget {budget} s{}]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            dt.as_secs_f64(),
            if in_time { "" } else { ", exceeded" },
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
