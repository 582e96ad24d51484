//! Check definitions: each check id resolves its parameters into a plan
//! holding the default grid, the admissible `x` window and a per-point
//! evaluator returning one absolute residual per named component.

use crate::curvature::{cotton, ew_residual, max_abs3, MetricField, OneFormField};
use crate::error::{Error, Result};
use crate::jets::{Jet, Point};
use crate::nearhorizon::{
    f_ode_residual_chalf, family_catalog, flatness_defect, nh_metric, ode2_residual,
    ode3_first_integral, ode4_residual, weierstrass_data, weierstrass_window,
    weyl_oneform_generic, FamilyParams, FamilyTag, NearHorizonData, ScalarField1D, Window,
};
use crate::odesolve::quad;
use crate::pdeverify::{
    dkp_residual, dkp_weierstrass, hypercr_aligned_potential, hypercr_residual,
    hypercr_structures, hypercr_tanh_family, prop4_h, prop4_near_horizon_data, prop4_structures,
    HyperCRParams, R_RESCALE,
};

use super::grid::GridSpec;
use super::params::{CheckParams, ParamValue};

/// Tolerance for checks evaluated through jets and closed forms only.
pub const JET_TOLERANCE: f64 = 1e-8;
/// Tolerance for checks that route through quadrature or ODE integration.
pub const NUMERIC_TOLERANCE: f64 = 1e-5;

/// Every check id, with family checks spelled `family:<tag>`.
pub fn check_ids() -> Vec<String> {
    let mut out: Vec<String> = ["thm1", "thm2-ode", "prop1-iff", "dkp", "hypercr-family", "prop4"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    out.extend(FamilyTag::ALL.iter().map(|t| format!("family:{t}")));
    out.push("chalf-Fode".into());
    out
}

/// Claim phrase each check verifies, as quoted from the source text.
pub fn anchor(check: &str) -> Option<&'static str> {
    Some(match check {
        "thm1" => "Weierstrass elliptic function",
        "thm2-ode" => "satisfies the 4th order ODE",
        "prop1-iff" => "locally conformally flat iff",
        "dkp" => "dispersionless Kadomtsev-Petviashvili (dKP) equation",
        "hypercr-family" => "is a 6 parameter family of solutions",
        "prop4" => "defines a hyperCR Einstein-Weyl structure",
        "chalf-Fode" => "which has solutions",
        c if c.starts_with("family:") => "interesting families of solutions",
        _ => return None,
    })
}

type PointEval = dyn Fn(Point) -> Result<Vec<f64>> + Send + Sync;

/// `h` and `F` along `x`, for checks built on near-horizon data.
#[derive(Clone)]
pub(crate) struct Profile {
    pub h: ScalarField1D,
    pub f: ScalarField1D,
}

pub(crate) struct Plan {
    pub check: String,
    pub anchor: &'static str,
    pub params: Vec<(String, ParamValue)>,
    pub grid: GridSpec,
    pub admissible: Window,
    pub tolerance: f64,
    pub components: Vec<String>,
    pub eval: Box<PointEval>,
    pub profile: Option<Profile>,
}

impl Plan {
    fn new(check: &str, window: Window, admissible: Window, tolerance: f64) -> Self {
        Plan {
            check: check.to_string(),
            anchor: anchor(check).expect("known check"),
            params: Vec::new(),
            grid: GridSpec::default_for(window),
            admissible,
            tolerance,
            components: Vec::new(),
            eval: Box::new(|_| Ok(Vec::new())),
            profile: None,
        }
    }

    fn num(&mut self, name: &str, v: f64) {
        self.params.push((name.to_string(), ParamValue::Num(v)));
    }

    fn text(&mut self, name: &str, v: &str) {
        self.params.push((name.to_string(), ParamValue::Text(v.to_string())));
    }
}

pub(crate) fn build_plan(check: &str, p: &CheckParams) -> Result<Plan> {
    let plan = match check {
        "thm1" => thm1(p)?,
        "thm2-ode" => thm2(p)?,
        "prop1-iff" => prop1(p)?,
        "dkp" => dkp(p)?,
        "hypercr-family" => hypercr(p)?,
        "prop4" => prop4(p)?,
        "chalf-Fode" => chalf(p)?,
        c => match c.strip_prefix("family:") {
            Some(tag) => family(c, tag.parse()?, p)?,
            None => return Err(Error::UnknownCheck(c.to_string())),
        },
    };
    p.reject_unused(check)?;
    Ok(plan)
}

const EW_NAMES: [&str; 6] = ["ew_nu_nu", "ew_nu_r", "ew_nu_x", "ew_r_r", "ew_r_x", "ew_x_x"];
const UPPER: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn ew_components(g: &MetricField, x: &OneFormField, p: Point) -> Result<Vec<f64>> {
    let e = ew_residual(g, x, p)?;
    Ok(UPPER.iter().map(|&(a, b)| e[a][b].abs()).collect())
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn intersect(a: Window, b: Window) -> Window {
    Window::new(a.lo.max(b.lo), a.hi.min(b.hi))
}

/// Resolves `--h`: a named profile or a family tag whose parameters are
/// passed as `--h-<name>`. Returns the field and its window of validity.
fn builtin_h(plan: &mut Plan, p: &CheckParams, default: &str) -> Result<(ScalarField1D, Window)> {
    let name = p.text_or("h", default).to_string();
    plan.text("h", &name);
    let out = match name.as_str() {
        "zero" => (ScalarField1D::constant(0.0), Window::REAL_LINE),
        "one" => (ScalarField1D::constant(1.0), Window::REAL_LINE),
        "sin" => (ScalarField1D::sin(), Window::REAL_LINE),
        "cos" => (ScalarField1D::cos(), Window::REAL_LINE),
        "tanh" => (ScalarField1D::tanh(), Window::REAL_LINE),
        "linear" => {
            let (l, b) = (p.num_or("h-l", 1.0)?, p.num_or("h-b", 0.0)?);
            plan.num("h-l", l);
            plan.num("h-b", b);
            (ScalarField1D::linear(l, b), Window::REAL_LINE)
        }
        other => {
            let tag: FamilyTag = other.parse().map_err(|_| {
                Error::InvalidParams(format!(
                    "--h must be zero, one, sin, cos, tanh, linear or a family tag, got '{other}'"
                ))
            })?;
            let fp = p
                .prefixed("h-")?
                .into_iter()
                .fold(FamilyParams::new(), |fp, (k, v)| fp.with(&k, v));
            let inst = family_catalog(tag, &fp)?;
            for (k, v) in inst.params.iter() {
                plan.num(&format!("h-{k}"), v);
            }
            (inst.h, inst.window)
        }
    };
    Ok(out)
}

/// `int_{x0}^x h`, in closed form when `h` has a primitive.
fn phi_of(h: &ScalarField1D, x0: f64, x: f64) -> Result<f64> {
    match (h.primitive(x), h.primitive(x0)) {
        (Some(a), Some(b)) => Ok(a - b),
        _ => {
            let hh = h.clone();
            quad(move |t| hh.value(t).unwrap_or(f64::NAN), x0, x)
        }
    }
}

fn uses_quadrature(h: &ScalarField1D) -> bool {
    h.as_constant().is_none()
}

fn thm1(p: &CheckParams) -> Result<Plan> {
    let mut plan = Plan::new("thm1", Window::REAL_LINE, Window::REAL_LINE, JET_TOLERANCE);
    let (h, h_window) = builtin_h(&mut plan, p, "zero")?;
    let (a, b, x0) = (p.num_or("a", 0.1)?, p.num_or("b", 1.0)?, p.num_or("x0", 0.0)?);
    let scale = p.num_or("x-scale", 1.0)?;
    for (k, v) in [("a", a), ("b", b), ("x0", x0), ("x-scale", scale)] {
        plan.num(k, v);
    }
    if !h_window.contains(x0) {
        return Err(Error::Window { what: "basepoint x0".into(), x: x0, lo: h_window.lo, hi: h_window.hi });
    }
    let admissible = intersect(weierstrass_window(&h, a, b, x0, 1e-3)?, h_window);
    let sample = intersect(weierstrass_window(&h, a, b, x0, 0.1)?, h_window);
    plan.grid = GridSpec::default_for(sample);
    plan.admissible = admissible;
    if uses_quadrature(&h) {
        plan.tolerance = NUMERIC_TOLERANCE;
    }
    let data = weierstrass_data(&h, a, b, x0);
    let g = nh_metric(&data);
    let x = weyl_oneform_generic(&data).scaled(scale);
    plan.components = names(&EW_NAMES);
    plan.eval = Box::new(move |pt| ew_components(&g, &x, pt));
    plan.profile = Some(Profile { h: data.h, f: data.f });
    Ok(plan)
}

fn thm2(p: &CheckParams) -> Result<Plan> {
    let tag: FamilyTag = p.text_or("family", "linear").parse()?;
    let eps = p.num_or("perturb", 0.0)?;
    let fp = p
        .remaining_numeric()?
        .into_iter()
        .fold(FamilyParams::new(), |fp, (k, v)| fp.with(&k, v));
    let inst = family_catalog(tag, &fp)?;
    let tol = if tag == FamilyTag::NumericODE { NUMERIC_TOLERANCE } else { JET_TOLERANCE };
    let mut plan = Plan::new("thm2-ode", inst.sample_window, inst.window, tol);
    plan.text("family", tag.name());
    for (k, v) in inst.params.iter() {
        plan.num(k, v);
    }
    plan.num("perturb", eps);
    let c = inst.c;
    let data = if eps == 0.0 {
        inst.data()
    } else {
        let h = inst.h.plus_scaled(eps, &ScalarField1D::sin());
        match &inst.f {
            Some(f) => NearHorizonData::new(h, f.clone(), c),
            None => NearHorizonData::from_h(h, c),
        }
    };
    let g = nh_metric(&data);
    let x = weyl_oneform_generic(&data);
    let h = data.h.clone();
    let mut comps = names(&EW_NAMES);
    comps.push("ode4".into());
    plan.components = comps;
    plan.eval = Box::new(move |pt| {
        let mut v = ew_components(&g, &x, pt)?;
        v.push(ode4_residual(&h.jet(pt.x)?, c).abs());
        Ok(v)
    });
    plan.profile = Some(Profile { h: data.h, f: data.f });
    Ok(plan)
}

fn prop1(p: &CheckParams) -> Result<Plan> {
    let mut plan = Plan::new("prop1-iff", Window::REAL_LINE, Window::REAL_LINE, JET_TOLERANCE);
    let (h, h_window) = builtin_h(&mut plan, p, "one")?;
    let f_name = match (p.text("F"), p.text("f")) {
        (Some(s), _) | (None, Some(s)) => s.to_string(),
        (None, None) => "exp-int".to_string(),
    };
    let x0 = p.num_or("x0", 0.0)?;
    plan.text("F", &f_name);
    plan.num("x0", x0);
    let f = match f_name.as_str() {
        "one" => ScalarField1D::constant(1.0),
        "zero" => ScalarField1D::constant(0.0),
        "exp" => ScalarField1D::exp(1.0),
        "exp-int" => {
            if !h.has_primitive() {
                plan.tolerance = NUMERIC_TOLERANCE;
            }
            let hh = h.clone();
            ScalarField1D::new(format!("exp(int {})", h.label()), move |x| {
                Ok(hh.jet(x)?.antiderivative(phi_of(&hh, x0, x)?).exp())
            })
        }
        other => {
            return Err(Error::InvalidParams(format!(
                "--F must be one, zero, exp or exp-int, got '{other}'"
            )))
        }
    };
    let sample = intersect(Window::new(-1.0, 1.0), h_window);
    plan.grid = GridSpec::default_for(sample);
    plan.admissible = h_window;
    let data = NearHorizonData::new(h, f, 0.0);
    let g = nh_metric(&data);
    let d = data.clone();
    plan.components = names(&["cotton", "flatness_defect"]);
    plan.eval = Box::new(move |pt| {
        Ok(vec![max_abs3(&cotton(&g, pt)?), flatness_defect(&d, pt.x)?.abs()])
    });
    plan.profile = Some(Profile { h: data.h, f: data.f });
    Ok(plan)
}

fn dkp(p: &CheckParams) -> Result<Plan> {
    let (a, b) = (p.num_or("a", 0.1)?, p.num_or("b", 1.0)?);
    let zero = ScalarField1D::constant(0.0);
    let admissible = weierstrass_window(&zero, a, b, 0.0, 1e-3)?;
    let sample = weierstrass_window(&zero, a, b, 0.0, 0.1)?;
    let mut plan = Plan::new("dkp", sample, admissible, JET_TOLERANCE);
    plan.num("a", a);
    plan.num("b", b);
    let u = dkp_weierstrass(a, b);
    plan.components = names(&["dkp"]);
    plan.eval = Box::new(move |pt| Ok(vec![dkp_residual(&u, pt)?.abs()]));
    Ok(plan)
}

fn hypercr(p: &CheckParams) -> Result<Plan> {
    let q = HyperCRParams {
        a: p.num_or("a", 0.7)?,
        b: p.num_or("b", 1.3)?,
        e: p.num_or("e", 0.2)?,
        j: p.num_or("j", 0.5)?,
        k: p.num_or("k", -0.4)?,
        l: p.num_or("l", 0.3)?,
    };
    let mut plan = Plan::new("hypercr-family", Window::new(-1.0, 1.0), Window::REAL_LINE, JET_TOLERANCE);
    for (k, v) in [("a", q.a), ("b", q.b), ("e", q.e), ("j", q.j), ("k", q.k), ("l", q.l)] {
        plan.num(k, v);
    }
    let u = hypercr_tanh_family(q)?;
    let (g, x) = hypercr_structures(&u);
    let mut comps = names(&["hypercr"]);
    comps.extend(names(&EW_NAMES));
    plan.components = comps;
    plan.eval = Box::new(move |pt| {
        let mut v = vec![hypercr_residual(&u, pt)?.abs()];
        v.extend(ew_components(&g, &x, pt)?);
        Ok(v)
    });
    Ok(plan)
}

fn max_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

fn max_diff1(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).fold(0.0, |m: f64, i| m.max((a[i] - b[i]).abs()))
}

fn prop4(p: &CheckParams) -> Result<Plan> {
    let (c, l, b) = (p.num_or("c", -1.0)?, p.num_or("l", -1.0)?, p.num_or("b", 0.0)?);
    let mut plan = Plan::new("prop4", Window::new(-1.0, 1.0), Window::REAL_LINE, JET_TOLERANCE);
    plan.num("c", c);
    plan.num("l", l);
    plan.num("b", b);
    let (g, x) = prop4_structures(c, l, b)?;
    let h = prop4_h(c, l, b)?;
    let (hg, hx) = hypercr_structures(&hypercr_aligned_potential(&h, c));
    let (hg, hx) = (hg.pullback_linear(R_RESCALE), hx.pullback_linear(R_RESCALE));
    let nh = if c == -1.0 { Some(prop4_near_horizon_data(l, b)?) } else { None };
    let mut comps = names(&EW_NAMES);
    comps.push("hypercr_alignment".into());
    if nh.is_some() {
        comps.push("near_horizon_alignment".into());
    }
    plan.components = comps;
    if let Some(d) = &nh {
        plan.profile = Some(Profile { h: d.h.clone(), f: d.f.clone() });
    }
    let nh = nh.map(|d| (nh_metric(&d), weyl_oneform_generic(&d)));
    plan.eval = Box::new(move |pt| {
        let mut v = ew_components(&g, &x, pt)?;
        let (gv, xv) = (g.values(pt)?, x.values(pt)?);
        v.push(max_diff(&gv, &hg.values(pt)?).max(max_diff1(&xv, &hx.values(pt)?)));
        if let Some((ng, nx)) = &nh {
            v.push(max_diff(&gv, &ng.values(pt)?).max(max_diff1(&xv, &nx.values(pt)?)));
        }
        Ok(v)
    });
    Ok(plan)
}

fn family(check: &str, tag: FamilyTag, p: &CheckParams) -> Result<Plan> {
    let fp = p
        .remaining_numeric()?
        .into_iter()
        .fold(FamilyParams::new(), |fp, (k, v)| fp.with(&k, v));
    let inst = family_catalog(tag, &fp)?;
    let tol = if tag == FamilyTag::NumericODE { NUMERIC_TOLERANCE } else { JET_TOLERANCE };
    let mut plan = Plan::new(check, inst.sample_window, inst.window, tol);
    for (k, v) in inst.params.iter() {
        plan.num(k, v);
    }
    let c = inst.c;
    // first integral at c = 1 and its expected value, where known
    let first_integral = match tag {
        FamilyTag::Quadratic => Some(0.0),
        FamilyTag::RationalPole if c == 1.0 && inst.params.get("gamma") == Some(1.0) => Some(0.0),
        FamilyTag::Linear => inst.params.get("l").map(|l| -0.5 * l.powi(3)),
        _ => None,
    };
    let data = inst.data();
    let g = nh_metric(&data);
    let x = weyl_oneform_generic(&data);
    let h = inst.h.clone();
    let reduction = inst.reduction;
    let mut comps = vec!["ode4".to_string()];
    if reduction.is_some() {
        comps.push("ode2".into());
    }
    if first_integral.is_some() {
        comps.push("ode3_first_integral".into());
    }
    comps.extend(names(&EW_NAMES));
    plan.components = comps;
    plan.eval = Box::new(move |pt| {
        let hj = h.jet(pt.x)?;
        let mut v = vec![ode4_residual(&hj, c).abs()];
        if let Some((al, be)) = reduction {
            v.push(ode2_residual(&hj, al, be).abs());
        }
        if let Some(want) = first_integral {
            v.push((ode3_first_integral(&hj) - want).abs());
        }
        v.extend(ew_components(&g, &x, pt)?);
        Ok(v)
    });
    plan.profile = Some(Profile { h: data.h, f: data.f });
    Ok(plan)
}

fn chalf(p: &CheckParams) -> Result<Plan> {
    let mut plan = Plan::new("chalf-Fode", Window::REAL_LINE, Window::REAL_LINE, JET_TOLERANCE);
    let (h, h_window) = builtin_h(&mut plan, p, "sin")?;
    let (a, b, x0) = (p.num_or("a", 0.1)?, p.num_or("b", 1.0)?, p.num_or("x0", 0.0)?);
    for (k, v) in [("a", a), ("b", b), ("x0", x0)] {
        plan.num(k, v);
    }
    plan.admissible = intersect(weierstrass_window(&h, a, b, x0, 1e-3)?, h_window);
    plan.grid = GridSpec::default_for(intersect(weierstrass_window(&h, a, b, x0, 0.1)?, h_window));
    if uses_quadrature(&h) {
        plan.tolerance = NUMERIC_TOLERANCE;
    }
    let data = weierstrass_data(&h, a, b, x0);
    let (hh, ff) = (data.h.clone(), data.f.clone());
    plan.components = names(&["F_ode"]);
    plan.eval = Box::new(move |pt| Ok(vec![f_ode_residual_chalf(&ff.jet(pt.x)?, &hh.jet(pt.x)?).abs()]));
    plan.profile = Some(Profile { h: data.h, f: data.f });
    Ok(plan)
}
