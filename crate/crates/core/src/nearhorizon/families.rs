use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::abel::{hypergeometric_h, hypergeometric_x};
use super::field::{ScalarField1D, Window};
use super::metric::{weierstrass_data, weierstrass_window, NearHorizonData};
use super::odes::{ode4_jet, reduction_consistency, zero_beta_alphas, ODE4_GUARD};
use crate::error::{Error, Result};
use crate::jets::{Jet, Jet1};
use crate::odesolve::{integrate_partial, IvpSpec, StopReason, Trajectory};
use crate::specfun::{elliptic_k, sn_imaginary_modulus_jet};

/// Closed-form and numeric solution families for `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    Weierstrass,
    JacobiReduction,
    HypergeometricParametric,
    TanFamily,
    TanhHyperCR,
    Linear,
    RationalPole,
    Quadratic,
    NumericODE,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 9] = [
        FamilyTag::Weierstrass,
        FamilyTag::JacobiReduction,
        FamilyTag::HypergeometricParametric,
        FamilyTag::TanFamily,
        FamilyTag::TanhHyperCR,
        FamilyTag::Linear,
        FamilyTag::RationalPole,
        FamilyTag::Quadratic,
        FamilyTag::NumericODE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Weierstrass => "weierstrass",
            FamilyTag::JacobiReduction => "jacobi",
            FamilyTag::HypergeometricParametric => "hypergeometric",
            FamilyTag::TanFamily => "tan",
            FamilyTag::TanhHyperCR => "tanh",
            FamilyTag::Linear => "linear",
            FamilyTag::RationalPole => "rational",
            FamilyTag::Quadratic => "quadratic",
            FamilyTag::NumericODE => "numeric",
        }
    }

    /// Parameter names accepted by [`family_catalog`], besides `lo`/`hi`.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyTag::Weierstrass => &["a", "b", "c"],
            FamilyTag::JacobiReduction => &["c", "mu", "x0"],
            FamilyTag::HypergeometricParametric => &["c", "gamma"],
            FamilyTag::TanFamily => &["l", "b", "c", "branch"],
            FamilyTag::TanhHyperCR => &["l", "b", "c"],
            FamilyTag::Linear => &["l", "b", "c"],
            FamilyTag::RationalPole => &["b", "c", "side", "gamma", "alpha", "branch"],
            FamilyTag::Quadratic => &["b", "c"],
            FamilyTag::NumericODE => &["c", "x0", "h", "hp", "hpp", "hppp", "span"],
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown family tag '{s}'")))
    }
}

/// Named real parameters, kept sorted by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FamilyParams(BTreeMap<String, f64>);

impl FamilyParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: f64) -> Self {
        self.set(name, v);
        self
    }

    pub fn set(&mut self, name: &str, v: f64) {
        self.0.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    /// Reads `name`, recording `default` when absent.
    fn take(&mut self, name: &str, default: f64) -> f64 {
        *self.0.entry(name.to_string()).or_insert(default)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A resolved family member.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub tag: FamilyTag,
    /// Parameters after defaults were filled in.
    pub params: FamilyParams,
    pub h: ScalarField1D,
    /// Explicit `F` for families that are not driven by `h` alone.
    pub f: Option<ScalarField1D>,
    pub c: f64,
    /// Largest interval free of singularities of `h`.
    pub window: Window,
    /// Default sampling interval: inside `window` and clear of zeros of `h`.
    pub sample_window: Window,
    /// `(alpha, beta)` of the second-order reduction this member solves.
    pub reduction: Option<(f64, f64)>,
}

impl FamilyInstance {
    pub fn data(&self) -> NearHorizonData {
        match &self.f {
            Some(f) => NearHorizonData::new(self.h.clone(), f.clone(), self.c),
            None => NearHorizonData::from_h(self.h.clone(), self.c),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn require_c(tag: FamilyTag, c: f64, want: f64) -> Result<()> {
    if c != want {
        return Err(invalid(format!("family {tag} requires c = {want}, got {c}")));
    }
    Ok(())
}

/// Builds a member of family `tag`. Missing parameters take documented
/// defaults; optional `lo`/`hi` request a sampling window, which must lie
/// inside the admissible window.
pub fn family_catalog(tag: FamilyTag, params: &FamilyParams) -> Result<FamilyInstance> {
    if let Some((k, _)) = params
        .iter()
        .find(|(k, _)| !tag.param_names().contains(k) && *k != "lo" && *k != "hi")
    {
        return Err(invalid(format!("family {tag} has no parameter '{k}'")));
    }
    let mut p = params.clone();
    let mut inst = match tag {
        FamilyTag::Linear => linear(&mut p)?,
        FamilyTag::Quadratic => quadratic(&mut p)?,
        FamilyTag::RationalPole => rational(&mut p)?,
        FamilyTag::TanFamily => tan(&mut p)?,
        FamilyTag::TanhHyperCR => tanh(&mut p)?,
        FamilyTag::JacobiReduction => jacobi(&mut p)?,
        FamilyTag::HypergeometricParametric => hypergeometric(&mut p)?,
        FamilyTag::NumericODE => numeric(&mut p)?,
        FamilyTag::Weierstrass => weierstrass(&mut p)?,
    };
    if let (Some(lo), Some(hi)) = (p.get("lo"), p.get("hi")) {
        let req = Window::new(lo, hi);
        if !(lo < hi) || !inst.window.contains_window(&req) {
            return Err(Error::Window {
                what: format!("family {tag}"),
                x: if lo <= inst.window.lo { lo } else { hi },
                lo: inst.window.lo,
                hi: inst.window.hi,
            });
        }
        inst.sample_window = req;
    }
    inst.params = p;
    Ok(inst)
}

fn base(tag: FamilyTag, h: ScalarField1D, c: f64, window: Window, sample: Window) -> FamilyInstance {
    FamilyInstance {
        tag,
        params: FamilyParams::new(),
        h,
        f: None,
        c,
        window,
        sample_window: sample,
        reduction: None,
    }
}

fn linear(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let (l, b, c) = (p.take("l", 1.0), p.take("b", 0.0), p.take("c", 1.0));
    require_c(FamilyTag::Linear, c, 1.0)?;
    let sample = if l != 0.0 {
        let root = -b / l;
        Window::new(root + 0.5, root + 2.5)
    } else {
        Window::new(-1.0, 1.0)
    };
    let mut inst = base(FamilyTag::Linear, ScalarField1D::linear(l, b), c, Window::REAL_LINE, sample);
    inst.reduction = Some((0.0, 0.0));
    Ok(inst)
}

fn quadratic(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let (b, c) = (p.take("b", 0.0), p.take("c", 1.0));
    require_c(FamilyTag::Quadratic, c, 1.0)?;
    let h = ScalarField1D::new(format!("(x - {b})^2"), move |x| Ok((Jet1::var(x) - b).square()))
        .with_primitive(move |x| (x - b).powi(3) / 3.0);
    Ok(base(
        FamilyTag::Quadratic,
        h,
        c,
        Window::REAL_LINE,
        Window::new(b + 0.5, b + 2.5),
    ))
}

fn rational(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let b = p.take("b", 0.0);
    let c = p.take("c", 1.0);
    let side = p.take("side", 1.0);
    let gamma = match (p.get("gamma"), p.get("alpha")) {
        (Some(g), _) => g,
        (None, Some(alpha)) => {
            if alpha == 0.0 {
                return Err(invalid("rational family needs alpha != 0"));
            }
            match p.take("branch", 1.0) {
                1.0 => 2.0 / alpha,
                2.0 => -1.0 / alpha,
                br => return Err(invalid(format!("rational branch must be 1 or 2, got {br}"))),
            }
        }
        (None, None) => 1.0,
    };
    p.set("gamma", gamma);
    if gamma == 0.0 {
        return Err(invalid("rational family needs gamma != 0"));
    }
    let reduction = if c == 1.0 {
        (2.0 / gamma, 4.0 / (gamma * gamma))
    } else {
        let beta = reduction_consistency(0.0, c);
        if ((gamma * gamma * beta) - 2.0).abs() > 1e-12 {
            return Err(invalid(format!(
                "for c = {c} the rational family needs gamma = +-1/|c - 1|, got {gamma}"
            )));
        }
        (0.0, beta)
    };
    let h = ScalarField1D::new(format!("{gamma} / (x - {b})"), move |x| {
        Ok((Jet1::var(x) - b).recip()? * gamma)
    })
    .with_primitive(move |x| gamma * (x - b).abs().ln());
    let (window, sample) = if side >= 0.0 {
        (Window::new(b, f64::INFINITY), Window::new(b + 0.5, b + 2.5))
    } else {
        (Window::new(f64::NEG_INFINITY, b), Window::new(b - 2.5, b - 0.5))
    };
    let mut inst = base(FamilyTag::RationalPole, h, c, window, sample);
    inst.reduction = Some(reduction);
    Ok(inst)
}

fn tan(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let (l, b, c) = (p.take("l", 1.0), p.take("b", 0.0), p.take("c", 0.0));
    let branch = p.take("branch", 1.0);
    let alpha = match branch {
        1.0 => zero_beta_alphas(c)[0],
        2.0 => zero_beta_alphas(c)[1],
        br => return Err(invalid(format!("tan branch must be 1 or 2, got {br}"))),
    };
    p.set("alpha", alpha);
    if !(l * alpha > 0.0) {
        return Err(invalid(format!(
            "tan family needs l * alpha > 0 (l = {l}, alpha = {alpha})"
        )));
    }
    let k = 0.5 * (2.0 * l * alpha).sqrt();
    let amp = 2.0 * k / alpha;
    let h = ScalarField1D::new(format!("{amp} tan({k} (x + {b}))"), move |x| {
        Ok(((Jet1::var(x) + b) * k).tan()? * amp)
    })
    .with_period(PI / k)
    .with_primitive(move |x| -amp / k * (k * (x + b)).cos().abs().ln());
    let half = PI / (2.0 * k);
    let window = Window::new(-b - half, -b + half);
    let mut inst = base(FamilyTag::TanFamily, h, c, window, window.fraction(0.55, 0.9));
    inst.reduction = Some((alpha, 0.0));
    Ok(inst)
}

fn tanh(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let (l, b, c) = (p.take("l", -1.0), p.take("b", 0.0), p.take("c", -1.0));
    require_c(FamilyTag::TanhHyperCR, c, -1.0)?;
    if !(c * l > 0.0) {
        return Err(invalid(format!("tanh family needs c * l > 0 (c = {c}, l = {l})")));
    }
    let s = (c * l).sqrt();
    let amp = s / c;
    let h = ScalarField1D::new(format!("{amp} tanh({s} (x + {b}))"), move |x| {
        Ok(((Jet1::var(x) + b) * s).tanh() * amp)
    })
    .with_primitive(move |x| (s * (x + b)).cosh().ln() / c);
    let sample = Window::new(-b + 0.3 / s, -b + 2.3 / s);
    let mut inst = base(FamilyTag::TanhHyperCR, h, c, Window::REAL_LINE, sample);
    inst.reduction = Some((-2.0 * c, 0.0));
    Ok(inst)
}

fn jacobi(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let (c, mu, x0) = (p.take("c", 0.0), p.take("mu", 1.0), p.take("x0", 0.0));
    if c == 1.0 {
        return Err(invalid("jacobi family needs c != 1"));
    }
    if !(mu > 0.0) {
        return Err(invalid(format!("jacobi family needs mu > 0, got {mu}")));
    }
    let beta = reduction_consistency(0.0, c);
    let amp = mu * (2.0 / beta).sqrt();
    // zeros of sn(u | -1) are spaced by 2 K(-1) = sqrt(2) K(1/2)
    let gap = SQRT_2 * elliptic_k(0.5)?;
    let h = ScalarField1D::new(format!("{amp} ns({mu} (x - {x0}) | -1)"), move |x| {
        let sn = sn_imaginary_modulus_jet(mu * (x - x0))?;
        let mut scale = 1.0;
        let coeffs = sn.coeffs().map(|v| {
            let out = v * scale;
            scale *= mu;
            out
        });
        Ok(Jet1::from_coeffs(coeffs).recip()? * amp)
    })
    .with_period(2.0 * gap / mu);
    let window = Window::new(x0, x0 + gap / mu);
    let mut inst = base(FamilyTag::JacobiReduction, h, c, window, window.fraction(0.1, 0.9));
    inst.reduction = Some((0.0, beta));
    Ok(inst)
}

const HYPER_Z: (f64, f64) = (0.02, 0.9);
const HYPER_SAMPLE_Z: (f64, f64) = (0.05, 0.6);

fn hypergeometric(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let (c, gamma) = (p.take("c", 0.0), p.take("gamma", 1.0));
    if c == 1.0 || gamma == 0.0 {
        return Err(invalid("hypergeometric family needs c != 1 and gamma != 0"));
    }
    let beta = reduction_consistency(0.0, c);
    let x_of = move |z: f64| hypergeometric_x(z, beta, gamma);
    let span = |(a, b): (f64, f64)| -> Result<Window> {
        let (xa, xb) = (x_of(a)?, x_of(b)?);
        Ok(Window::new(xa.min(xb), xa.max(xb)))
    };
    let window = span(HYPER_Z)?;
    let sample = span(HYPER_SAMPLE_Z)?;
    let h = ScalarField1D::new(
        format!("hypergeometric(beta = {beta}, gamma = {gamma})"),
        move |x| {
            let z = invert_monotone(&x_of, x, 1e-9, 0.95)?;
            let zj = Jet1::var(z);
            let xz = hypergeometric_x(zj, beta, gamma)?;
            let hz = hypergeometric_h(zj, beta, gamma)?;
            Ok(hz.compose_into(xz.revert(z)?))
        },
    );
    let mut inst = base(FamilyTag::HypergeometricParametric, h, c, window, sample);
    inst.reduction = Some((0.0, beta));
    Ok(inst)
}

/// Solves `f(z) = target` on `[lo, hi]` for monotone `f` by bisection.
fn invert_monotone(f: &impl Fn(f64) -> Result<f64>, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo)?, f(hi)?);
    let increasing = fhi > flo;
    if (target - flo) * (target - fhi) > 0.0 {
        return Err(Error::Window {
            what: "hypergeometric parametrisation".into(),
            x: target,
            lo: flo.min(fhi),
            hi: flo.max(fhi),
        });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m)? < target) == increasing {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Integrates the fourth-order ODE in solved form from `x0` towards
/// `x_end`, stopping before `|h|` falls to the guard.
pub fn integrate_ode4(c: f64, x0: f64, state: [f64; 4], x_end: f64) -> Result<Trajectory> {
    let spec = IvpSpec::new(x0, state.to_vec(), move |_, y, dy| {
        let h4 = ode4_jet([y[0], y[1], y[2], y[3]], c).map_or(f64::NAN, |j| j.deriv(4));
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = y[3];
        dy[3] = h4;
    })
    .guard(|_, y| !(y[0].abs() > ODE4_GUARD) || !y.iter().all(|v| v.is_finite()));
    integrate_partial(&spec, x_end)
}

/// A field reading `h` from a trajectory of the fourth-order ODE; the top
/// derivative comes from the ODE itself.
pub fn trajectory_field(traj: Arc<Trajectory>, c: f64, label: impl Into<String>) -> ScalarField1D {
    let (lo, hi) = {
        let (a, b) = (traj.x_start(), traj.x_end());
        (a.min(b), a.max(b))
    };
    ScalarField1D::new(label, move |x| {
        let s = traj.eval(x).ok_or_else(|| Error::Window {
            what: "integrated trajectory".into(),
            x,
            lo,
            hi,
        })?;
        ode4_jet([s[0], s[1], s[2], s[3]], c)
    })
}

fn numeric(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let c = p.take("c", 1.0);
    let x0 = p.take("x0", 1.0);
    let state = [
        p.take("h", 1.0),
        p.take("hp", 2.0),
        p.take("hpp", 2.0),
        p.take("hppp", 0.0),
    ];
    let span = p.take("span", 2.0);
    let traj = integrate_ode4(c, x0, state, x0 + span)?;
    if traj.num_segments() == 0 {
        return Err(Error::SingularStart { x: x0 });
    }
    let (a, b) = (traj.x_start(), traj.x_end());
    let window = Window::new(a.min(b), a.max(b));
    let label = format!("numeric(c = {c}, seed = {state:?} at {x0})");
    let stop = traj.stop.clone();
    let h = trajectory_field(Arc::new(traj), c, label);
    let inst = base(FamilyTag::NumericODE, h, c, window, window.fraction(0.05, 0.95));
    if let StopReason::Guard { x } | StopReason::StepUnderflow { x } = stop {
        p.set("stopped_at", x);
    }
    Ok(inst)
}

fn weierstrass(p: &mut FamilyParams) -> Result<FamilyInstance> {
    let (a, b) = (p.take("a", 0.1), p.take("b", 1.0));
    let c = p.take("c", -0.5);
    require_c(FamilyTag::Weierstrass, c, -0.5)?;
    let h = ScalarField1D::constant(0.0);
    let data = weierstrass_data(&h, a, b, 0.0);
    let window = weierstrass_window(&h, a, b, 0.0, 1e-3)?;
    let sample = weierstrass_window(&h, a, b, 0.0, 0.1)?;
    let mut inst = base(FamilyTag::Weierstrass, h, c, window, sample);
    inst.f = Some(data.f);
    Ok(inst)
}
