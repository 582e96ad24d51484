use crate::error::{Error, Result};

pub type Rhs<'a> = Box<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'a>;
pub type Guard<'a> = Box<dyn Fn(f64, &[f64]) -> bool + Send + Sync + 'a>;

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

/// Initial value problem `y' = f(x, y)`, `y(x0) = y0`.
pub struct IvpSpec<'a> {
    pub rhs: Rhs<'a>,
    pub x0: f64,
    pub y0: Vec<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Returns `true` when the state is too close to a singular locus; the
    /// integration stops before accepting such a state.
    pub guard: Option<Guard<'a>>,
    /// Take steps of exactly this size with no error control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl<'a> IvpSpec<'a> {
    pub fn new(
        x0: f64,
        y0: Vec<f64>,
        rhs: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'a,
    ) -> Self {
        Self {
            rhs: Box::new(rhs),
            x0,
            y0,
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            guard: None,
            fixed_step: None,
            max_steps: 100_000,
        }
    }

    pub fn tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn guard(mut self, g: impl Fn(f64, &[f64]) -> bool + Send + Sync + 'a) -> Self {
        self.guard = Some(Box::new(g));
        self
    }

    pub fn fixed_step(mut self, h: f64) -> Self {
        self.fixed_step = Some(h);
        self
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }

    fn guarded(&self, x: f64, y: &[f64]) -> bool {
        self.guard.as_ref().is_some_and(|g| g(x, y))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StopReason {
    Completed,
    /// The guard fired for the state at `x`; the trajectory ends before it.
    Guard { x: f64 },
    /// The step size underflowed near `x`.
    StepUnderflow { x: f64 },
    NonFinite { x: f64 },
    MaxSteps { x: f64 },
}

#[derive(Clone, Debug)]
struct Segment {
    x: f64,
    h: f64,
    // five continuous-extension coefficient vectors, each of length dim
    cont: Vec<f64>,
}

/// Accepted steps with their dense-output interpolants.
#[derive(Clone, Debug)]
pub struct Trajectory {
    dim: usize,
    x_start: f64,
    y_start: Vec<f64>,
    segments: Vec<Segment>,
    pub stop: StopReason,
    pub accepted: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn x_start(&self) -> f64 {
        self.x_start
    }

    /// Last abscissa reached.
    pub fn x_end(&self) -> f64 {
        self.segments.last().map_or(self.x_start, |s| s.x + s.h)
    }

    pub fn completed(&self) -> bool {
        self.stop == StopReason::Completed
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    /// Step boundaries, starting with `x_start`.
    pub fn knots(&self) -> Vec<f64> {
        std::iter::once(self.x_start)
            .chain(self.segments.iter().map(|s| s.x + s.h))
            .collect()
    }

    pub fn final_state(&self) -> Vec<f64> {
        match self.segments.last() {
            Some(s) => self.eval_segment(s, 1.0),
            None => self.y_start.clone(),
        }
    }

    fn eval_segment(&self, s: &Segment, theta: f64) -> Vec<f64> {
        let n = self.dim;
        let t1 = 1.0 - theta;
        (0..n)
            .map(|i| {
                let r = |k: usize| s.cont[k * n + i];
                r(0) + theta * (r(1) + t1 * (r(2) + theta * (r(3) + t1 * r(4))))
            })
            .collect()
    }

    /// Evaluates segment `i` at local parameter `theta` in `[0, 1]`.
    pub fn eval_on_segment(&self, i: usize, theta: f64) -> Vec<f64> {
        self.eval_segment(&self.segments[i], theta)
    }

    /// Dense output at `x`; `None` outside the integrated range.
    pub fn eval(&self, x: f64) -> Option<Vec<f64>> {
        let (lo, hi) = {
            let (a, b) = (self.x_start, self.x_end());
            (a.min(b), a.max(b))
        };
        if !(x >= lo && x <= hi) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.y_start.clone());
        }
        let forward = self.x_end() >= self.x_start;
        let idx = self.segments.partition_point(|s| {
            let end = s.x + s.h;
            if forward {
                end < x
            } else {
                end > x
            }
        });
        let s = &self.segments[idx.min(self.segments.len() - 1)];
        Some(self.eval_segment(s, (x - s.x) / s.h))
    }
}

fn rms_norm(v: &[f64], scale: &[f64]) -> f64 {
    let s: f64 = v.iter().zip(scale).map(|(a, b)| (a / b).powi(2)).sum();
    (s / v.len() as f64).sqrt()
}

fn initial_step(spec: &IvpSpec, f0: &[f64], dir: f64, span: f64) -> f64 {
    let n = spec.dimension();
    let sk: Vec<f64> = spec
        .y0
        .iter()
        .map(|y| spec.atol + spec.rtol * y.abs())
        .collect();
    let d0 = rms_norm(&spec.y0, &sk);
    let d1 = rms_norm(f0, &sk);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(spec.max_step).min(span);
    let y1: Vec<f64> = (0..n).map(|i| spec.y0[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    (spec.rhs)(spec.x0 + dir * h0, &y1, &mut f1);
    let diff: Vec<f64> = (0..n).map(|i| f1[i] - f0[i]).collect();
    let d2 = rms_norm(&diff, &sk) / h0;
    let dmax = d1.max(d2);
    let h1 = if !(dmax > 1e-15) {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    (100.0 * h0).min(h1).min(spec.max_step).min(span)
}

/// Integrates to `x_end`, reporting every stop condition through
/// [`Trajectory::stop`]. Fails only if the guard fires at the initial point.
pub fn integrate_partial(spec: &IvpSpec, x_end: f64) -> Result<Trajectory> {
    let n = spec.dimension();
    if spec.guarded(spec.x0, &spec.y0) {
        return Err(Error::SingularStart { x: spec.x0 });
    }
    let mut traj = Trajectory {
        dim: n,
        x_start: spec.x0,
        y_start: spec.y0.clone(),
        segments: Vec::new(),
        stop: StopReason::Completed,
        accepted: 0,
        rejected: 0,
    };
    let span = (x_end - spec.x0).abs();
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = (x_end - spec.x0).signum();

    let mut x = spec.x0;
    let mut y = spec.y0.clone();
    let mut k1 = vec![0.0; n];
    (spec.rhs)(x, &y, &mut k1);
    let mut h = match spec.fixed_step {
        Some(hf) => hf.abs(),
        None => initial_step(spec, &k1, dir, span),
    };
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut ys = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err_vec = vec![0.0; n];

    for _ in 0..spec.max_steps {
        let remaining = (x_end - x) * dir;
        if remaining <= 1e-14 * x.abs().max(1.0) {
            traj.stop = StopReason::Completed;
            return Ok(traj);
        }
        h = h.min(spec.max_step).min(remaining);
        if h < 1e-14 * x.abs().max(1.0) {
            traj.stop = StopReason::StepUnderflow { x };
            return Ok(traj);
        }
        let hs = dir * h;

        for i in 0..n {
            ys[i] = y[i] + hs * A21 * k1[i];
        }
        (spec.rhs)(x + C2 * hs, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        (spec.rhs)(x + C3 * hs, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        (spec.rhs)(x + C4 * hs, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        (spec.rhs)(x + C5 * hs, &ys, &mut k5);
        for i in 0..n {
            ys[i] = y[i]
                + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        (spec.rhs)(x + hs, &ys, &mut k6);
        for i in 0..n {
            y_new[i] = y[i]
                + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        (spec.rhs)(x + hs, &y_new, &mut k7);
        for i in 0..n {
            err_vec[i] = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }

        let finite = y_new.iter().chain(k7.iter()).all(|v| v.is_finite());
        let err = if spec.fixed_step.is_some() {
            if finite {
                0.0
            } else {
                f64::INFINITY
            }
        } else if finite {
            let sk: Vec<f64> = (0..n)
                .map(|i| spec.atol + spec.rtol * y[i].abs().max(y_new[i].abs()))
                .collect();
            rms_norm(&err_vec, &sk)
        } else {
            f64::INFINITY
        };

        if spec.fixed_step.is_some() && !finite {
            traj.stop = StopReason::NonFinite { x };
            return Ok(traj);
        }

        if err <= 1.0 {
            if spec.guarded(x + hs, &y_new) {
                traj.stop = StopReason::Guard { x: x + hs };
                return Ok(traj);
            }
            let mut cont = vec![0.0; 5 * n];
            for i in 0..n {
                let dy = y_new[i] - y[i];
                let bspl = hs * k1[i] - dy;
                cont[i] = y[i];
                cont[n + i] = dy;
                cont[2 * n + i] = bspl;
                cont[3 * n + i] = dy - hs * k7[i] - bspl;
                cont[4 * n + i] = hs
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            traj.segments.push(Segment { x, h: hs, cont });
            traj.accepted += 1;
            x += hs;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);

            if spec.fixed_step.is_none() {
                let fac11 = err.powf(EXPO1);
                let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                facold = err.max(1e-4);
                h = h_new;
            }
            last_rejected = false;
        } else {
            traj.rejected += 1;
            last_rejected = true;
            let shrink = if err.is_finite() {
                (err.powf(EXPO1) / SAFE).min(1.0 / FAC_MIN)
            } else {
                1.0 / FAC_MIN
            };
            h /= shrink;
        }
    }
    traj.stop = StopReason::MaxSteps { x };
    Ok(traj)
}

/// Integrates to `x_end`. A guard stop is reported through the trajectory;
/// step-size underflow is an error.
pub fn integrate(spec: &IvpSpec, x_end: f64) -> Result<Trajectory> {
    let traj = integrate_partial(spec, x_end)?;
    match traj.stop {
        StopReason::StepUnderflow { x } => Err(Error::Stiffness { x }),
        _ => Ok(traj),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let spec = IvpSpec::new(0.0, vec![1.0], |_, y, dy| dy[0] = y[0]);
        let traj = integrate(&spec, 1.0).unwrap();
        assert!(traj.completed());
        assert!((traj.final_state()[0] - std::f64::consts::E).abs() < 1e-9);
        let mid = traj.eval(0.37).unwrap()[0];
        assert!((mid - 0.37_f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn backward_integration() {
        let spec = IvpSpec::new(1.0, vec![std::f64::consts::E], |_, y, dy| dy[0] = y[0]);
        let traj = integrate(&spec, 0.0).unwrap();
        assert!((traj.final_state()[0] - 1.0).abs() < 1e-9);
        assert!((traj.eval(0.5).unwrap()[0] - 0.5_f64.exp()).abs() < 1e-9);
        assert!(traj.eval(1.5).is_none());
    }

    #[test]
    fn rational_solution_of_cubic_equation() {
        // h'' = 2 h^3 with h = 1/x
        let spec = IvpSpec::new(1.0, vec![1.0, -1.0], |_, y, dy| {
            dy[0] = y[1];
            dy[1] = 2.0 * y[0].powi(3);
        });
        let traj = integrate(&spec, 3.0).unwrap();
        assert!((traj.final_state()[0] - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn dense_output_is_continuous_at_knots() {
        let spec = IvpSpec::new(0.0, vec![0.0, 1.0], |_, y, dy| {
            dy[0] = y[1];
            dy[1] = -y[0];
        })
        .tolerances(1e-8, 1e-10);
        let traj = integrate(&spec, 10.0).unwrap();
        assert!(traj.num_segments() > 3);
        for i in 0..traj.num_segments() - 1 {
            let left = traj.eval_on_segment(i, 1.0);
            let right = traj.eval_on_segment(i + 1, 0.0);
            for (a, b) in left.iter().zip(&right) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn guard_stops_before_singularity() {
        // h' = -1 from h = 1 reaches zero at x = 1
        let spec = IvpSpec::new(0.0, vec![1.0], |_, _, dy| dy[0] = -1.0)
            .max_step(0.01)
            .guard(|_, y| y[0].abs() < 0.05);
        let traj = integrate(&spec, 2.0).unwrap();
        match traj.stop {
            StopReason::Guard { x } => assert!(x > 0.94 && x < 0.97),
            ref s => panic!("unexpected stop {s:?}"),
        }
        assert!(traj.final_state()[0] >= 0.05);
    }

    #[test]
    fn guard_at_start_is_an_error() {
        let spec = IvpSpec::new(0.0, vec![0.0], |_, _, dy| dy[0] = 1.0).guard(|_, y| y[0].abs() < 1e-6);
        assert!(matches!(integrate(&spec, 1.0), Err(Error::SingularStart { .. })));
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y^2, y(0) = 1 blows up at x = 1
        let spec = IvpSpec::new(0.0, vec![1.0], |_, y, dy| dy[0] = y[0] * y[0]);
        let traj = integrate_partial(&spec, 2.0).unwrap();
        assert!(!traj.completed());
        assert!(traj.x_end() < 1.0 + 1e-6);
    }

    #[test]
    fn fixed_step_convergence_order() {
        // Global error of a fifth-order method drops by >= 16x per halving.
        let err = |h: f64| {
            let spec = IvpSpec::new(0.0, vec![1.0], |_, y, dy| dy[0] = y[0]).fixed_step(h);
            let traj = integrate(&spec, 1.0).unwrap();
            (traj.final_state()[0] - std::f64::consts::E).abs()
        };
        let mut prev = err(0.25);
        for h in [0.125, 0.0625] {
            let e = err(h);
            assert!(prev / e >= 16.0, "ratio {}", prev / e);
            prev = e;
        }
    }
}
