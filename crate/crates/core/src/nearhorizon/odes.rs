//! Residuals of the ODEs governing `h` and `F`, plus the solved forms used
//! for integration.

use crate::error::{Error, Result};
use crate::jets::Jet1;

/// Smallest `|h|` accepted by the solved fourth-order form.
pub const ODE4_GUARD: f64 = 1e-6;

/// The fourth-order ODE whose solutions `h` give Einstein-Weyl structures
/// for generic `c`.
pub fn ode4_residual(h: &Jet1, c: f64) -> f64 {
    let [h0, h1, h2, h3, h4] = h.derivatives();
    let cm = c - 1.0;
    h0.powi(3) * h1 * h1 * cm * cm - 0.5 * cm * cm * h0.powi(4) * h2
        + 2.25 * cm * h0 * h0 * h1 * h2
        - 0.75 * cm * h0.powi(3) * h3
        - 0.5 * h1 * h1 * h2
        + 0.5 * h0 * h1 * h3
        + h0 * h2 * h2
        - 0.25 * h0 * h0 * h4
}

/// `h''''` from the fourth-order ODE given `(h, h', h'', h''')`.
pub fn ode4_solve_h4(state: [f64; 4], c: f64) -> Result<f64> {
    let [h0, h1, h2, h3] = state;
    if !(h0.abs() > ODE4_GUARD) {
        return Err(Error::SingularPoint {
            op: "solved fourth-order ODE",
            value: h0,
        });
    }
    let rest = ode4_residual(&Jet1::from_derivatives([h0, h1, h2, h3, 0.0]), c);
    Ok(4.0 * rest / (h0 * h0))
}

/// Jet of a solution of the fourth-order ODE with the given state.
pub fn ode4_jet(state: [f64; 4], c: f64) -> Result<Jet1> {
    let h4 = ode4_solve_h4(state, c)?;
    Ok(Jet1::from_derivatives([state[0], state[1], state[2], state[3], h4]))
}

/// `h'' - alpha h h' - beta h^3`.
pub fn ode2_residual(h: &Jet1, alpha: f64, beta: f64) -> f64 {
    let [h0, h1, h2, _, _] = h.derivatives();
    h2 - alpha * h0 * h1 - beta * h0.powi(3)
}

/// Jet of the solution of `h'' = alpha h h' + beta h^3` through `(h, h')`,
/// with the higher derivatives obtained by differentiating the ODE.
pub fn ode2_jet(h: f64, hp: f64, alpha: f64, beta: f64) -> Jet1 {
    let h2 = alpha * h * hp + beta * h.powi(3);
    let h3 = alpha * (hp * hp + h * h2) + 3.0 * beta * h * h * hp;
    let h4 = alpha * (3.0 * hp * h2 + h * h3) + beta * (6.0 * h * hp * hp + 3.0 * h * h * h2);
    Jet1::from_derivatives([h, hp, h2, h3, h4])
}

/// The `beta` for which every solution of the second-order ODE with
/// parameter `alpha` solves the fourth-order ODE with constant `c`.
pub fn reduction_consistency(alpha: f64, c: f64) -> f64 {
    let cm = c - 1.0;
    2.0 * cm * cm + 3.0 * alpha * cm + alpha * alpha
}

/// The two `alpha` values with `reduction_consistency(alpha, c) = 0`.
pub fn zero_beta_alphas(c: f64) -> [f64; 2] {
    [1.0 - c, 2.0 - 2.0 * c]
}

/// The `F` equation at `c = -1/2`:
/// `-3 F h^2 + 5 h F' + 2 F h' + 12 F^2 - 2 F''`.
pub fn f_ode_residual_chalf(f: &Jet1, h: &Jet1) -> f64 {
    let [f0, f1, f2, _, _] = f.derivatives();
    let [h0, h1, _, _, _] = h.derivatives();
    -3.0 * f0 * h0 * h0 + 5.0 * h0 * f1 + 2.0 * f0 * h1 + 12.0 * f0 * f0 - 2.0 * f2
}

/// First integral of the fourth-order ODE at `c = 1`:
/// `-h^2 h'''/4 + h h' h'' - (h')^3 / 2`.
pub fn ode3_first_integral(h: &Jet1) -> f64 {
    let [h0, h1, h2, h3, _] = h.derivatives();
    -0.25 * h0 * h0 * h3 + h0 * h1 * h2 - 0.5 * h1.powi(3)
}

/// `f''' - f' f'' - (f')^3`, the logarithmic form of the `c = 1` first
/// integral.
pub fn nlode_residual(f: &Jet1) -> f64 {
    let [_, f1, f2, f3, _] = f.derivatives();
    f3 - f1 * f2 - f1.powi(3)
}

/// Right-hand side of the Abel equation `y' = (-beta y^3 - alpha y^2 + 2 y) / h`.
pub fn abel_rhs(y: f64, h: f64, alpha: f64, beta: f64) -> Result<f64> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::SingularPoint {
            op: "abel equation",
            value: h,
        });
    }
    Ok((-beta * y.powi(3) - alpha * y * y + 2.0 * y) / h)
}
