use thiserror::Error;

/// Errors raised by the verification engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular point in {op}: offending value {value}")]
    SingularPoint { op: &'static str, value: f64 },

    #[error("degenerate metric: |det g| = {det:e} at {at}")]
    DegenerateMetric { det: f64, at: String },

    #[error("{op}: argument {value} outside domain ({reason})")]
    Domain {
        op: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("weierstrass p: z = {z} lies within {distance:e} of the pole at {nearest_pole}")]
    Pole {
        z: f64,
        nearest_pole: f64,
        distance: f64,
    },

    #[error("x = {x} outside admissible window [{lo}, {hi}] of {what}")]
    Window {
        what: String,
        x: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("integration guard triggered at the initial point x = {x}")]
    SingularStart { x: f64 },

    #[error("step size underflow at x = {x} (stiff or singular problem)")]
    Stiffness { x: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error bound {bound:e}")]
    Accuracy { estimate: f64, bound: f64 },

    #[error("unknown check '{0}'")]
    UnknownCheck(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
