//! Numerical integration: an embedded Runge-Kutta 5(4) initial value solver
//! with dense output, and adaptive Gauss-Kronrod quadrature.

mod dopri;
mod quadrature;

pub use dopri::{integrate, integrate_partial, IvpSpec, StopReason, Trajectory};
pub use quadrature::{quad, quad_with, QuadOptions, QuadResult};
