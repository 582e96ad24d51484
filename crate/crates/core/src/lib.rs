//! Numerical certification of Einstein-Weyl structures on three-dimensional
//! near-horizon metrics.

// `!(a < b)` keeps NaN on the failing side; index loops mirror tensor notation.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::excessive_precision
)]

pub mod error;
pub mod curvature;
pub mod jets;
pub mod nearhorizon;
pub mod odesolve;
pub mod pdeverify;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
