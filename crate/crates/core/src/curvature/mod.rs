//! Curvature of 3D metrics given by closed-form coordinate components.
//!
//! Fields are closures over the coordinate jets `(nu, r, x)`, so every
//! derivative needed downstream (Christoffel symbols, Ricci, Schouten,
//! Cotton) comes out of jet arithmetic without differencing. Each field
//! records the derivative order through which its jets are exact; an
//! operation refuses fields that are not smooth enough for it.
//!
//! Conventions: `Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)`,
//! `R_bd = d_a Gamma^a_db - d_d Gamma^a_ab + Gamma^a_ae Gamma^e_db - Gamma^a_de Gamma^e_ab`,
//! `P = Ric - (R/4) g`, `C_abc = nabla_c P_ab - nabla_b P_ac`.

mod fields;
mod tensors;

pub use fields::{conformal_rescale, MetricField, OneFormField, ScalarField3D};
pub use tensors::{
    christoffel, cotton, curvature_pack, ew_residual, ew_tensor, faraday,
    ricci_scalar_schouten, CurvaturePack,
};

/// A 3x3 array indexed in `(nu, r, x)` order.
pub type Mat3 = [[f64; 3]; 3];
/// A rank-3 array `t[a][b][c]`.
pub type Tensor3 = [[[f64; 3]; 3]; 3];

/// Largest absolute entry.
pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Largest absolute entry of a rank-3 array.
pub fn max_abs3(t: &Tensor3) -> f64 {
    t.iter().flatten().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
