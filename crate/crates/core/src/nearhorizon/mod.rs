//! Near-horizon metrics, their Weyl 1-forms, and the reduction ODEs for
//! the profile functions `h` and `F`.

mod abel;
mod families;
mod field;
mod metric;
mod odes;

pub use abel::{
    abel_dxdy, abel_h, abel_h_of_x, abel_parametric, abel_parametric_anchored, abel_y_of_z,
    hypergeometric_h, hypergeometric_x,
};
pub use families::{
    family_catalog, integrate_ode4, trajectory_field, FamilyInstance, FamilyParams, FamilyTag,
};
pub use field::{periodicity_check, ScalarField1D, Window};
pub use metric::{
    f_from_h, f_from_h_field, flatness_defect, nh_metric, weierstrass_data, weierstrass_window,
    weyl_oneform_generic, NearHorizonData, F_FROM_H_GUARD,
};
pub use odes::{
    abel_rhs, f_ode_residual_chalf, nlode_residual, ode2_jet, ode2_residual, ode3_first_integral,
    ode4_jet, ode4_residual, ode4_solve_h4, reduction_consistency, zero_beta_alphas, ODE4_GUARD,
};
