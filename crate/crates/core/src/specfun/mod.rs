//! Special functions needed by the closed-form solution families:
//! the Weierstrass `p` function with `g2 = 0`, Jacobi elliptic functions
//! for real modulus (and the imaginary modulus `k = i` by transformation),
//! and the Gauss hypergeometric series.

mod hypergeometric;
mod jacobi;
mod weierstrass;

pub use hypergeometric::{hyp2f1, hyp2f1_jet};
pub use jacobi::{elliptic_k, jacobi_sn_cn_dn, sn_imaginary_modulus, sn_imaginary_modulus_jet};
pub use weierstrass::{wp, WeierstrassParams, DEFAULT_POLE_GUARD};
