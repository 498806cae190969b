//! Special functions: log-Gamma and Gamma ratios, Legendre and real-parameter
//! Jacobi polynomials, terminating Gauss hypergeometric sums.

pub(crate) mod gamma;
pub(crate) mod hyper;
pub(crate) mod poly;

pub use gamma::{gamma, gamma_ratio, kershaw_envelope, ln_gamma_ratio, log_gamma, pochhammer, sin_pi, GammaRatioQuery};
pub use hyper::{hyp2f1_terminating, hyp2f1_terminating_with, DEFAULT_PRECISION_BITS};
pub use poly::{jacobi_general_eval, jacobi_via_hypergeometric, legendre_eval, legendre_upto, JacobiParams};
