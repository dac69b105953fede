//! Special functions used by the closed-form expressions.

pub mod bessel;
pub mod gamma;
pub mod hypergeometric;
pub mod mellin;

pub use bessel::{bessel_i, ln_bessel_i, ln_bessel_i_ratio};
pub use gamma::{
    digamma, erfc, gamma, gamma_p, gamma_q, ln_gamma, ln_gamma_complex, ln_pochhammer, trigamma,
    upper_incomplete_gamma, EULER_GAMMA,
};
pub use hypergeometric::{gauss_2f1, kummer_1f1, kummer_1f1_da_at_zero};
pub use mellin::{
    fox_h, fox_h_log, meijer_g, meijer_g_log, ContourConfig, FoxHSpec, LogValue, MeijerGSpec,
    ScaledParam,
};
