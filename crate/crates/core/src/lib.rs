//! Product-of-variates surrogates for Lognormal fading: special functions,
//! fading laws, product densities, mappings, metrics and numerical oracles.

pub mod error;
pub mod dists;
pub mod products;
pub mod mapping;
pub mod metrics;
pub mod oracle;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
