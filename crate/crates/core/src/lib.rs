//! Gröbner basis complexity toolkit: random binomial ideals, reduced grevlex
//! Gröbner bases, ideal encodings and features, and regressors that learn
//! basis size and degree from the generators.

pub mod algebra;
pub mod encoding;
pub mod error;
pub mod features;
pub mod groebner;
pub mod io;
pub mod labeling;
pub mod learning;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
