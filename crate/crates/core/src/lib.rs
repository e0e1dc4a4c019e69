//! Blur-shift compactifications of countable-alphabet shifts, with exact ergodic optimization.

pub mod blur;
pub mod classes;
pub mod ergopt;
pub mod error;
pub mod lambda;
pub mod measures;
pub mod potential;
pub mod semilinear;
pub mod shift;
pub mod symbols;
pub mod value;

pub use error::{Error, Result};
