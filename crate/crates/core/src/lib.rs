//! Moments of exponential functionals of subordinators.
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

pub mod bernstein;
pub mod bgamma;
pub mod convolution;
pub mod error;
pub mod montecarlo;
pub mod quad;
pub mod scalar;
pub mod series;
pub mod special;
pub mod symmetric;

pub use error::{Error, Result};
pub use num_complex::Complex;

/// Complex double.
pub type C64 = Complex<f64>;
pub type Bernstein = bernstein::BernsteinSpec<f64>;
