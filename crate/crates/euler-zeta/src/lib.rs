//! Multidimensional polynomial Euler products with complex coefficients:
//! evaluation in the region of absolute convergence, three-way
//! classification of the normalized functions (infinitely divisible /
//! quasi-infinitely divisible only / not characteristic), quasi-Levy
//! measures, zeta-distribution sampling, and the value-distribution
//! inequalities with almost-period searches.

pub mod approx_analyzer;
pub mod classifier;
pub mod error;
pub mod evaluator;
pub mod levy;
pub mod number_kernel;
pub mod parallel;
pub mod rng;
pub mod sampler;
pub mod spec_model;
pub mod value;

pub use error::{Error, Result};
pub use num::complex::Complex64;
pub use spec_model::{builtin_spec, parse_spec, EulerProductSpec, TruncationBounds};
