//! Numerical toolkit for the objects behind the Green–Tao theorem on
//! arithmetic progressions in the primes: functions on Z_N, Gowers uniformity
//! norms and dual functions, the energy-increment decomposition, the
//! pseudorandom majorant built from a truncated divisor sum, and exact
//! progression counting.

pub mod arith;
pub mod decompose;
pub mod error;
pub mod format;
pub mod fourier;
pub mod gowers;
pub mod progressions;
pub mod registry;
pub mod sampling;
pub mod weight;
pub mod zn;

pub use error::{GtError, Result};
pub use fourier::{FourierPlan, Spectrum};
pub use zn::GridFunction;
