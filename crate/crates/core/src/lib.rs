//! Simulation and regularity analysis of the Itô multifractional stable
//! motion
//! `X(t) = ∫ [(t−x)_+^{H(x)−1/α} − (−x)_+^{H(x)−1/α}] dL(x)`,
//! its classical counterpart with `H(t)` in place of `H(x)`, and linear
//! fractional stable motion.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod hurst;
pub mod kernel;
pub mod quad;
pub mod simulate;
pub mod stable_random;
pub mod stats;

pub use error::{Error, Result};
pub use hurst::{HurstFunction, PathContext};
pub use simulate::{JumpSet, PathMode, SamplePath, TruncationWindow};
pub use stable_random::{RngStream, StableSpec};
