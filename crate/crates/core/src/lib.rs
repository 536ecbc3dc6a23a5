//! Localization of a molecular source in a diffusion-based molecular
//! communication channel from the peak of the channel impulse response
//! observed at passive sensors.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`]: points, anchor sets, barycentric coordinates and the
//!   open-convex-hull test that gates every scenario.
//! - [`channel`]: the 3-D diffusion impulse response, its peak, the
//!   peak-count coefficient and Poisson measurement generation.
//! - [`estimators`]: closed-form triangulation least squares and gradient
//!   descent on the peak-count residual cost.
//! - [`crb`]: Poisson log-likelihood, its derivatives, the Fisher
//!   information matrix and the Cramér-Rao bound.
//! - [`harness`]: scenario configuration, Monte Carlo sweeps, convergence
//!   traces and CSV/JSON export.
//! - [`cli`]: the command-line front end used by the `molloc` binary.
//!
//! All public inputs and outputs are SI. Internally lengths are expressed in
//! units of [`LENGTH_SCALE`] so that the `d^7` powers in the Fisher matrix
//! stay far from the subnormal range.

pub mod channel;
pub mod cli;
pub mod crb;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod harness;
mod model;
pub mod poisson;
pub mod seed;

pub use error::{Error, ErrorCategory, Result};

/// Internal length unit (1 μm). Lengths are divided by this before any
/// power-law arithmetic.
pub const LENGTH_SCALE: f64 = 1e-6;
