//! Source location estimators working from one peak count per anchor.
//!
//! [`triangulate`] linearises the squared-distance equations by differencing
//! anchor pairs and solves the resulting least-squares problem in closed form.
//! [`gradient_descent`] minimises the residual cost `Σ (z_i − α/d_i³)²`
//! directly.

mod descent;
mod triangulation;

pub use descent::{gd_cost, gd_gradient, gradient_descent, GdOptions, Init, StepRule, StopReason, Trajectory};
pub use triangulation::{build_system, triangulate, TriangulationSystem};
