//! Convex trigonometry and curvature exponents of sub-Finsler Heisenberg groups.
//!
//! A planar norm determines a sub-Finsler structure on the Heisenberg group.
//! This crate builds the generalized trigonometric functions of the norm and
//! its polar, evaluates geodesics and the Jacobian of the exponential map, and
//! estimates the curvature exponent, the least `N` for which `MCP(0, N)` holds.

pub mod curvature;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod norm;
pub mod quadrature;
pub mod solve;
pub mod trig;
pub mod vec2;

pub use error::{Error, Result};
pub use exec::Execution;
pub use norm::{build_norm, Norm2D, NormSpec};
pub use trig::{trig_table, TrigTable};
pub use vec2::Vec2;
