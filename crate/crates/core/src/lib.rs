//! Rolling of an n-dimensional Chaplygin ball over a fixed sphere.
//!
//! Elements of so(n) are dense skew-symmetric matrices; operators on so(n)
//! are matrices in the basis `E_i ∧ E_j`, `i < j`, which is orthonormal for
//! `⟨X, Y⟩ = −½ tr(XY)`.

pub mod ball;
pub mod error;
pub mod harness;
pub mod inertia;
pub mod model;
pub mod reduced;
pub mod rubber;
pub mod son;

pub use error::{Error, Result};
pub use inertia::{GeometryParams, InertiaSpec, Variant};
pub use model::Ball;
pub use son::{OrthFrame, SkewMatrix, UnitVector};
