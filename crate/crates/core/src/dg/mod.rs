//! Discontinuous Galerkin containers and spatial operators.

pub mod field;
pub mod kinetic;
pub mod limiter;
pub mod mesh;
pub mod ops;

pub use field::{DgField, KineticField, NodalValue, ScalarField, StateField};
pub use mesh::{Boundary, EpsProfile, Mesh1D};
pub use ops::Parity;
