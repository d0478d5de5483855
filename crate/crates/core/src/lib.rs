//! Hierarchical Euler / Navier-Stokes / BGK solver in one space dimension.

pub mod dg;
pub mod driver;
pub mod error;
pub mod imex;
pub mod quadrature;
pub mod regime;
pub mod solver;
pub mod state;
pub mod velocity;

pub use error::{Result, SolverError};
