//! Approximate and exact wave patterns for the one-dimensional compressible
//! Navier-Stokes equations in Lagrangian coordinates with Riemann data, a
//! staggered-grid solver, and experiments on the zero-dissipation limit.

pub mod cli;
pub mod error;
pub mod gas;
pub mod harness;
pub mod numerics;
pub mod profiles;
pub mod riemann;
pub mod solver;

pub use error::{Error, Result};
pub use gas::{wave_strength, Family, GasParams, State};
pub use riemann::{solve_pattern, RiemannPattern};
