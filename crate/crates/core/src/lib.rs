//! Periodic pseudo-spectral solver for the two-component Degasperis-Procesi
//! system
//!
//! ```text
//! u_t + u u_x = P(D)(3/2 u^2 + c/2 rho^2),   P(D) = -d_x (1 - d_xx)^{-1}
//! rho_t + u rho_x = -2 u_x rho
//! ```
//!
//! together with characteristic tracking, Littlewood-Paley tools and blow-up
//! diagnostics.

// validation reads `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besov;
pub mod characteristics;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod nonlocal;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid, RealField, Spectrum};
pub use solver::{evolve, evolve_with, SolverConfig, State, Termination};
