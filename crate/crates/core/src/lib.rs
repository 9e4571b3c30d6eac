//! Certified L∞ input-to-state-stability gains for boundary-controlled
//! diffusion, computed from finite-difference approximations.
//!
//! The pipeline builds the discretized heat equation with Dirichlet boundary
//! control ([`systems`]), closes the boundary control into an input operator
//! ([`fattorini`]), extracts growth, sector and fractional-norm constants and
//! assembles the gain functions ([`gains`]), sweeps the construction over a
//! resolution schedule ([`sweep`]) and checks the resulting bounds against
//! exact-step simulations ([`simulate`]).

pub mod error;
pub mod fattorini;
pub mod gains;
pub mod numerics;
pub mod simulate;
pub mod sweep;
pub mod systems;

pub use error::{Error, Result};
