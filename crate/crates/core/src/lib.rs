//! Exact local computations for the Jacquet–Rallis relative trace formula:
//! invariants and orbit classification, regularized orbital integrals as
//! rational functions of t = p^{-s}, and the transfer to unitary groups.

pub mod cli;
pub mod error;
pub mod exact_linalg;
pub mod invariant_geometry;
pub mod lfactor_symbolic;
pub mod orbit_descent;
pub mod orbital_engine;
pub mod padic_base;
pub mod unitary_transfer;

pub use error::{Error, Result};
