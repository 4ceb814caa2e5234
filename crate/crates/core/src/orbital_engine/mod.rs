//! Regularized orbital integrals on gl̃_n for n ≤ 2.

pub mod cyclo;
pub mod general;
pub mod kgroup;
pub mod lcf;
pub mod oracle;
pub mod rs;
pub mod tate;

pub use cyclo::{Cyclo, PhaseSum};
pub use lcf::{Ambient, Lcf, Term};
pub use tate::{
    central_decomposition, f_phi, orbital_central, orbital_central_cyclo, orbital_via_gamma, CentralForm, LValue,
};
pub use oracle::{oracle_integrate, oracle_report, OracleParams, OracleReport};
pub use rs::{orbital_rs, orbital_rs_cyclo};
pub use general::{group_pullback, orbital_general, GeneralValue, GroupPullback, TestFunction};
