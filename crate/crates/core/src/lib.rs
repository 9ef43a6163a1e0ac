//! Exact periodic traveling waves of the abcd Boussinesq system.
//!
//! The crate is layered bottom-up:
//!
//! - [`elliptic`]: Jacobi `sn`, `cn`, `dn` and `K(m)`.
//! - [`poly`] and [`cn_expr`]: exact rational polynomials and the ring of
//!   cn-polynomials with an `sn·dn` factor, used to regenerate the coefficient
//!   systems `h_{p,q} = 0`.
//! - [`reduction`]: which ansatz degrees a parameter set admits, and a checker
//!   for the forced-vanishing chains that bound those degrees.
//! - [`families`]: closed-form solution families and their limits.
//! - [`solver`]: damped Gauss-Newton multistart on the coefficient systems.
//! - [`residual`]: ODE residual, periodicity and limit checks that depend only
//!   on the elliptic kernel.

pub mod cn_expr;
pub mod elliptic;
pub mod error;
pub mod families;
pub mod poly;
pub mod reduction;
pub mod residual;
pub mod solver;
pub mod surd;

pub use error::{Error, Result};
