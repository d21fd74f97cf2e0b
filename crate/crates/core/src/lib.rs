//! Exact machinery for "good pairs" `(l, n)`: symbolic determinants of
//! symmetric matrices of linear forms, definiteness certificates for the
//! resulting homogeneous forms, search for definite-determinant matrices,
//! the quadratic-form manifolds they induce, and power-law series and
//! covering-count checks for the associated convergence criterion.

pub mod definiteness;
pub mod error;
pub mod gbsp;
pub mod manifolds;
pub mod matrices;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};
pub use poly::{LinearForm, Monomial, Poly};
pub use rational::Rational;
