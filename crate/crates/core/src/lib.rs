//! Weyl functions of complex Jacobi operators from three directions:
//! difference-equation recursion, boundary-control wave dynamics, and
//! Takagi factorization of the finite truncation.

pub mod dynamics;
pub mod error;
pub mod jacobi;
pub mod recursion;
pub mod series;
pub mod takagi;
pub mod transform;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use jacobi::{
    assemble_finite, validate_coefficients, CoefficientConfig, Complex, FiniteJacobiMatrix,
    JacobiCoefficients, TailRule,
};
