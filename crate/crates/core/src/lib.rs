//! Partial convexity and xy-convexity of noncommutative polynomials and
//! rational functions, computed through descriptor realizations.
//!
//! The crate is organised bottom-up:
//!
//! * [`ncalg`]: free *-algebra of nc polynomials and evaluation at Hermitian tuples.
//! * [`matkit`]: dense Hermitian numerics (PSD tests, square roots, Khatri–Rao, completion, samplers).
//! * [`realize`]: symmetric realizations, domains, minimization, butterfly realizations.
//! * [`partialcvx`]: x-partial Hessians, convexity verdicts and negativity witnesses.
//! * [`xycvx`]: xy-Hessian, middle matrix, Gram completion and Λ*Λ + pencil certificates.
//! * [`cli`]: file formats, configs and JSON reports behind the `ncconvex` binary.

pub mod cli;
pub mod error;
pub mod matkit;
pub mod ncalg;
pub mod partialcvx;
pub mod realize;
pub mod tol;
pub mod xycvx;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
