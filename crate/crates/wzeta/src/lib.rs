//! Weighted Ihara zeta functions and prime counting on finite graphs.
//!
//! The crate models weighted oriented graphs, their transfer operator, the
//! determinant identity linking det(1 - uT) with the Euler product over
//! primitive cycle classes, Perron-Frobenius block structure, prime-cycle
//! counting asymptotics, and multivariate zeta functions of commuting
//! translation families.
//!
//! Everything that is weight arithmetic is generic over [`scalar::Scalar`],
//! with `f64` and exact big-rational instantiations; spectral routines work
//! in `f64`.

pub mod bass;
pub mod census;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod pgt;
pub mod poly;
pub mod scalar;
pub mod spectral;
pub mod translations;
pub mod zeta;

pub use error::{Error, Result};

/// Exact weight scalar.
pub type Rational = num::BigRational;

pub type GraphF64 = graph::WeightedGraph<f64>;
pub type GraphRational = graph::WeightedGraph<Rational>;
pub type BassF64 = bass::BassMatrix<f64>;
pub type BassRational = bass::BassMatrix<Rational>;
pub type MatrixF64 = matrix::Matrix<f64>;
pub type MatrixRational = matrix::Matrix<Rational>;
