//! Nodal (Lagrange) and Hermite bases for the serendipity spaces `S_r(I^n)`
//! on the cube `I^n = [-1, 1]^n`, for any order `r >= 1` and dimension `n >= 1`.
//!
//! The basis functions are assembled exactly, in rational arithmetic, as signed
//! combinations of tensor-product cardinal functions over rectangular blocks of
//! the serendipity index set. Combination coefficients come from closed-form
//! formulas and are cross-checked against the inclusion-exclusion definition.
//!
//! Module map:
//! - [`multiindex`]: multi-indices, lower sets, the index set `S_r` and its face partition.
//! - [`nodes`]: grid-coordinate schemes, nodes, interpolation functionals, Hermite conditions.
//! - [`polynomial`]: sparse exact polynomials, univariate cardinals, block bases.
//! - [`coefficients`]: combination coefficients and the `c_{m,k}` table.
//! - [`basis`]: basis assembly, interpolation, face restriction and verification.
//! - [`export`]: JSON/CSV file formats shared with the command-line tool.

pub mod basis;
pub mod coefficients;
pub mod error;
pub mod export;
pub mod multiindex;
pub mod nodes;
pub mod polynomial;

pub use basis::{SerendipityBasis, VerifyReport};
pub use coefficients::CoefficientTable;
pub use error::{Error, Result};
pub use multiindex::{FaceIndex, Limits, LowerSet, MultiIndex};
pub use nodes::{GridCoordinates, GridScheme};
pub use polynomial::Polynomial;

/// Exact rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;
