//! Exact counting of unit-area triangles spanned by Cartesian-product grids
//! `A × B`, with the additive-combinatorics quantities that control it.
//!
//! Counting code is generic over an exact scalar ([`scalar::Exact`]); the
//! bound expressions in [`bounds`] are generic over the float type.

pub mod bounds;
pub mod energy;
pub mod error;
pub mod grid;
pub mod harness;
pub mod incidence;
pub mod scalar;
pub mod sets;

pub use error::{Error, Result};

/// Arbitrary-precision rational scalar.
pub type Rational = num_rational::BigRational;
/// Ground set of arbitrary-precision rationals.
pub type Set = sets::GroundSet<Rational>;
/// Ground set of machine integers.
pub type IntSet = sets::GroundSet<i64>;
/// Grid over arbitrary-precision rationals.
pub type RationalGrid = grid::Grid<Rational>;
/// Grid over machine integers.
pub type IntGrid = grid::Grid<i64>;
