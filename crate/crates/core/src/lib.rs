//! Exact computation of pieces of continuous piecewise affine (CPA)
//! functions.
//!
//! A CPA function is given as a min/max tree over affine leaves
//! ([`CpaExpr`]). [`decompose`] splits R^d into convex cells on which a
//! single affine component is active and merges them into maximal pieces,
//! whose number is the minimum number of pieces of any admissible cover.
//! The [`constructions`] module builds functions with many pieces per
//! component; [`bounds`] evaluates the known bounds relating the two
//! counts.

pub mod arrangement;
pub mod bounds;
pub mod constructions;
pub mod cpa;
pub mod error;
pub mod exact;
mod linalg;
pub mod oracle;
pub mod pieces;

pub use arrangement::{Arrangement, Cell, Hyperplane, Side};
pub use cpa::{ComponentSet, CpaExpr};
pub use error::{Error, Result};
pub use exact::{AffineMap, Point, Rational};

pub use pieces::{decompose, pieces_1d, PieceDecomposition};
