//! Exact computations for rank-2 staggered modules over the Virasoro algebra.
//!
//! The crate is organised bottom-up: [`scalars`] and [`linalg`] provide exact
//! arithmetic, [`algebra`] the enveloping algebra, [`verma`] highest-weight
//! modules, [`structure`] their submodule lattices, [`intersection`] the
//! annihilator intersection used to test admissibility, and [`staggered`]
//! the invariants and existence theory built on top.

pub mod algebra;
pub mod error;
pub mod intersection;
pub mod linalg;
pub mod scalars;
pub mod staggered;
pub mod structure;
pub mod verma;

pub use error::{Result, VirError};
pub use scalars::{Rational, Scalar};
