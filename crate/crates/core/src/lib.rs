//! Exact computations for PBW deformations of quantum Drinfeld Hecke algebras.
//!
//! Scalars live in a cyclotomic field `Q(zeta_N)`; groups are finite matrix
//! groups generated over that field.

#![allow(clippy::needless_range_loop, clippy::manual_is_multiple_of)]

pub mod cyclotomic;
pub mod deform;
pub mod families;
pub mod group;
pub mod koszul;
pub mod linalg;
pub mod par;
pub mod pbw;
pub mod qalgebra;
pub mod sampling;

pub use cyclotomic::CycScalar;
pub use group::{Group, Matrix};
pub use pbw::KappaMap;
pub use qalgebra::QTuple;
