//! Lie algebras, their subalgebras, and the groups they integrate to.

mod algebra;
pub mod bch;
mod group;
pub mod matrix;
mod subalgebra;

pub use algebra::{AlgebraVector, BracketEntry, LieAlgebra, Nilpotency};
pub use bch::BchTable;
pub use group::{Group, GroupElement, MatrixRealization};
pub use subalgebra::{ad_matrix, Subalgebra};
