//! Graded spaces, block maps and exact linear algebra over Q(i).

mod graded;
mod matrix;
mod solve;

pub use graded::{adjoint, compose, positive_definite, supercommutator, BlockMap, GradedSpace, HVec, WeightLabel};
pub use matrix::{hermitian_form, vec_add, vec_axpy, vec_is_zero, vec_kron, vec_scale, vec_sub, Matrix};
pub use solve::{det, inverse, nullspace, rank, rref, rref_rows, solve_exact, span_basis, span_rank, Solution};
