//! Exact rational and integer matrix kernel: Hermite normal form, saturation,
//! Gram determinants, rank, kernels and an exact LLL used to precondition
//! enumeration. No floating point anywhere in here.

mod elimination;
mod gram;
mod hnf;
mod lll;
mod matrix;

pub use elimination::{det, in_row_space, inverse, is_psd, rank, reduce_against, rref};
pub use gram::{congruence, gram_det, gram_matrix};
pub use hnf::{
    gcd_all, hnf, hnf_basis, integer_kernel, is_saturated, is_unimodular, primitive_row, saturate,
    unimodular_completion, unimodular_inverse, Hnf,
};
pub use lll::{gso, lll_gram, Gso, Reduced};
pub use matrix::{dot, IntMatrix, Matrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("vectors are linearly dependent (Gram determinant is zero)")]
    DependentVectors,
    #[error("empty vector list")]
    Empty,
}
