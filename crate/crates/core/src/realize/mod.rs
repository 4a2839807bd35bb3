//! Symmetric descriptor realizations, their domains, minimization and
//! the butterfly factorization.

mod butterfly;
mod linrep;
pub mod random;
mod realization;
mod slice;

pub use butterfly::{caterpillar, poly_butterfly, schur_butterfly, ButterflyCert, Caterpillar, PolyButterfly, SchurButterfly};
pub use linrep::{
    is_minimal, linearize_poly, minimize, rep_similarity, state_space_similarity, symmetrize, LinearRep, Similarity,
    StateSpaceSimilarity,
};
pub use realization::{default_ctx, geometric_series, Classes, Names, RangeTFrame, Realization, RealizationFile};
pub use slice::{
    pencil_in_omega, pencil_in_omega_plus, slice_at, slice_normal_form, slice_reduce, slice_reduce_sized, SliceNormalForm,
    SliceReduction,
};
