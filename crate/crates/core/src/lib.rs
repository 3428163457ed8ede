//! Rank functionals of order-3 tensors over exact fields.
//!
//! The library computes upper bounds on weighted slice ranks from coordinate
//! slice covers, certifies tightness of supports, and works with the support
//! polytope of a tensor: support functionals `ζ_θ`, asymptotic weighted
//! slice ranks `G_ξ` of tight tensors (by two independent routes),
//! min-entropy and field variants, and finite-power bounds from weight
//! decompositions. [`dual_pair`] has the conjugate transforms that connect
//! functions on `Θ` with functions on `Ξ`. [`rep_dims`] has the
//! symmetric-group dimension formulas used in the asymptotic arguments.
//!
//! ```
//! use tensor_spectra::field::Field;
//! use tensor_spectra::params::Weighting;
//! use tensor_spectra::polytope::{awsr_primal, uniform_marginals_feasible};
//! use tensor_spectra::slice_cover::weighted_cover_value;
//! use tensor_spectra::tensor::build_matmul;
//!
//! let mm = build_matmul(2, 2, 2, Field::Rational).unwrap().support();
//! let one = Weighting::ones();
//! assert_eq!(weighted_cover_value(&mm, &one).unwrap().value, 4.0);
//! assert!((awsr_primal(&mm, &one, 1e-9).unwrap().value - 4.0).abs() < 1e-6);
//! assert!(uniform_marginals_feasible(&mm).is_feasible());
//! ```
//!
//! Indices are 1-based throughout and entropies are in bits. The guide in
//! `book/` walks through each module; its code blocks run as doctests of
//! this crate.

pub mod dual_pair;
pub mod error;
pub mod field;
pub mod linalg;
pub(crate) mod lp;
pub mod params;
pub mod pencil;
pub mod polytope;
pub mod rep_dims;
pub(crate) mod search;
pub mod slice_cover;
pub mod tensor;
pub mod tightness;
pub mod weights;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use params::{ThetaWeights, Weighting};
pub use tensor::{Index, SparseTensor, Support};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    mod tensors {}
    #[doc = include_str!("../../../book/src/slice_covers.md")]
    mod slice_covers {}
    #[doc = include_str!("../../../book/src/tightness.md")]
    mod tightness {}
    #[doc = include_str!("../../../book/src/support_polytope.md")]
    mod support_polytope {}
    #[doc = include_str!("../../../book/src/weight_decomposition.md")]
    mod weight_decomposition {}
    #[doc = include_str!("../../../book/src/dual_pairs.md")]
    mod dual_pairs {}
    #[doc = include_str!("../../../book/src/representations.md")]
    mod representations {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
