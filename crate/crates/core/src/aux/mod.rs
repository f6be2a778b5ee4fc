//! Auxiliary random variables: common information, relaxed common parts and
//! linear bases over finite fields.

mod delta;
mod field;
mod gk;
mod linear;
mod pairwise;

pub use delta::{delta_star_search, DeltaParams, DeltaSearchResult, MAX_DEFAULT_K};
pub use field::Field;
pub use gk::{gk_common_information, GkDecomposition};
pub use linear::{linear_basis_aux, LinearAux, LinearSource, LinearSources, SubspaceModel};
pub use pairwise::{pairwise_aux_for_network, PairAux, PairDetail, PairwiseAux, PairwiseMode};
