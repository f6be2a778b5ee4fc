//! Ground sets, entropy vectors, elemental inequalities and the brute-force
//! entropy oracle.

mod binary;
mod distribution;
mod elemental;
mod ground;
mod vector;

pub use binary::{binary_entropy, binary_entropy_inverse};
pub use distribution::{
    entropy_of, entropy_of_probabilities, entropy_vector_of, entropy_with_cache, Entropy, JointDistribution, TermCache,
    Variable,
};
pub use elemental::{elemental_count, elemental_inequalities, is_polymatroid, PolymatroidCheck};
pub use ground::{GroundSet, SubsetIndex, MAX_GROUND};
pub use vector::{eval_conditional, eval_mutual, EntropyVector, LinearFunctional};
