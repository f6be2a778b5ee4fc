//! Indicator auxiliaries of a finite variable and recovery of its
//! distribution, up to relabeling, from entropies alone.

mod family;
mod multivar;
mod properties;
mod recover;

pub use family::{EntropyOracle, FamilyOracle, IndicatorFamily, RecordingOracle, TableOracle, MAX_ATOMS};
pub use multivar::{
    align_axes, axis_marginals, build_multivar_indicators, marginal_entropy, recover_multivar, AxisAlignment,
    MultivarFamily, MultivarOracle, MultivarRecovery, MAX_MULTIVAR_ATOMS,
};
pub use properties::{verify_family, verify_properties, PropertyReport, Violation, MAX_VERIFY_ATOMS};
pub use recover::{check_permutation_equivalence, recover_distribution, total, RecoveredDistribution, TOLERANCE};
