//! Exact linear feasibility and optimisation over entropy coordinates.
//!
//! Every coordinate `h(α)` of a [`LinearSystem`] is implicitly nonnegative.
//! Results carry either a witness [`EntropyVector`] or a Farkas certificate,
//! and [`verify_certificate`] re-checks both with plain exact arithmetic.

mod certificate;
pub(crate) mod dump;
mod float;
mod reduce;
mod simplex;
mod solve;
mod system;

pub use certificate::{verify_certificate, verify_minimum, FarkasCertificate};
pub use dump::{parse_lp, parse_row, render_lp};
pub use solve::{minimize, minimize_with, solve_feasibility, solve_feasibility_with, FeasibilityResult, MinimizeResult, SolverOptions, SolverStats};
pub use system::{LinearConstraint, LinearSystem, Relation};
