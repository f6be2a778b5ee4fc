//! Entropy-vector tooling for network coding with correlated sources.
//!
//! The crate is organised around five pieces:
//!
//! * [`entropy`]: ground sets, subset-indexed entropy vectors, the elemental
//!   Shannon inequalities, and a brute-force entropy oracle over explicit
//!   joint distributions.
//! * [`lp`]: an exact rational simplex that returns either a witness or a
//!   Farkas infeasibility certificate, plus an independent certificate checker.
//! * [`network`]: the network coding problem model, the polymatroid LP outer
//!   bound and its auxiliary-variable tightening, and the graphical cut-set and
//!   functional-dependence bounds.
//! * [`aux`]: auxiliary random variable constructions (Gács–Körner common
//!   information, a relaxed common-information search, and linear bases over
//!   finite fields).
//! * [`recovery`]: indicator auxiliaries and recovery of a distribution, up to
//!   relabeling, from entropy values alone.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod aux;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod lp;
pub mod network;
pub mod rational;
pub mod recovery;
pub mod report;

pub use error::{Error, Result};
pub use rational::Rational;
