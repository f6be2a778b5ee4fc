//! Network coding problems and outer bounds on their capacity regions.

mod aux_spec;
mod bounds;
mod code;
mod cuts;
mod problem;

pub use aux_spec::{example1_functional_aux, example1_selected_aux, AuxFunction, AuxSpec, AuxVariable, Fixing};
pub use bounds::{
    build_improved_constraints, build_improved_constraints_with, build_lp_constraints, build_lp_constraints_with,
    check_improved_bound, check_improved_bound_with, check_lp_bound, check_lp_bound_with, BoundReport,
    BoundVerdict, BuildOptions, NetworkLp,
};
pub use code::{code_witness, CodeWitness, EdgeFunction, NetworkCode};
pub use cuts::{cutset_check, fd_bound, CutWitness, CutsetVerdict, FdVerdict, FdWitness};
pub use problem::{
    example1_problem, example1_sources, example1_witness, Capacity, CapacityTuple, Edge, NetworkProblem, Source,
    SourceModel,
};
