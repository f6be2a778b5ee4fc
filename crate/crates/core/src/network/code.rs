//! Entropy vectors induced by explicit network codes.

use std::collections::BTreeMap;

use crate::entropy::{entropy_vector_of, EntropyVector, JointDistribution, SubsetIndex, Variable};
use crate::error::{Error, Result};

use super::problem::{Capacity, CapacityTuple, NetworkProblem};

/// Maps the joint source outcome (alphabet indices, in source order) to the
/// symbol sent on an edge.
pub type EdgeFunction = Box<dyn Fn(&[usize]) -> usize>;

/// A code given as one function of the source outcome per edge.
pub struct NetworkCode {
    functions: BTreeMap<String, EdgeFunction>,
}

impl NetworkCode {
    pub fn new() -> Self {
        NetworkCode { functions: BTreeMap::new() }
    }

    pub fn edge(mut self, id: &str, f: impl Fn(&[usize]) -> usize + 'static) -> Self {
        self.functions.insert(id.to_string(), Box::new(f));
        self
    }
}

impl Default for NetworkCode {
    fn default() -> Self {
        Self::new()
    }
}

/// The entropy vector of a code and the capacities `C_e = H(U_e)` it uses.
#[derive(Clone, Debug)]
pub struct CodeWitness {
    /// Over the sources followed by the edges, in problem order.
    pub entropies: EntropyVector,
    pub capacities: CapacityTuple,
}

/// Runs `code` on every source outcome and checks that it is a valid code:
/// each edge is a function of the inputs at its tail and each sink can
/// decode what it demands.
pub fn code_witness(p: &NetworkProblem, code: &NetworkCode) -> Result<CodeWitness> {
    let dist = p
        .distribution()
        .ok_or_else(|| Error::Precondition("an explicit code needs an explicit source distribution".into()))?;
    let mut joint: JointDistribution = dist.clone();
    for e in p.edges() {
        let f = code
            .functions
            .get(&e.id)
            .ok_or_else(|| Error::domain(format!("code has no function for edge {}", e.id)))?;
        let ns = p.sources().len();
        let size = dist.support().iter().map(|(o, _)| f(&o[..ns])).max().unwrap_or(0) + 1;
        let var = Variable { name: e.id.clone(), alphabet: (0..size).map(|v| v.to_string()).collect() };
        joint = joint.with_derived(var, |o| Ok(f(&o[..ns])))?;
    }
    let h = entropy_vector_of(&joint);
    let g = h.ground().clone();
    let set = |names: Vec<&str>| g.subset(names);
    let cond_zero = |a: SubsetIndex, b: SubsetIndex| -> bool {
        let ab = h.get(a | b);
        if b.is_empty() { ab == &crate::rational::int(0) } else { ab == h.get(b) }
    };
    for e in p.edges() {
        let inputs = tail_inputs(p, &e.tail);
        if !cond_zero(set(vec![e.id.as_str()])?, set(inputs)?) {
            return Err(Error::domain(format!("edge {} is not a function of the inputs at node {}", e.id, e.tail)));
        }
    }
    for s in p.sources() {
        for sink in &s.demanded_at {
            if !cond_zero(set(vec![s.id.as_str()])?, set(tail_inputs(p, sink))?) {
                return Err(Error::domain(format!("node {sink} cannot decode {}", s.id)));
            }
        }
    }
    let mut capacities = CapacityTuple::new();
    for e in p.edges() {
        capacities = capacities.with(&e.id, Capacity::Finite(h.get_named([e.id.as_str()])?.clone()));
    }
    Ok(CodeWitness { entropies: h, capacities })
}

/// Variables available at a node: its sources and its incoming edges.
fn tail_inputs<'a>(p: &'a NetworkProblem, node: &'a str) -> Vec<&'a str> {
    p.sources_at(node).map(|s| s.id.as_str()).chain(p.in_edges(node).map(|e| e.id.as_str())).collect()
}
