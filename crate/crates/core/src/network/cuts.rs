//! Combinatorial outer bounds: cut-set and functional-dependence.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::entropy::{EntropyVector, SubsetIndex};
use crate::error::{Error, Result};
use crate::rational::Rational;

use super::problem::{Capacity, CapacityTuple, NetworkProblem};

const MAX_CUT_NODES: usize = 20;
const MAX_FD_EDGES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutsetVerdict {
    PassesCutset,
    FailsCutset(CutWitness),
}

/// A violated cut: the sources in `sources` are on the `side` nodes, a
/// sink outside demands them, and `H(Y_W | Y_rest) = need > capacity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutWitness {
    pub sources: Vec<String>,
    pub side: Vec<String>,
    pub need: Rational,
    pub capacity: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FdVerdict {
    /// `warnings` lists source sets no finite edge set can resolve.
    PassesFd { warnings: Vec<String> },
    FailsFd(FdWitness),
}

/// A violated functional-dependence bound: `edges` together with the
/// sources outside `sources` determine every demanded copy of `sources`,
/// yet their capacities sum to less than `need`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FdWitness {
    pub sources: Vec<String>,
    pub edges: Vec<String>,
    pub need: Rational,
    pub capacity: Rational,
}

/// `H(Y_W | Y_{S∖W})` for a set of source positions.
fn conditional_need(h: &EntropyVector, w: SubsetIndex) -> Rational {
    let full = h.ground().full();
    let rest = full - w;
    let rest_value = if rest.is_empty() { Rational::zero() } else { h.get(rest).clone() };
    h.get(full) - rest_value
}

/// Checks the classical cut-set bound. Only valid when every sink demands
/// every source; otherwise a precondition error is returned.
pub fn cutset_check(p: &NetworkProblem, c: &CapacityTuple) -> Result<CutsetVerdict> {
    let caps = p.resolve_capacities(c)?;
    let sinks: BTreeSet<&str> = p.sources().iter().flat_map(|s| s.demanded_at.iter().map(String::as_str)).collect();
    for s in p.sources() {
        if sinks.iter().any(|t| !s.demanded_at.iter().any(|d| d == t)) {
            return Err(Error::Precondition(format!(
                "the cut-set bound needs every sink to demand every source; {} is not demanded everywhere",
                s.id
            )));
        }
    }
    let n = p.nodes().len();
    if n > MAX_CUT_NODES {
        return Err(Error::Precondition(format!("cut enumeration is limited to {MAX_CUT_NODES} nodes")));
    }
    let node_pos = |name: &str| p.nodes().iter().position(|v| v == name).expect("validated node");
    let h = p.source_entropies();
    let ns = p.sources().len();
    for wbits in 1u32..(1 << ns) {
        let w = SubsetIndex(wbits);
        let need = conditional_need(&h, w);
        if need.is_zero() {
            continue;
        }
        let required: u32 = w.members().map(|i| 1 << node_pos(&p.sources()[i].at)).fold(0, |a, b| a | b);
        for t in 0u32..(1 << n) {
            if t & required != required || !sinks.iter().any(|s| t & (1 << node_pos(s)) == 0) {
                continue;
            }
            let mut cap = Some(Rational::zero());
            for (e, ce) in p.edges().iter().zip(&caps) {
                if t & (1 << node_pos(&e.tail)) != 0 && t & (1 << node_pos(&e.head)) == 0 {
                    cap = match (cap, ce) {
                        (Some(acc), Capacity::Finite(v)) => Some(acc + v),
                        _ => None,
                    };
                }
            }
            if let Some(cap) = cap {
                if need > cap {
                    return Ok(CutsetVerdict::FailsCutset(CutWitness {
                        sources: w.members().map(|i| p.sources()[i].id.clone()).collect(),
                        side: (0..n).filter(|&i| t & (1 << i) != 0).map(|i| p.nodes()[i].clone()).collect(),
                        need,
                        capacity: cap,
                    }));
                }
            }
        }
    }
    Ok(CutsetVerdict::PassesCutset)
}

/// Whether the given edges and the sources outside `w` determine every
/// source in `w`, closing under encoding and decoding.
fn resolves(p: &NetworkProblem, given_edges: u32, w: SubsetIndex) -> bool {
    let edges = p.edges();
    let node_of = |n: &str| p.nodes().iter().position(|v| v == n).expect("validated node");
    let mut known_edge = given_edges;
    let mut known_src: u32 = !w.bits() & ((1u32 << p.sources().len()) - 1);
    let node_ready = |node: usize, ke: u32, ks: u32| {
        edges.iter().enumerate().all(|(i, e)| node_of(&e.head) != node || ke & (1 << i) != 0)
            && p.sources().iter().enumerate().all(|(i, s)| node_of(&s.at) != node || ks & (1 << i) != 0)
    };
    loop {
        let (ke, ks) = (known_edge, known_src);
        for (i, e) in edges.iter().enumerate() {
            if ke & (1 << i) == 0 && node_ready(node_of(&e.tail), ke, ks) {
                known_edge |= 1 << i;
            }
        }
        for (i, s) in p.sources().iter().enumerate() {
            if ks & (1 << i) == 0 && s.demanded_at.iter().any(|d| node_ready(node_of(d), ke, ks)) {
                known_src |= 1 << i;
            }
        }
        if (known_edge, known_src) == (ke, ks) {
            return w.bits() & !known_src == 0;
        }
    }
}

/// Functional-dependence bound: for every set `W` of demanded sources, the
/// cheapest finite-capacity edge set that, with the other sources, determines
/// all of `Y_W` must carry at least `H(Y_W | Y_{S∖W})`.
pub fn fd_bound(p: &NetworkProblem, c: &CapacityTuple) -> Result<FdVerdict> {
    let caps = p.resolve_capacities(c)?;
    if p.edges().len() > 32 {
        return Err(Error::Precondition("the functional-dependence bound handles at most 32 edges".into()));
    }
    let finite: Vec<(usize, Rational)> =
        caps.iter().enumerate().filter_map(|(i, c)| c.finite().map(|v| (i, v.clone()))).collect();
    if finite.len() > MAX_FD_EDGES {
        return Err(Error::Precondition(format!("at most {MAX_FD_EDGES} finite-capacity edges are supported")));
    }
    let h = p.source_entropies();
    let demanded: u32 =
        p.sources().iter().enumerate().filter(|(_, s)| !s.demanded_at.is_empty()).map(|(i, _)| 1 << i).sum();
    let mut warnings = Vec::new();
    for wbits in 1u32..(1 << p.sources().len()) {
        if wbits & !demanded != 0 {
            continue;
        }
        let w = SubsetIndex(wbits);
        let need = conditional_need(&h, w);
        let names: Vec<String> = w.members().map(|i| p.sources()[i].id.clone()).collect();
        if need.is_zero() {
            continue;
        }
        let mut best: Option<(Rational, u32)> = None;
        for pick in 0u32..(1 << finite.len()) {
            let mut mask = 0u32;
            let mut cost = Rational::zero();
            for (j, (i, v)) in finite.iter().enumerate() {
                if pick & (1 << j) != 0 {
                    mask |= 1 << i;
                    cost += v;
                }
            }
            if best.as_ref().is_some_and(|(b, _)| &cost >= b) {
                continue;
            }
            if resolves(p, mask, w) {
                best = Some((cost, mask));
            }
        }
        match best {
            None => warnings.push(format!("no finite edge set determines {{{}}}; bound vacuous", names.join(","))),
            Some((cost, mask)) if need > cost => {
                return Ok(FdVerdict::FailsFd(FdWitness {
                    sources: names,
                    edges: (0..p.edges().len()).filter(|i| mask & (1 << i) != 0).map(|i| p.edges()[i].id.clone()).collect(),
                    need,
                    capacity: cost,
                }));
            }
            Some(_) => {}
        }
    }
    Ok(FdVerdict::PassesFd { warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{JointDistribution, Variable};
    use crate::network::problem::{example1_problem, Edge, Source, SourceModel};
    use crate::rational::{int, ratio};

    fn single_edge() -> NetworkProblem {
        let d = JointDistribution::uniform_over(
            vec![Variable { name: "X".into(), alphabet: vec!["0".into(), "1".into()] }],
            vec![vec![0], vec![1]],
        )
        .unwrap();
        NetworkProblem::new(
            vec!["s".into(), "t".into()],
            vec![Edge { id: "e".into(), tail: "s".into(), head: "t".into(), capacity: None }],
            vec![Source { id: "X".into(), at: "s".into(), demanded_at: vec!["t".into()] }],
            SourceModel::Explicit(d),
        )
        .unwrap()
    }

    fn all_sinks_demand_all() -> NetworkProblem {
        let mut v = example1_problem().to_json_value();
        for s in v["sources"].as_array_mut().unwrap() {
            s["demanded_at"] = serde_json::json!(["3", "4", "5"]);
        }
        NetworkProblem::from_json_value(&v).unwrap()
    }

    #[test]
    fn single_edge_cut() {
        let p = single_edge();
        let half = CapacityTuple::uniform(["e"], ratio(1, 2));
        let CutsetVerdict::FailsCutset(w) = cutset_check(&p, &half).unwrap() else { panic!() };
        assert_eq!((w.need, w.capacity), (int(1), ratio(1, 2)));
        assert_eq!(cutset_check(&p, &CapacityTuple::uniform(["e"], int(1))).unwrap(), CutsetVerdict::PassesCutset);
        let FdVerdict::FailsFd(w) = fd_bound(&p, &half).unwrap() else { panic!() };
        assert_eq!(w.edges, vec!["e".to_string()]);
    }

    #[test]
    fn example_variant_cutset() {
        let p = all_sinks_demand_all();
        // sink 5 hears only e4 and the relay of e1: two bits for three
        let unit = CapacityTuple::uniform(p.variable_edges(), int(1));
        let CutsetVerdict::FailsCutset(w) = cutset_check(&p, &unit).unwrap() else { panic!() };
        assert_eq!((w.need, w.capacity), (int(3), int(2)));
        let c = unit.with("e1", Capacity::Finite(int(2)));
        assert_eq!(cutset_check(&p, &c).unwrap(), CutsetVerdict::PassesCutset);
    }

    #[test]
    fn cutset_refuses_partial_demands() {
        let p = example1_problem();
        let c = CapacityTuple::uniform(p.variable_edges(), int(1));
        assert!(matches!(cutset_check(&p, &c), Err(Error::Precondition(_))));
    }

    #[test]
    fn example_fd() {
        let p = example1_problem();
        let unit = CapacityTuple::uniform(p.variable_edges(), int(1));
        assert_eq!(fd_bound(&p, &unit).unwrap(), FdVerdict::PassesFd { warnings: vec![] });
        // W = {Y1,Y2,Y3} needs 3 bits but {e1..e4} is the only resolving set
        let thin = CapacityTuple::uniform(p.variable_edges(), ratio(2, 3));
        let FdVerdict::FailsFd(w) = fd_bound(&p, &thin).unwrap() else { panic!() };
        assert_eq!(w.need, int(3));
        assert_eq!(w.edges.len(), 4);
        let inf = CapacityTuple::new()
            .with("e1", Capacity::Infinite)
            .with("e2", Capacity::Infinite)
            .with("e3", Capacity::Infinite)
            .with("e4", Capacity::Infinite);
        assert!(matches!(fd_bound(&p, &inf).unwrap(), FdVerdict::PassesFd { .. }));
    }
}
