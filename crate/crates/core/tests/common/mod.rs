//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use entrolab::entropy::{JointDistribution, Variable};
use entrolab::network::{
    example1_problem, Capacity, CapacityTuple, Edge, NetworkCode, NetworkProblem, Source, SourceModel,
};
use entrolab::rational::ratio;
use entrolab::Rational;
use rand::Rng;

/// Positive pmf with integer weights in `1..=1000`, as exact rationals.
pub fn random_pmf(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=1000)).collect();
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| ratio(x, total)).collect()
}

/// Like [`random_pmf`] but sorted in descending order.
pub fn random_sorted_pmf(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let mut p = random_pmf(rng, n);
    p.sort_by(|a, b| b.cmp(a));
    p
}

pub fn bits_variable(name: &str, width: usize) -> Variable {
    Variable { name: name.into(), alphabet: (0..1usize << width).map(|v| format!("{v:0width$b}")).collect() }
}

/// Uniform over `nbits` independent bits; each variable is a tuple of XORs
/// of them, one bit mask per component (most significant component first).
pub fn xor_sources(nbits: usize, vars: &[(&str, &[u32])]) -> JointDistribution {
    let variables = vars.iter().map(|(n, c)| bits_variable(n, c.len())).collect();
    let outcomes = (0u32..1 << nbits)
        .map(|b| {
            vars.iter()
                .map(|(_, comps)| comps.iter().fold(0usize, |acc, &m| (acc << 1) | ((b & m).count_ones() as usize & 1)))
                .collect()
        })
        .collect();
    JointDistribution::uniform_over(variables, outcomes).unwrap()
}

/// `edges` are `(id, tail, head, infinite)`; `sources` are `(id, at, sinks)`.
pub fn network(
    nodes: &[&str],
    edges: &[(&str, &str, &str, bool)],
    sources: &[(&str, &str, &[&str])],
    dist: JointDistribution,
) -> NetworkProblem {
    NetworkProblem::new(
        nodes.iter().map(|s| s.to_string()).collect(),
        edges
            .iter()
            .map(|&(id, t, h, inf)| Edge {
                id: id.into(),
                tail: t.into(),
                head: h.into(),
                capacity: inf.then_some(Capacity::Infinite),
            })
            .collect(),
        sources
            .iter()
            .map(|&(id, at, sinks)| Source {
                id: id.into(),
                at: at.into(),
                demanded_at: sinks.iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
        SourceModel::Explicit(dist),
    )
    .unwrap()
}

/// A regression instance: a network and a valid explicit code for it.
pub struct Instance {
    pub name: &'static str,
    pub problem: NetworkProblem,
    pub code: NetworkCode,
}

/// The code's capacities restricted to the variable-capacity edges.
pub fn variable_part(p: &NetworkProblem, c: &CapacityTuple) -> CapacityTuple {
    let mut out = CapacityTuple::new();
    for e in p.variable_edges() {
        out = out.with(e, c.values[e].clone());
    }
    out
}

/// Every variable-capacity edge scaled by `k`.
pub fn scaled(c: &CapacityTuple, k: &Rational) -> CapacityTuple {
    let mut out = CapacityTuple::new();
    for (e, v) in &c.values {
        let v = match v {
            Capacity::Finite(r) => Capacity::Finite(r * k),
            Capacity::Infinite => Capacity::Infinite,
        };
        out = out.with(e, v);
    }
    out
}

/// The example1 network plus nine small synthetic networks, each with a valid code.
pub fn regression_suite() -> Vec<Instance> {
    let mut v = Vec::new();

    // Source labels of two-bit variables are indexed 2*first + second.
    v.push(Instance {
        name: "example1",
        problem: example1_problem(),
        code: NetworkCode::new()
            .edge("e1", |o| o[0] >> 1)
            .edge("e2", |o| o[0] & 1)
            .edge("e3", |o| o[1] & 1)
            .edge("e4", |o| o[2])
            .edge("r3", |o| o[0] >> 1)
            .edge("r4", |o| o[0] >> 1)
            .edge("r5", |o| o[0] >> 1),
    });

    v.push(Instance {
        name: "single-edge",
        problem: network(&["s", "t"], &[("e", "s", "t", false)], &[("X", "s", &["t"])], xor_sources(1, &[("X", &[1])])),
        code: NetworkCode::new().edge("e", |o| o[0]),
    });

    v.push(Instance {
        name: "two-hop",
        problem: network(
            &["s", "a", "t"],
            &[("e1", "s", "a", false), ("e2", "a", "t", false)],
            &[("X", "s", &["t"])],
            xor_sources(2, &[("X", &[1, 2])]),
        ),
        code: NetworkCode::new().edge("e1", |o| o[0]).edge("e2", |o| o[0]),
    });

    v.push(Instance {
        name: "butterfly",
        problem: network(
            &["s1", "s2", "m", "n", "t1", "t2"],
            &[
                ("a1", "s1", "t1", false),
                ("a2", "s1", "m", false),
                ("b1", "s2", "m", false),
                ("b2", "s2", "t2", false),
                ("mn", "m", "n", false),
                ("n1", "n", "t1", false),
                ("n2", "n", "t2", false),
            ],
            &[("A", "s1", &["t1", "t2"]), ("B", "s2", &["t1", "t2"])],
            xor_sources(2, &[("A", &[1]), ("B", &[2])]),
        ),
        code: NetworkCode::new()
            .edge("a1", |o| o[0])
            .edge("a2", |o| o[0])
            .edge("b1", |o| o[1])
            .edge("b2", |o| o[1])
            .edge("mn", |o| o[0] ^ o[1])
            .edge("n1", |o| o[0] ^ o[1])
            .edge("n2", |o| o[0] ^ o[1]),
    });

    v.push(Instance {
        name: "identical-pair",
        problem: network(
            &["s", "t1", "t2"],
            &[("e1", "s", "t1", false), ("e2", "s", "t2", false)],
            &[("X", "s", &["t1"]), ("Y", "s", &["t2"])],
            xor_sources(1, &[("X", &[1]), ("Y", &[1])]),
        ),
        code: NetworkCode::new().edge("e1", |o| o[0]).edge("e2", |o| o[1]),
    });

    let perturbed = JointDistribution::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/perturbed_pair.json")).unwrap();
    v.push(Instance {
        name: "separate-encoders",
        problem: network(
            &["s1", "s2", "t"],
            &[("e1", "s1", "t", false), ("e2", "s2", "t", false)],
            &[("X", "s1", &["t"]), ("Y", "s2", &["t"])],
            perturbed,
        ),
        code: NetworkCode::new().edge("e1", |o| o[0]).edge("e2", |o| o[1]),
    });

    let ternary = JointDistribution::single("X", &[ratio(1, 3), ratio(1, 3), ratio(1, 3)]).unwrap();
    v.push(Instance {
        name: "ternary-relay",
        problem: network(
            &["s", "r", "t"],
            &[("e1", "s", "r", false), ("f", "r", "t", true)],
            &[("X", "s", &["t"])],
            ternary,
        ),
        code: NetworkCode::new().edge("e1", |o| o[0]).edge("f", |o| o[0]),
    });

    v.push(Instance {
        name: "parallel-paths",
        problem: network(
            &["s", "a", "b", "t"],
            &[("sa", "s", "a", false), ("at", "a", "t", false), ("sb", "s", "b", false), ("bt", "b", "t", false)],
            &[("X", "s", &["t"])],
            xor_sources(2, &[("X", &[1, 2])]),
        ),
        code: NetworkCode::new()
            .edge("sa", |o| o[0] >> 1)
            .edge("at", |o| o[0] >> 1)
            .edge("sb", |o| o[0] & 1)
            .edge("bt", |o| o[0] & 1),
    });

    v.push(Instance {
        name: "three-sources-two-links",
        problem: network(
            &["s", "t"],
            &[("e1", "s", "t", false), ("e2", "s", "t", false)],
            &[("A", "s", &["t"]), ("B", "s", &["t"]), ("C", "s", &["t"])],
            xor_sources(3, &[("A", &[1]), ("B", &[2]), ("C", &[4])]),
        ),
        code: NetworkCode::new().edge("e1", |o| 2 * o[0] + o[1]).edge("e2", |o| o[2]),
    });

    v.push(Instance {
        name: "shared-part",
        problem: network(
            &["s", "h", "t1", "t2"],
            &[
                ("e0", "s", "h", false),
                ("h1", "h", "t1", true),
                ("h2", "h", "t2", true),
                ("e1", "s", "t1", false),
                ("e2", "s", "t2", false),
            ],
            &[("X", "s", &["t1"]), ("Y", "s", &["t2"])],
            xor_sources(3, &[("X", &[1, 2]), ("Y", &[1, 4])]),
        ),
        code: NetworkCode::new()
            .edge("e0", |o| o[0] >> 1)
            .edge("h1", |o| o[0] >> 1)
            .edge("h2", |o| o[0] >> 1)
            .edge("e1", |o| o[0] & 1)
            .edge("e2", |o| o[1] & 1),
    });
    v
}
