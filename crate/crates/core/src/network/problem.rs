use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::entropy::{entropy_vector_of, EntropyVector, GroundSet, JointDistribution, SubsetIndex, Variable};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Link capacity in bits per source symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(Rational),
    Infinite,
}

impl Capacity {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Capacity::Infinite);
        }
        let r = parse_rational(t)?;
        if r.is_negative() {
            return Err(Error::domain(format!("negative capacity {t}")));
        }
        Ok(Capacity::Finite(r))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Capacity::Finite(r) => Some(r),
            Capacity::Infinite => None,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(r) => f.write_str(&format_rational(r)),
            Capacity::Infinite => f.write_str("inf"),
        }
    }
}

/// A directed link. `capacity` is `None` when it is left to the capacity
/// tuple supplied at query time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: Option<Capacity>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub id: String,
    pub at: String,
    pub demanded_at: Vec<String>,
}

/// How the joint source statistics are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceModel {
    Explicit(JointDistribution),
    /// Entropy vector over the source ids, in source order.
    EntropiesOnly(EntropyVector),
}

/// A network coding problem with correlated sources.
///
/// The LP copy of source `s` is named by the source id and the message on
/// edge `e` by the edge id, so ids must be distinct across both lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkProblem {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    sources: Vec<Source>,
    model: SourceModel,
}

impl NetworkProblem {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>, sources: Vec<Source>, model: SourceModel) -> Result<Self> {
        let node_set: BTreeSet<&str> = nodes.iter().map(String::as_str).collect();
        if node_set.len() != nodes.len() {
            return Err(Error::domain("duplicate node id"));
        }
        let known = |n: &str, what: &str| {
            if node_set.contains(n) {
                Ok(())
            } else {
                Err(Error::domain(format!("{what} refers to unknown node {n:?}")))
            }
        };
        let mut ids = BTreeSet::new();
        for e in &edges {
            known(&e.tail, &format!("edge {}", e.id))?;
            known(&e.head, &format!("edge {}", e.id))?;
            if e.tail == e.head {
                return Err(Error::domain(format!("edge {} is a self-loop", e.id)));
            }
            if !ids.insert(e.id.as_str()) {
                return Err(Error::domain(format!("duplicate id {:?}", e.id)));
            }
        }
        if sources.is_empty() {
            return Err(Error::domain("problem has no sources"));
        }
        for s in &sources {
            known(&s.at, &format!("source {}", s.id))?;
            for d in &s.demanded_at {
                known(d, &format!("demand of {}", s.id))?;
            }
            if !ids.insert(s.id.as_str()) {
                return Err(Error::domain(format!("duplicate id {:?}", s.id)));
            }
        }
        GroundSet::new(ids.iter().copied())?;
        let names: Vec<&str> = sources.iter().map(|s| s.id.as_str()).collect();
        match &model {
            SourceModel::Explicit(d) => {
                let vars: Vec<&str> = d.variables().iter().map(|v| v.name.as_str()).collect();
                if vars != names {
                    return Err(Error::domain(format!(
                        "distribution variables {vars:?} do not match sources {names:?}"
                    )));
                }
            }
            SourceModel::EntropiesOnly(h) => {
                if h.ground().names() != names.as_slice() {
                    return Err(Error::domain("entropy vector ground set does not match sources"));
                }
                let check = crate::entropy::is_polymatroid(h);
                if !check.holds() {
                    return Err(Error::domain("source entropy vector is not a polymatroid"));
                }
            }
        }
        Ok(NetworkProblem { nodes, edges, sources, model })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn model(&self) -> &SourceModel {
        &self.model
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn in_edges<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.head == node)
    }

    pub fn sources_at<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Source> + 'a {
        self.sources.iter().filter(move |s| s.at == node)
    }

    /// Edges whose capacity must come from the query-time tuple, in order.
    pub fn variable_edges(&self) -> Vec<&str> {
        self.edges.iter().filter(|e| e.capacity.is_none()).map(|e| e.id.as_str()).collect()
    }

    /// Source entropy vector over the source ids, in source order.
    pub fn source_entropies(&self) -> EntropyVector {
        match &self.model {
            SourceModel::Explicit(d) => entropy_vector_of(d),
            SourceModel::EntropiesOnly(h) => h.clone(),
        }
    }

    pub fn distribution(&self) -> Option<&JointDistribution> {
        match &self.model {
            SourceModel::Explicit(d) => Some(d),
            SourceModel::EntropiesOnly(_) => None,
        }
    }

    /// Capacity of each edge under `c`; edges without a capacity anywhere
    /// are a domain error.
    pub fn resolve_capacities(&self, c: &CapacityTuple) -> Result<Vec<Capacity>> {
        for id in c.values.keys() {
            if self.edge(id).is_none() {
                return Err(Error::domain(format!("capacity given for unknown edge {id:?}")));
            }
        }
        self.edges
            .iter()
            .map(|e| {
                c.values
                    .get(&e.id)
                    .or(e.capacity.as_ref())
                    .cloned()
                    .ok_or_else(|| Error::domain(format!("no capacity for edge {}", e.id)))
            })
            .collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Json { context: "problem".into(), source: e })?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let file: ProblemFile = serde_json::from_value(v.clone())
            .map_err(|e| Error::Json { context: "problem".into(), source: e })?;
        let nodes = file.nodes.iter().map(node_id).collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::new();
        for (k, e) in file.edges.iter().enumerate() {
            let capacity = match &e.capacity {
                None => None,
                Some(c) => Some(
                    Capacity::parse(&value_text(c, &format!("edges[{k}].capacity"))?)
                        .map_err(|err| Error::parse(format!("edges[{k}].capacity"), err.to_string()))?,
                ),
            };
            edges.push(Edge { id: e.id.clone(), tail: node_id(&e.tail)?, head: node_id(&e.head)?, capacity });
        }
        let sources = file
            .sources
            .iter()
            .map(|s| {
                Ok(Source {
                    id: s.id.clone(),
                    at: node_id(&s.at)?,
                    demanded_at: s.demanded_at.iter().map(node_id).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let model = match (file.distribution, file.entropies) {
            (Some(d), None) => SourceModel::Explicit(JointDistribution::from_json_value(d)?),
            (None, Some(es)) => {
                let g = GroundSet::new(sources.iter().map(|s| s.id.clone()))?;
                let mut values: BTreeMap<SubsetIndex, Rational> = BTreeMap::new();
                for (k, e) in es.iter().enumerate() {
                    let loc = format!("entropies[{k}]");
                    let s = g.subset(&e.subset).map_err(|err| Error::parse(&loc, err.to_string()))?;
                    let h = parse_rational(&value_text(&e.h, &loc)?).map_err(|err| Error::parse(&loc, err.to_string()))?;
                    values.insert(s, h);
                }
                let mut vec = Vec::with_capacity(g.coordinates());
                for c in 0..g.coordinates() {
                    let s = SubsetIndex::from_coordinate(c);
                    let h = values
                        .get(&s)
                        .cloned()
                        .ok_or_else(|| Error::domain(format!("entropies missing subset {{{}}}", g.display(s))))?;
                    vec.push(h);
                }
                SourceModel::EntropiesOnly(EntropyVector::new(g, vec, true)?)
            }
            _ => return Err(Error::parse("problem", "exactly one of \"distribution\" or \"entropies\" is required")),
        };
        Self::new(nodes, edges, sources, model)
    }

    pub fn to_json_value(&self) -> Value {
        let node = |n: &str| n.parse::<u64>().map(Value::from).unwrap_or_else(|_| Value::from(n));
        let mut v = json!({
            "nodes": self.nodes.iter().map(|n| node(n)).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| {
                let mut o = json!({"id": e.id, "tail": node(&e.tail), "head": node(&e.head)});
                if let Some(c) = &e.capacity {
                    o["capacity"] = Value::from(c.to_string());
                }
                o
            }).collect::<Vec<_>>(),
            "sources": self.sources.iter().map(|s| json!({
                "id": s.id,
                "at": node(&s.at),
                "demanded_at": s.demanded_at.iter().map(|d| node(d)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        match &self.model {
            SourceModel::Explicit(d) => v["distribution"] = d.to_json_value(),
            SourceModel::EntropiesOnly(h) => {
                let g = h.ground();
                v["entropies"] = Value::from(
                    (0..g.coordinates())
                        .map(|c| {
                            let s = SubsetIndex::from_coordinate(c);
                            json!({"subset": g.names_of(s), "h": format_rational(h.get(s))})
                        })
                        .collect::<Vec<_>>(),
                );
            }
        }
        v
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| Error::Io { path: path.display().to_string(), source: e })
    }
}

#[derive(Deserialize, Serialize)]
struct ProblemFile {
    nodes: Vec<Value>,
    edges: Vec<EdgeEntry>,
    sources: Vec<SourceEntry>,
    #[serde(default)]
    distribution: Option<Value>,
    #[serde(default)]
    entropies: Option<Vec<EntropyEntry>>,
}

#[derive(Deserialize, Serialize)]
struct EdgeEntry {
    id: String,
    tail: Value,
    head: Value,
    #[serde(default)]
    capacity: Option<Value>,
}

#[derive(Deserialize, Serialize)]
struct SourceEntry {
    id: String,
    at: Value,
    #[serde(default)]
    demanded_at: Vec<Value>,
}

#[derive(Deserialize, Serialize)]
struct EntropyEntry {
    subset: Vec<String>,
    h: Value,
}

fn node_id(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::parse("node", format!("expected node id, got {other}"))),
    }
}

fn value_text(v: &Value, loc: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::parse(loc, format!("expected number or string, got {other}"))),
    }
}

/// Capacities assigned at query time, keyed by edge id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CapacityTuple {
    pub values: BTreeMap<String, Capacity>,
}

impl CapacityTuple {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, edge: &str, c: Capacity) -> Self {
        self.values.insert(edge.to_string(), c);
        self
    }

    /// Same finite capacity on every listed edge.
    pub fn uniform<S: AsRef<str>>(edges: impl IntoIterator<Item = S>, c: Rational) -> Self {
        CapacityTuple {
            values: edges.into_iter().map(|e| (e.as_ref().to_string(), Capacity::Finite(c.clone()))).collect(),
        }
    }

    /// Parses `e1=1,e2=1/2,e3=inf`, or a bare list `1,1,1,1` assigned to the
    /// problem's variable-capacity edges in order.
    pub fn parse(problem: &NetworkProblem, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let mut values = BTreeMap::new();
        if parts.iter().all(|p| !p.contains('=')) {
            let vars = problem.variable_edges();
            if parts.len() != vars.len() {
                return Err(Error::parse(
                    "capacities",
                    format!("expected {} values for edges {:?}, got {}", vars.len(), vars, parts.len()),
                ));
            }
            for (e, p) in vars.iter().zip(&parts) {
                values.insert(e.to_string(), Capacity::parse(p).map_err(|err| Error::parse("capacities", err.to_string()))?);
            }
        } else {
            for p in parts {
                let (e, c) = p
                    .split_once('=')
                    .ok_or_else(|| Error::parse("capacities", format!("expected edge=value, got {p:?}")))?;
                if problem.edge(e.trim()).is_none() {
                    return Err(Error::parse("capacities", format!("unknown edge {:?}", e.trim())));
                }
                values.insert(
                    e.trim().to_string(),
                    Capacity::parse(c).map_err(|err| Error::parse("capacities", err.to_string()))?,
                );
            }
        }
        Ok(CapacityTuple { values })
    }

    /// Componentwise `self <= other` over the union of keys, treating a
    /// missing key as incomparable.
    pub fn le(&self, other: &CapacityTuple) -> bool {
        self.values.iter().all(|(k, a)| match (a, other.values.get(k)) {
            (_, Some(Capacity::Infinite)) => true,
            (Capacity::Finite(x), Some(Capacity::Finite(y))) => x <= y,
            _ => false,
        })
    }
}

impl fmt::Display for CapacityTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(","))
    }
}

fn bits_variable(name: &str, width: usize) -> Variable {
    Variable {
        name: name.into(),
        alphabet: (0..1usize << width).map(|v| format!("{v:0width$b}")).collect(),
    }
}

/// Uniform distribution over three independent bits `b0 b1 b2`, with the
/// listed variables each a tuple of XORs of them: every variable is given as
/// a list of components, each component a bit mask over `(b0, b1, b2)`.
pub(crate) fn xor_distribution(vars: &[(&str, &[u8])]) -> JointDistribution {
    let variables = vars.iter().map(|(n, comps)| bits_variable(n, comps.len())).collect();
    let outcomes = (0u8..8)
        .map(|b| {
            vars.iter()
                .map(|(_, comps)| {
                    comps.iter().fold(0usize, |acc, &m| (acc << 1) | ((b & m).count_ones() as usize & 1))
                })
                .collect()
        })
        .collect();
    JointDistribution::uniform_over(variables, outcomes).expect("valid xor distribution")
}

/// The three correlated sources of the flagship example:
/// `Y1=(b0,b1)`, `Y2=(b0,b2)`, `Y3=(b1,b2)` over independent uniform bits.
pub fn example1_sources() -> JointDistribution {
    xor_distribution(&[("Y1", &[0b001, 0b010]), ("Y2", &[0b001, 0b100]), ("Y3", &[0b010, 0b100])])
}

/// The flagship network: node 1 holds all three sources; bottleneck edges
/// `e1..e4` leave node 1 for nodes 2..5; node 2 relays `e1` to each sink
/// over infinite-capacity edges `r3, r4, r5`. Sink 3 wants `Y1`, sink 4
/// wants `Y2`, sink 5 wants `Y3`. Capacities of `e1..e4` are left variable.
pub fn example1_problem() -> NetworkProblem {
    let nodes = (1..=5).map(|i| i.to_string()).collect();
    let mut edges: Vec<Edge> = (1..=4)
        .map(|i| Edge { id: format!("e{i}"), tail: "1".into(), head: (i + 1).to_string(), capacity: None })
        .collect();
    for sink in 3..=5 {
        edges.push(Edge {
            id: format!("r{sink}"),
            tail: "2".into(),
            head: sink.to_string(),
            capacity: Some(Capacity::Infinite),
        });
    }
    let sources = (1..=3)
        .map(|i| Source { id: format!("Y{i}"), at: "1".into(), demanded_at: vec![(i + 2).to_string()] })
        .collect();
    NetworkProblem::new(nodes, edges, sources, SourceModel::Explicit(example1_sources())).expect("valid example")
}

/// The achievability-style assignment for the flagship network at unit
/// capacities: the entropy vector of `Y1=(b0,b1)`, `Y2=(b0,b2)`,
/// `Y3=(b0,b1⊕b2)`, `e1=b0`, `e2=b1`, `e3=b2`, `e4=b1⊕b2` and relays
/// forwarding `b0`, over the ground set `Y1 Y2 Y3 e1 e2 e3 e4 r3 r4 r5`.
pub fn example1_witness() -> EntropyVector {
    let d = xor_distribution(&[
        ("Y1", &[0b001, 0b010]),
        ("Y2", &[0b001, 0b100]),
        ("Y3", &[0b001, 0b110]),
        ("e1", &[0b001]),
        ("e2", &[0b010]),
        ("e3", &[0b100]),
        ("e4", &[0b110]),
        ("r3", &[0b001]),
        ("r4", &[0b001]),
        ("r5", &[0b001]),
    ]);
    entropy_vector_of(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn example_source_entropies() {
        let h = example1_problem().source_entropies();
        let expect: Vec<Rational> = [2, 2, 3, 2, 3, 3, 3].iter().map(|&v| int(v)).collect();
        assert_eq!(h.values(), expect.as_slice());
        assert!(h.is_exact());
    }

    #[test]
    fn json_round_trip() {
        let p = example1_problem();
        let back = NetworkProblem::from_json_value(&p.to_json_value()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_sum() {
        let mut v = example1_problem().to_json_value();
        v["distribution"]["pmf"][0]["p"] = Value::from("1/4");
        assert!(NetworkProblem::from_json_value(&v).is_err());
    }

    #[test]
    fn capacities_parse() {
        let p = example1_problem();
        let c = CapacityTuple::parse(&p, "1,1,1,1/2").unwrap();
        assert_eq!(c.values["e4"], Capacity::Finite(crate::rational::ratio(1, 2)));
        let c2 = CapacityTuple::parse(&p, "e1=2, e2=inf").unwrap();
        assert_eq!(c2.values["e2"], Capacity::Infinite);
        assert!(CapacityTuple::parse(&p, "1,1").is_err());
        assert!(CapacityTuple::parse(&p, "e9=1").is_err());
        assert!(p.resolve_capacities(&c2).is_err());
        assert!(p.resolve_capacities(&c).is_ok());
    }

    #[test]
    fn entropies_only_model() {
        let p = example1_problem();
        let mut v = p.to_json_value();
        v.as_object_mut().unwrap().remove("distribution");
        let h = p.source_entropies();
        v["entropies"] = Value::from(
            (0..7)
                .map(|c| {
                    let s = SubsetIndex::from_coordinate(c);
                    json!({"subset": h.ground().names_of(s), "h": format_rational(h.get(s))})
                })
                .collect::<Vec<_>>(),
        );
        let q = NetworkProblem::from_json_value(&v).unwrap();
        assert_eq!(q.source_entropies(), h);
        assert_eq!(NetworkProblem::from_json_value(&q.to_json_value()).unwrap(), q);
    }
}
