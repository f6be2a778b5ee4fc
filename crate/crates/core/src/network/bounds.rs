use std::collections::{BTreeMap, BTreeSet};

use crate::entropy::{
    elemental_inequalities, entropy_vector_of, EntropyVector, GroundSet, LinearFunctional, SubsetIndex,
};
use crate::error::{Error, Result};
use crate::lp::{
    solve_feasibility_with, FarkasCertificate, FeasibilityResult, LinearConstraint, LinearSystem, SolverOptions,
    SolverStats,
};
use crate::rational::Rational;

use super::aux_spec::{AuxSpec, Fixing};
use super::problem::{Capacity, CapacityTuple, NetworkProblem, SourceModel};

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Replace each infinite-capacity edge by the inputs at its tail. The
    /// resulting system is feasible exactly when the full one is, and has
    /// fewer variables.
    pub collapse_infinite: bool,
    pub solver: SolverOptions,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { collapse_infinite: true, solver: SolverOptions::default() }
    }
}

/// A network LP together with the bookkeeping needed to lift a witness of a
/// collapsed system back to every edge variable.
#[derive(Clone, Debug)]
pub struct NetworkLp {
    pub system: LinearSystem,
    full_ground: GroundSet,
    /// collapsed edge id -> the variables it stands for
    collapsed: BTreeMap<String, Vec<String>>,
}

impl NetworkLp {
    pub fn full_ground(&self) -> &GroundSet {
        &self.full_ground
    }

    pub fn collapsed_edges(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.collapsed.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Lifts a vector over the solved ground set to the full ground set by
    /// reading each collapsed edge as the tuple it replaced.
    pub fn expand_witness(&self, h: &EntropyVector) -> Result<EntropyVector> {
        let g = self.system.ground();
        if h.ground() != g {
            return Err(Error::domain("witness is over a different ground set"));
        }
        let image: Vec<SubsetIndex> = self
            .full_ground
            .names()
            .iter()
            .map(|n| match self.collapsed.get(n) {
                Some(vars) => g.subset(vars).expect("collapsed variables survive"),
                None => g.subset([n]).expect("variable survives"),
            })
            .collect();
        EntropyVector::from_fn(self.full_ground.clone(), h.is_exact(), |s| {
            let t = s.members().fold(SubsetIndex::EMPTY, |acc, i| acc | image[i]);
            h.get(t).clone()
        })
    }
}

/// Expansion of each infinite edge into the variables it stands for.
/// Infinite edges on a cycle of infinite edges are kept as variables.
fn collapse_map(p: &NetworkProblem, caps: &[Capacity]) -> BTreeMap<String, Vec<String>> {
    let infinite: BTreeSet<&str> = p
        .edges()
        .iter()
        .zip(caps)
        .filter(|(_, c)| matches!(c, Capacity::Infinite))
        .map(|(e, _)| e.id.as_str())
        .collect();
    // Walks upstream through infinite edges not in `stop`; returns the
    // leaves reached and whether `e` itself was reached.
    let walk = |e: &str, stop: &BTreeSet<&str>| {
        let mut seen = BTreeSet::new();
        let mut stack = vec![e];
        let mut leaves = BTreeSet::new();
        let mut cyclic = false;
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            let tail = &p.edge(x).expect("edge").tail;
            leaves.extend(p.sources_at(tail).map(|s| s.id.clone()));
            for inp in p.in_edges(tail) {
                let id = inp.id.as_str();
                if id == e {
                    cyclic = true;
                } else if infinite.contains(id) && !stop.contains(id) {
                    stack.push(id);
                } else {
                    leaves.insert(inp.id.clone());
                }
            }
        }
        (leaves, cyclic)
    };
    let none = BTreeSet::new();
    let kept: BTreeSet<&str> = infinite.iter().copied().filter(|e| walk(e, &none).1).collect();
    infinite
        .iter()
        .filter(|e| !kept.contains(*e))
        .map(|&e| (e.to_string(), walk(e, &kept).0.into_iter().collect()))
        .collect()
}

struct Builder<'a> {
    p: &'a NetworkProblem,
    ground: GroundSet,
    collapsed: BTreeMap<String, Vec<String>>,
    rows: Vec<LinearConstraint>,
}

impl Builder<'_> {
    /// Index set for `names` after substituting collapsed edges.
    fn set(&self, names: impl IntoIterator<Item = String>) -> SubsetIndex {
        let mut s = SubsetIndex::EMPTY;
        for n in names {
            match self.collapsed.get(&n) {
                Some(vars) => s = s | self.ground.subset(vars).expect("known variables"),
                None => s = s | self.ground.subset([&n]).expect("known variable"),
            }
        }
        s
    }

    fn inputs(&self, node: &str) -> Vec<String> {
        let mut v: Vec<String> = self.p.sources_at(node).map(|s| s.id.clone()).collect();
        v.extend(self.p.in_edges(node).map(|e| e.id.clone()));
        v
    }

    fn push_zero(&mut self, target: SubsetIndex, given: SubsetIndex, label: String) {
        let f = LinearFunctional::conditional(target, given);
        if !f.is_zero() {
            self.rows.push(LinearConstraint::eq(f, Rational::from_integer(0.into())).labelled(label));
        }
    }

    fn cond_label(&self, target: SubsetIndex, given: SubsetIndex) -> String {
        if given.is_empty() {
            format!("h({}) = 0", self.ground.display(target))
        } else {
            format!("h({}|{}) = 0", self.ground.display(target), self.ground.display(given))
        }
    }

    fn network_rows(&mut self, caps: &[Capacity]) {
        let p = self.p;
        for e in p.edges() {
            if self.collapsed.contains_key(&e.id) {
                continue;
            }
            let target = self.set([e.id.clone()]);
            let given = self.set(self.inputs(&e.tail));
            let label = self.cond_label(target, given);
            self.push_zero(target, given, label);
        }
        for s in p.sources() {
            for u in &s.demanded_at {
                let target = self.set([s.id.clone()]);
                let given = self.set(self.inputs(u));
                let label = self.cond_label(target, given);
                self.push_zero(target, given, label);
            }
        }
        for (e, c) in p.edges().iter().zip(caps) {
            if let Capacity::Finite(r) = c {
                let s = self.set([e.id.clone()]);
                self.rows.push(
                    LinearConstraint::le(LinearFunctional::entropy(s), r.clone())
                        .labelled(format!("h({}) <= {}", e.id, crate::rational::format_rational(r))),
                );
            }
        }
    }

    fn fixing_row(&mut self, s: SubsetIndex, value: &Rational) {
        let label = format!("h({}) = {}", self.ground.display(s), crate::rational::format_rational(value));
        self.rows.push(LinearConstraint::eq(LinearFunctional::entropy(s), value.clone()).labelled(label));
    }

    fn finish(mut self) -> Result<NetworkLp> {
        let n = self.ground.len();
        for f in elemental_inequalities(n)? {
            self.rows.push(LinearConstraint::ge_zero(f));
        }
        // sources and aux first, then every edge in problem order
        let mut order: Vec<String> =
            self.ground.names().iter().filter(|n| self.p.edge(n).is_none()).cloned().collect();
        order.extend(self.p.edges().iter().map(|e| e.id.clone()));
        let full_ground = GroundSet::new(order)?;
        let system = LinearSystem::with_constraints(self.ground, self.rows)?;
        Ok(NetworkLp { system, full_ground, collapsed: self.collapsed })
    }
}

fn start<'a>(
    p: &'a NetworkProblem,
    c: &CapacityTuple,
    aux_ids: &[&str],
    opts: &BuildOptions,
) -> Result<(Builder<'a>, Vec<Capacity>)> {
    let caps = p.resolve_capacities(c)?;
    let collapsed = if opts.collapse_infinite { collapse_map(p, &caps) } else { BTreeMap::new() };
    let mut names: Vec<String> = p.sources().iter().map(|s| s.id.clone()).collect();
    for a in aux_ids {
        if names.iter().any(|n| n == a) || p.edge(a).is_some() {
            return Err(Error::domain(format!("auxiliary id {a:?} collides with a source or edge")));
        }
        names.push(a.to_string());
    }
    names.extend(p.edges().iter().filter(|e| !collapsed.contains_key(&e.id)).map(|e| e.id.clone()));
    let ground = GroundSet::new(names)?;
    Ok((Builder { p, ground, collapsed, rows: Vec::new() }, caps))
}

/// Sources occupy the first ground positions, so source masks carry over.
fn source_fixings(b: &mut Builder<'_>) {
    let h = b.p.source_entropies();
    let k = b.p.sources().len();
    for mask in 1u32..(1 << k) {
        let s = SubsetIndex(mask);
        let value = h.get(s).clone();
        b.fixing_row(s, &value);
    }
}

/// The outer-bound LP of a network at capacities `c`, over every source and
/// edge variable.
pub fn build_lp_constraints(p: &NetworkProblem, c: &CapacityTuple) -> Result<LinearSystem> {
    let opts = BuildOptions { collapse_infinite: false, ..Default::default() };
    Ok(build_lp_constraints_with(p, c, &opts)?.system)
}

pub fn build_lp_constraints_with(p: &NetworkProblem, c: &CapacityTuple, opts: &BuildOptions) -> Result<NetworkLp> {
    let (mut b, caps) = start(p, c, &[], opts)?;
    source_fixings(&mut b);
    b.network_rows(&caps);
    b.finish()
}

/// The LP tightened by auxiliary variables; with an empty spec this is the
/// plain outer bound.
pub fn build_improved_constraints(p: &NetworkProblem, c: &CapacityTuple, aux: &AuxSpec) -> Result<LinearSystem> {
    let opts = BuildOptions { collapse_infinite: false, ..Default::default() };
    Ok(build_improved_constraints_with(p, c, aux, &opts)?.system)
}

pub fn build_improved_constraints_with(
    p: &NetworkProblem,
    c: &CapacityTuple,
    aux: &AuxSpec,
    opts: &BuildOptions,
) -> Result<NetworkLp> {
    let ids = aux.ids();
    let unique: BTreeSet<&str> = ids.iter().copied().collect();
    if unique.len() != ids.len() {
        return Err(Error::domain("duplicate auxiliary id"));
    }
    let (mut b, caps) = start(p, c, &ids, opts)?;
    let functional: Vec<&str> = aux.functional().map(|(id, _)| id).collect();
    if functional.is_empty() {
        source_fixings(&mut b);
    } else {
        let dist = match p.model() {
            SourceModel::Explicit(d) => d,
            SourceModel::EntropiesOnly(_) => {
                return Err(Error::Precondition("functional auxiliaries need an explicit source distribution".into()))
            }
        };
        let extended = aux.extend_distribution(dist)?;
        let h = entropy_vector_of(&extended);
        // Map a subset of the extended distribution's variables to the LP ground set.
        let names: Vec<String> = extended.variables().iter().map(|v| v.name.clone()).collect();
        let to_ground = |s: SubsetIndex| b.ground.subset(s.members().map(|i| names[i].as_str())).expect("known");
        let k = p.sources().len();
        let subsets: Vec<SubsetIndex> = match &aux.fixing {
            Fixing::All => (1u32..(1 << names.len())).map(SubsetIndex).collect(),
            Fixing::Selected(list) => {
                let mut v: Vec<SubsetIndex> = (1u32..(1 << k)).map(SubsetIndex).collect();
                let eg = extended.ground();
                for names in list {
                    let s = eg.subset(names).map_err(|e| {
                        Error::domain(format!("selected subset {names:?} is not over sources and functional aux: {e}"))
                    })?;
                    if !v.contains(&s) {
                        v.push(s);
                    }
                }
                v
            }
        };
        let fixes: Vec<(SubsetIndex, Rational)> = subsets.iter().map(|&s| (to_ground(s), h.get(s).clone())).collect();
        for (s, v) in fixes {
            b.fixing_row(s, &v);
        }
    }
    let templates = aux.template_rows(&b.ground)?;
    b.rows.extend(templates);
    b.network_rows(&caps);
    b.finish()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundVerdict {
    /// The LP is feasible; the witness is over every source, aux and edge.
    MaybeAchievable { witness: EntropyVector },
    /// The capacities are outside the bound; the certificate refers to the
    /// solved system.
    NotAchievable { certificate: FarkasCertificate },
}

impl BoundVerdict {
    pub fn is_achievable(&self) -> bool {
        matches!(self, BoundVerdict::MaybeAchievable { .. })
    }
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub verdict: BoundVerdict,
    /// Raw solver result over `lp.system`.
    pub result: FeasibilityResult,
    pub lp: NetworkLp,
    pub stats: SolverStats,
}

impl BoundReport {
    /// Re-checks the verdict against the solved system.
    pub fn verify(&self) -> bool {
        crate::lp::verify_certificate(&self.lp.system, &self.result)
    }
}

fn run(lp: NetworkLp, opts: &BuildOptions) -> Result<BoundReport> {
    let (result, stats) = solve_feasibility_with(&lp.system, &opts.solver)?;
    let verdict = match &result {
        FeasibilityResult::Feasible { witness } => BoundVerdict::MaybeAchievable { witness: lp.expand_witness(witness)? },
        FeasibilityResult::Infeasible { certificate } => BoundVerdict::NotAchievable { certificate: certificate.clone() },
    };
    Ok(BoundReport { verdict, result, lp, stats })
}

/// Decides whether `c` lies in the LP outer bound.
pub fn check_lp_bound(p: &NetworkProblem, c: &CapacityTuple) -> Result<BoundReport> {
    check_lp_bound_with(p, c, &BuildOptions::default())
}

pub fn check_lp_bound_with(p: &NetworkProblem, c: &CapacityTuple, opts: &BuildOptions) -> Result<BoundReport> {
    run(build_lp_constraints_with(p, c, opts)?, opts)
}

pub fn check_improved_bound(p: &NetworkProblem, c: &CapacityTuple, aux: &AuxSpec) -> Result<BoundReport> {
    check_improved_bound_with(p, c, aux, &BuildOptions::default())
}

pub fn check_improved_bound_with(
    p: &NetworkProblem,
    c: &CapacityTuple,
    aux: &AuxSpec,
    opts: &BuildOptions,
) -> Result<BoundReport> {
    run(build_improved_constraints_with(p, c, aux, opts)?, opts)
}
