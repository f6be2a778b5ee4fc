use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entropy::{JointDistribution, Variable};
use crate::error::{Error, Result};
use crate::lp::LinearConstraint;
use crate::entropy::GroundSet;

/// An auxiliary variable given as a deterministic function of some sources.
///
/// `table` maps the comma-joined outcome labels of the `of` variables to an
/// output label, e.g. `{"00,01": "0"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxFunction {
    pub of: Vec<String>,
    pub table: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxVariable {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<AuxFunction>,
}

/// Which joint entropies involving functional auxiliaries are pinned to
/// their true values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Fixing {
    /// Every nonempty subset of sources and functional auxiliaries.
    #[default]
    All,
    /// Only the listed subsets (source-only subsets are always fixed).
    Selected(Vec<Vec<String>>),
}

/// Auxiliary variables adjoined to a network LP.
///
/// Functional members are evaluated on the source distribution; members
/// without a function are constrained only by the template rows, which use
/// the LP text grammar over source, auxiliary and edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuxSpec {
    pub aux: Vec<AuxVariable>,
    pub constraints: Vec<String>,
    pub fixing: Fixing,
}

#[derive(Serialize, Deserialize)]
struct AuxFile {
    #[serde(default)]
    aux: Vec<AuxVariable>,
    #[serde(default)]
    aux_constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fixed_subsets: Option<Vec<Vec<String>>>,
}

impl AuxSpec {
    pub fn is_empty(&self) -> bool {
        self.aux.is_empty() && self.constraints.is_empty()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.aux.iter().map(|a| a.id.as_str()).collect()
    }

    pub fn functional(&self) -> impl Iterator<Item = (&str, &AuxFunction)> {
        self.aux.iter().filter_map(|a| a.function.as_ref().map(|f| (a.id.as_str(), f)))
    }

    pub fn with_fixing(mut self, fixing: Fixing) -> Self {
        self.fixing = fixing;
        self
    }

    /// Parses the template rows against `ground`.
    pub fn template_rows(&self, ground: &GroundSet) -> Result<Vec<LinearConstraint>> {
        self.constraints
            .iter()
            .enumerate()
            .map(|(k, text)| {
                let loc = format!("aux_constraints[{k}]");
                let row = crate::lp::dump::parse_named_row(text, &loc)?;
                crate::lp::dump::resolve(ground, &row, &loc)
            })
            .collect()
    }

    /// Extends `dist` with one derived column per functional auxiliary.
    pub fn extend_distribution(&self, dist: &JointDistribution) -> Result<JointDistribution> {
        let mut out = dist.clone();
        for (id, f) in self.functional() {
            let cols: Vec<usize> = f
                .of
                .iter()
                .map(|n| {
                    dist.index_of(n)
                        .ok_or_else(|| Error::domain(format!("aux {id} depends on unknown variable {n:?}")))
                })
                .collect::<Result<_>>()?;
            let alphabet: Vec<String> = f.table.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
            let vars = dist.variables();
            let var = Variable { name: id.to_string(), alphabet: alphabet.clone() };
            out = out.with_derived(var, |o| {
                let key = cols.iter().map(|&c| vars[c].alphabet[o[c]].as_str()).collect::<Vec<_>>().join(",");
                let v = f
                    .table
                    .get(&key)
                    .ok_or_else(|| Error::domain(format!("aux {id} has no table entry for {key:?}")))?;
                Ok(alphabet.iter().position(|a| a == v).expect("value in alphabet"))
            })?;
        }
        Ok(out)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: AuxFile = serde_json::from_str(text).map_err(|e| Error::Json { context: "aux spec".into(), source: e })?;
        Ok(AuxSpec {
            aux: file.aux,
            constraints: file.aux_constraints,
            fixing: file.fixed_subsets.map_or(Fixing::All, Fixing::Selected),
        })
    }

    pub fn to_json_string(&self) -> String {
        let file = AuxFile {
            aux: self.aux.clone(),
            aux_constraints: self.constraints.clone(),
            fixed_subsets: match &self.fixing {
                Fixing::All => None,
                Fixing::Selected(s) => Some(s.clone()),
            },
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        Self::from_json_str(&text)
    }
}

/// The flagship example's auxiliaries `Z0=b0`, `Z1=b1`, `Z2=b2` as
/// functions of the sources (`Z0` and `Z1` read from `Y1`, `Z2` from `Y2`).
pub fn example1_functional_aux() -> AuxSpec {
    let bit = |id: &str, of: &str, pos: usize| AuxVariable {
        id: id.into(),
        function: Some(AuxFunction {
            of: vec![of.into()],
            table: ["00", "01", "10", "11"]
                .iter()
                .map(|l| (l.to_string(), l[pos..pos + 1].to_string()))
                .collect(),
        }),
    };
    AuxSpec {
        aux: vec![bit("Z0", "Y1", 0), bit("Z1", "Y1", 1), bit("Z2", "Y2", 1)],
        constraints: vec![],
        fixing: Fixing::All,
    }
}

/// The flagship example's auxiliaries described only through the
/// hand-selected rows: unit entropy per `Z`, each source a function of its
/// two `Z`s, and matching joint entropies.
pub fn example1_selected_aux() -> AuxSpec {
    let mut rows = Vec::new();
    for mask in 1u32..8 {
        let names: Vec<String> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| format!("Z{i}")).collect();
        rows.push(format!("h{{{}}} = {}", names.join(","), names.len()));
    }
    for (y, a, b) in [("Y1", "Z0", "Z1"), ("Y2", "Z0", "Z2"), ("Y3", "Z1", "Z2")] {
        rows.push(format!("h{{{y},{a},{b}}} -h{{{a},{b}}} = 0  # h({y}|{a} {b}) = 0"));
        rows.push(format!("h{{{a},{b}}} -h{{{y}}} = 0  # h({a} {b}) = h({y})"));
    }
    AuxSpec {
        aux: (0..3).map(|i| AuxVariable { id: format!("Z{i}"), function: None }).collect(),
        constraints: rows,
        fixing: Fixing::All,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy_vector_of;
    use crate::network::problem::example1_sources;
    use crate::rational::int;

    #[test]
    fn functional_aux_are_the_shared_bits() {
        let d = example1_functional_aux().extend_distribution(&example1_sources()).unwrap();
        let h = entropy_vector_of(&d);
        let g = h.ground().clone();
        for z in ["Z0", "Z1", "Z2"] {
            assert_eq!(*h.get(g.subset([z]).unwrap()), int(1));
        }
        assert_eq!(*h.get(g.subset(["Z0", "Z1", "Z2"]).unwrap()), int(3));
        assert_eq!(*h.get(g.subset(["Y1", "Z0", "Z1"]).unwrap()), int(2));
        assert_eq!(*h.get(g.subset(["Y3", "Z1", "Z2"]).unwrap()), int(2));
    }

    #[test]
    fn json_round_trip() {
        for spec in [example1_functional_aux(), example1_selected_aux()] {
            let back = AuxSpec::from_json_str(&spec.to_json_string()).unwrap();
            assert_eq!(back, spec);
        }
        let sel = example1_functional_aux().with_fixing(Fixing::Selected(vec![vec!["Z0".into()]]));
        assert_eq!(AuxSpec::from_json_str(&sel.to_json_string()).unwrap(), sel);
    }

    #[test]
    fn missing_table_entry_is_reported() {
        let mut spec = example1_functional_aux();
        spec.aux[0].function.as_mut().unwrap().table.remove("11");
        assert!(spec.extend_distribution(&example1_sources()).is_err());
    }
}
