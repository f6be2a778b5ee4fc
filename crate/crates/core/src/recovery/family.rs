//! The indicator family `X*_a = 1{X ∈ a}` for nonempty `a ⊆ {2..n}`, and
//! entropy oracles over it.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Deserialize;

use crate::entropy::{entropy_with_cache, Entropy, JointDistribution, TermCache, Variable};
use crate::error::{Error, Result};
use crate::rational::{from_f64_exact, parse_rational, Rational};

/// Largest alphabet for which the family (2^(n-1) - 1 members) is built.
pub const MAX_ATOMS: usize = 16;

/// Indicators of every nonempty subset of `{2..n}` for an `n`-ary variable
/// whose atoms are sorted by decreasing probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorFamily {
    probs: Vec<Rational>,
    labels: Vec<String>,
    /// bit `k` set when atom `k + 1` is in the member's set; bit 0 never set
    members: Vec<u32>,
}

impl IndicatorFamily {
    /// Builds the family of a single-variable distribution. Labels are
    /// reordered by decreasing probability (stable in label order).
    pub fn new(dist: &JointDistribution) -> Result<Self> {
        if dist.num_variables() != 1 {
            return Err(Error::domain("the indicator family needs a single variable"));
        }
        let var = &dist.variables()[0];
        if dist.support().len() != var.alphabet.len() {
            return Err(Error::domain("every atom must have positive probability"));
        }
        let mut atoms: Vec<(Rational, String)> =
            dist.support().iter().map(|(o, p)| (p.clone(), var.alphabet[o[0]].clone())).collect();
        atoms.sort_by(|a, b| b.0.cmp(&a.0));
        Self::build(atoms.iter().map(|a| a.0.clone()).collect(), atoms.into_iter().map(|a| a.1).collect())
    }

    /// Builds the family for probabilities of atoms `1..n` (sorted here if
    /// needed; labels are the original positions, starting at 1).
    pub fn from_probabilities(probs: &[Rational]) -> Result<Self> {
        let mut atoms: Vec<(Rational, String)> =
            probs.iter().enumerate().map(|(i, p)| (p.clone(), (i + 1).to_string())).collect();
        atoms.sort_by(|a, b| b.0.cmp(&a.0));
        Self::build(atoms.iter().map(|a| a.0.clone()).collect(), atoms.into_iter().map(|a| a.1).collect())
    }

    pub(crate) fn build(probs: Vec<Rational>, labels: Vec<String>) -> Result<Self> {
        let n = probs.len();
        if n < 2 {
            return Err(Error::domain("the indicator family needs at least two atoms"));
        }
        if n > MAX_ATOMS {
            return Err(Error::domain(format!("at most {MAX_ATOMS} atoms are supported")));
        }
        if probs.iter().any(|p| !p.is_positive()) {
            return Err(Error::domain("every atom must have positive probability"));
        }
        if probs.iter().sum::<Rational>() != Rational::from_integer(1.into()) {
            return Err(Error::domain("probabilities must sum to one"));
        }
        let members = (1u32..(1 << (n - 1))).map(|m| m << 1).collect();
        Ok(IndicatorFamily { probs, labels, members })
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    /// Atom probabilities, largest first.
    pub fn probabilities(&self) -> &[Rational] {
        &self.probs
    }

    /// Original labels of the atoms, in the sorted order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Atoms (numbered from 1) in member `i`.
    pub fn member_set(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|k| self.members[i] >> k & 1 == 1).map(|k| k + 1).collect()
    }

    /// Index of the member for the atom set `a` (numbered from 1).
    pub fn index_of(&self, a: &[usize]) -> Option<usize> {
        let mask: u32 = a.iter().map(|&k| 1u32 << (k - 1)).fold(0, |x, y| x | y);
        self.members.iter().position(|&m| m == mask)
    }

    pub fn member_id(&self, i: usize) -> String {
        let s: Vec<String> = self.member_set(i).iter().map(usize::to_string).collect();
        format!("X*_{}", s.join("_"))
    }

    pub(crate) fn mask(&self, i: usize) -> u32 {
        self.members[i]
    }

    /// Joint entropy of the listed members.
    pub fn entropy(&self, members: &[usize]) -> Entropy {
        self.entropy_cached(members, &mut TermCache::default())
    }

    pub(crate) fn entropy_cached(&self, members: &[usize], cache: &mut TermCache) -> Entropy {
        self.entropy_by(cache, |k| members.iter().map(|&i| self.members[i] >> k & 1).fold(0u64, |acc, b| acc << 1 | b as u64))
    }

    /// Entropy of the partition of atoms induced by `key`.
    pub(crate) fn entropy_by<K: Ord>(&self, cache: &mut TermCache, key: impl Fn(usize) -> K) -> Entropy {
        let mut cells: BTreeMap<K, Rational> = BTreeMap::new();
        for (k, p) in self.probs.iter().enumerate() {
            *cells.entry(key(k)).or_insert_with(Rational::zero) += p;
        }
        entropy_with_cache(cells.values(), cache)
    }

    /// `X` together with every indicator, as one joint distribution.
    pub fn extension(&self) -> Result<JointDistribution> {
        let x = Variable { name: "X".into(), alphabet: self.labels.clone() };
        let mut d = JointDistribution::new(
            vec![x],
            self.probs.iter().enumerate().map(|(k, p)| (vec![k], p.clone())).collect(),
        )?;
        for i in 0..self.len() {
            let bit = Variable { name: self.member_id(i), alphabet: vec!["0".into(), "1".into()] };
            let mask = self.members[i];
            d = d.with_derived(bit, |o| Ok((mask >> o[0] & 1) as usize))?;
        }
        Ok(d)
    }
}

/// Answers joint-entropy queries over a list of opaque member ids.
pub trait EntropyOracle {
    fn member_ids(&self) -> Vec<String>;

    /// `H` of the listed members (indices into `member_ids`).
    fn entropy(&self, members: &[usize]) -> Result<Entropy>;

    /// `H` of the listed axis variables together with the listed members.
    fn axis_entropy(&self, _axes: &[usize], _members: &[usize]) -> Result<Entropy> {
        Err(Error::Precondition("this oracle has no axis variables".into()))
    }
}

/// Oracle over an [`IndicatorFamily`], optionally with members shuffled
/// and renamed so that their ids carry no information.
#[derive(Clone, Debug)]
pub struct FamilyOracle<'a> {
    family: &'a IndicatorFamily,
    /// oracle index -> family member index
    order: Vec<usize>,
    ids: Vec<String>,
    cache: RefCell<TermCache>,
}

impl<'a> FamilyOracle<'a> {
    pub fn new(family: &'a IndicatorFamily) -> Self {
        FamilyOracle {
            family,
            order: (0..family.len()).collect(),
            ids: (0..family.len()).map(|i| family.member_id(i)).collect(),
            cache: RefCell::default(),
        }
    }

    pub fn shuffled(family: &'a IndicatorFamily, rng: &mut impl Rng) -> Self {
        let mut order: Vec<usize> = (0..family.len()).collect();
        order.shuffle(rng);
        let ids = (0..order.len()).map(|i| format!("Y{}", i + 1)).collect();
        FamilyOracle { family, order, ids, cache: RefCell::default() }
    }

    /// Family member behind oracle index `i`.
    pub fn member(&self, i: usize) -> usize {
        self.order[i]
    }

    pub fn family(&self) -> &IndicatorFamily {
        self.family
    }
}

impl EntropyOracle for FamilyOracle<'_> {
    fn member_ids(&self) -> Vec<String> {
        self.ids.clone()
    }

    fn entropy(&self, members: &[usize]) -> Result<Entropy> {
        let idx: Vec<usize> = members.iter().map(|&i| self.order[i]).collect();
        Ok(self.family.entropy_cached(&idx, &mut self.cache.borrow_mut()))
    }
}

/// Oracle backed by a table of joint entropies, e.g. read from a file.
#[derive(Clone, Debug, Default)]
pub struct TableOracle {
    ids: Vec<String>,
    values: HashMap<Vec<usize>, Entropy>,
}

#[derive(Deserialize)]
struct TableFile {
    members: Vec<MemberEntry>,
    #[serde(default)]
    joint: Vec<JointEntry>,
    #[serde(default)]
    conditionals: Vec<ConditionalEntry>,
    #[serde(default)]
    exact: bool,
}

#[derive(Deserialize)]
struct MemberEntry {
    id: String,
    #[serde(rename = "H")]
    h: serde_json::Value,
}

#[derive(Deserialize)]
struct JointEntry {
    members: Vec<String>,
    #[serde(rename = "H")]
    h: serde_json::Value,
}

#[derive(Deserialize)]
struct ConditionalEntry {
    of: Vec<String>,
    given: Vec<String>,
    #[serde(rename = "H")]
    h: serde_json::Value,
}

fn number(v: &serde_json::Value, at: &str) -> Result<Rational> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .map(from_f64_exact)
            .ok_or_else(|| Error::parse(at, "entropy is not a finite number")),
        serde_json::Value::String(s) => parse_rational(s),
        _ => Err(Error::parse(at, "entropy must be a number or a rational string")),
    }
}

impl TableOracle {
    pub fn new(ids: Vec<String>) -> Self {
        TableOracle { ids, values: HashMap::new() }
    }

    pub fn insert(&mut self, mut members: Vec<usize>, h: Entropy) {
        members.sort_unstable();
        members.dedup();
        self.values.insert(members, h);
    }

    /// Reads `{"members":[{"id","H"}], "joint":[{"members","H"}],
    /// "conditionals":[{"of","given","H"}], "exact": bool}`. A conditional
    /// entry needs the joint entropy of its `given` set elsewhere in the file.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: TableFile =
            serde_json::from_str(text).map_err(|e| Error::Json { context: "entropy table".into(), source: e })?;
        let ids: Vec<String> = file.members.iter().map(|m| m.id.clone()).collect();
        let mut t = TableOracle::new(ids.clone());
        let index = |name: &str, at: &str| {
            ids.iter().position(|i| i == name).ok_or_else(|| Error::parse(at, format!("unknown member {name:?}")))
        };
        let wrap = |bits: Rational| Entropy { bits, exact: file.exact };
        for (k, m) in file.members.iter().enumerate() {
            t.insert(vec![k], wrap(number(&m.h, &format!("members[{k}]"))?));
        }
        for (k, j) in file.joint.iter().enumerate() {
            let at = format!("joint[{k}]");
            let set = j.members.iter().map(|n| index(n, &at)).collect::<Result<Vec<_>>>()?;
            t.insert(set, wrap(number(&j.h, &at)?));
        }
        for (k, c) in file.conditionals.iter().enumerate() {
            let at = format!("conditionals[{k}]");
            let mut given = c.given.iter().map(|n| index(n, &at)).collect::<Result<Vec<_>>>()?;
            given.sort_unstable();
            let base = if given.is_empty() {
                Rational::zero()
            } else {
                t.values
                    .get(&given)
                    .map(|e| e.bits.clone())
                    .ok_or_else(|| Error::parse(&at, "the joint entropy of the conditioning set is missing"))?
            };
            let mut all = given.clone();
            all.extend(c.of.iter().map(|n| index(n, &at)).collect::<Result<Vec<_>>>()?);
            t.insert(all, wrap(base + number(&c.h, &at)?));
        }
        Ok(t)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        Self::from_json_str(&text)
    }

    /// Writes the table in the format read by [`TableOracle::from_json_str`],
    /// with entropies as decimal numbers.
    pub fn to_json_value(&self) -> serde_json::Value {
        let f = |e: &Entropy| serde_json::json!(crate::rational::to_f64(&e.bits));
        let members: Vec<_> = self
            .ids
            .iter()
            .enumerate()
            .map(|(k, id)| serde_json::json!({"id": id, "H": self.values.get(&vec![k]).map(f)}))
            .collect();
        let mut joint: Vec<(Vec<String>, serde_json::Value)> = self
            .values
            .iter()
            .filter(|(k, _)| k.len() > 1)
            .map(|(k, e)| (k.iter().map(|&i| self.ids[i].clone()).collect(), f(e)))
            .collect();
        joint.sort_by(|a, b| a.0.cmp(&b.0));
        let joint: Vec<_> = joint.into_iter().map(|(m, h)| serde_json::json!({"members": m, "H": h})).collect();
        serde_json::json!({"members": members, "joint": joint})
    }
}

impl EntropyOracle for TableOracle {
    fn member_ids(&self) -> Vec<String> {
        self.ids.clone()
    }

    fn entropy(&self, members: &[usize]) -> Result<Entropy> {
        let mut key = members.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return Ok(Entropy { bits: Rational::zero(), exact: true });
        }
        self.values.get(&key).cloned().ok_or_else(|| {
            let names: Vec<&str> = key.iter().map(|&i| self.ids[i].as_str()).collect();
            Error::inconsistent("query", format!("no entropy given for {{{}}}", names.join(",")))
        })
    }
}

/// Wraps an oracle and records every query, to export what a recovery used.
pub struct RecordingOracle<'a> {
    inner: &'a dyn EntropyOracle,
    pub table: RefCell<TableOracle>,
}

impl<'a> RecordingOracle<'a> {
    pub fn new(inner: &'a dyn EntropyOracle) -> Self {
        RecordingOracle { inner, table: RefCell::new(TableOracle::new(inner.member_ids())) }
    }
}

impl EntropyOracle for RecordingOracle<'_> {
    fn member_ids(&self) -> Vec<String> {
        self.inner.member_ids()
    }

    fn entropy(&self, members: &[usize]) -> Result<Entropy> {
        let h = self.inner.entropy(members)?;
        if !members.is_empty() {
            self.table.borrow_mut().insert(members.to_vec(), h.clone());
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{binary_entropy, entropy_vector_of};
    use crate::rational::{int, ratio, to_f64};

    #[test]
    fn quarter_half_family() {
        let f = IndicatorFamily::from_probabilities(&[ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        assert_eq!(f.len(), 3);
        let h = |a: &[usize]| f.entropy(&[f.index_of(a).unwrap()]);
        assert!((to_f64(&h(&[2]).bits) - binary_entropy(0.25)).abs() < 1e-15);
        assert!((to_f64(&h(&[3]).bits) - binary_entropy(0.25)).abs() < 1e-15);
        assert_eq!(h(&[2, 3]).bits, int(1));
    }

    #[test]
    fn two_atoms_single_indicator() {
        let f = IndicatorFamily::from_probabilities(&[ratio(3, 10), ratio(7, 10)]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.member_set(0), vec![2]);
        assert_eq!(f.probabilities()[0], ratio(7, 10));
        assert_eq!(f.labels()[0], "2");
    }

    #[test]
    fn indicators_are_functions_of_x() {
        let f = IndicatorFamily::from_probabilities(&[ratio(1, 2), ratio(1, 3), ratio(1, 6)]).unwrap();
        let h = entropy_vector_of(&f.extension().unwrap());
        let g = h.ground().clone();
        let x = g.subset(["X"]).unwrap();
        for name in &g.names()[1..] {
            let s = g.subset([name.as_str()]).unwrap();
            assert_eq!(h.get(x | s), h.get(x));
        }
        // and the atom 1 maps to 0 in every indicator
        let d = f.extension().unwrap();
        let first = d.support().iter().find(|(o, _)| o[0] == 0).unwrap();
        assert!(first.0[1..].iter().all(|&v| v == 0));
    }

    #[test]
    fn zero_atom_rejected() {
        assert!(IndicatorFamily::from_probabilities(&[ratio(1, 2), ratio(1, 2), int(0)]).is_err());
    }

    #[test]
    fn table_round_trip() {
        let f = IndicatorFamily::from_probabilities(&[ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let o = FamilyOracle::new(&f);
        let rec = RecordingOracle::new(&o);
        rec.entropy(&[0]).unwrap();
        rec.entropy(&[1]).unwrap();
        rec.entropy(&[2]).unwrap();
        rec.entropy(&[0, 2]).unwrap();
        let text = rec.table.borrow().to_json_value().to_string();
        let t = TableOracle::from_json_str(&text).unwrap();
        let diff = to_f64(&t.entropy(&[2, 0]).unwrap().bits) - to_f64(&o.entropy(&[0, 2]).unwrap().bits);
        assert!(diff.abs() < 1e-15);
        assert!(t.entropy(&[1, 2]).is_err());
    }
}
