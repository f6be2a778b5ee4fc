use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::ground::{GroundSet, SubsetIndex};
use super::vector::EntropyVector;
use crate::error::{Error, Result};
use crate::rational::{self, format_rational, parse_rational, Rational};

/// A finite random variable: a label and its alphabet of outcome labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub alphabet: Vec<String>,
}

/// Exact probability mass function over a product of finite alphabets.
///
/// Only positive-probability outcomes are stored, sorted by outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    variables: Vec<Variable>,
    pmf: Vec<(Vec<usize>, Rational)>,
}

/// A joint entropy in bits. `exact` is true when `bits` is the true value
/// rather than a dyadic approximation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entropy {
    pub bits: Rational,
    pub exact: bool,
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    variables: Vec<Variable>,
    pmf: Vec<PmfEntry>,
}

#[derive(Serialize, Deserialize)]
struct PmfEntry {
    outcome: Vec<String>,
    p: serde_json::Value,
}

impl JointDistribution {
    /// Builds a distribution from outcome-index tuples. Zero entries are
    /// dropped and repeated outcomes are merged.
    pub fn new(variables: Vec<Variable>, entries: Vec<(Vec<usize>, Rational)>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::domain("distribution needs at least one variable"));
        }
        GroundSet::new(variables.iter().map(|v| v.name.clone()))?;
        for v in &variables {
            if v.alphabet.is_empty() {
                return Err(Error::domain(format!("variable {} has an empty alphabet", v.name)));
            }
            for (i, a) in v.alphabet.iter().enumerate() {
                if v.alphabet[..i].contains(a) {
                    return Err(Error::domain(format!("variable {} repeats symbol {a:?}", v.name)));
                }
            }
        }
        let mut merged: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        let mut total = Rational::zero();
        for (outcome, p) in entries {
            if outcome.len() != variables.len() {
                return Err(Error::domain(format!(
                    "outcome has {} coordinates, expected {}",
                    outcome.len(),
                    variables.len()
                )));
            }
            for (k, (&o, v)) in outcome.iter().zip(&variables).enumerate() {
                if o >= v.alphabet.len() {
                    return Err(Error::domain(format!("outcome coordinate {k} out of alphabet of {}", v.name)));
                }
            }
            if p.is_negative() {
                return Err(Error::domain(format!("negative probability {}", format_rational(&p))));
            }
            total += &p;
            if !p.is_zero() {
                *merged.entry(outcome).or_insert_with(Rational::zero) += p;
            }
        }
        if !total.is_one() {
            return Err(Error::domain(format!(
                "probabilities sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(JointDistribution {
            variables,
            pmf: merged.into_iter().collect(),
        })
    }

    /// Builds a distribution from labelled outcomes.
    pub fn from_labels<S: AsRef<str>>(
        variables: Vec<Variable>,
        entries: impl IntoIterator<Item = (Vec<S>, Rational)>,
    ) -> Result<Self> {
        let mut indexed = Vec::new();
        for (labels, p) in entries {
            if labels.len() != variables.len() {
                return Err(Error::domain("outcome arity does not match variable count"));
            }
            let mut idx = Vec::with_capacity(labels.len());
            for (l, v) in labels.iter().zip(&variables) {
                let l = l.as_ref();
                let i = v
                    .alphabet
                    .iter()
                    .position(|a| a == l)
                    .ok_or_else(|| Error::domain(format!("symbol {l:?} not in alphabet of {}", v.name)))?;
                idx.push(i);
            }
            indexed.push((idx, p));
        }
        Self::new(variables, indexed)
    }

    /// Uniform distribution over the given outcome tuples.
    pub fn uniform_over(variables: Vec<Variable>, outcomes: Vec<Vec<usize>>) -> Result<Self> {
        let n = outcomes.len() as i64;
        if n == 0 {
            return Err(Error::domain("uniform distribution over no outcomes"));
        }
        let p = rational::ratio(1, n);
        Self::new(variables, outcomes.into_iter().map(|o| (o, p.clone())).collect())
    }

    /// One variable with the given probabilities and alphabet `1..=n`.
    pub fn single(name: &str, probs: &[Rational]) -> Result<Self> {
        let alphabet = (1..=probs.len()).map(|i| i.to_string()).collect();
        Self::new(
            vec![Variable { name: name.into(), alphabet }],
            probs.iter().enumerate().map(|(i, p)| (vec![i], p.clone())).collect(),
        )
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(self.variables.iter().map(|v| v.name.clone())).expect("validated at construction")
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Positive-probability outcomes with their probabilities.
    pub fn support(&self) -> &[(Vec<usize>, Rational)] {
        &self.pmf
    }

    /// Marginal pmf of the variables in `subset`, keyed by the projected outcome.
    pub fn marginal(&self, subset: SubsetIndex) -> BTreeMap<Vec<usize>, Rational> {
        let members: Vec<usize> = subset.members().collect();
        let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (o, p) in &self.pmf {
            let key: Vec<usize> = members.iter().map(|&i| o[i]).collect();
            *out.entry(key).or_insert_with(Rational::zero) += p;
        }
        out
    }

    /// Appends a variable that is a deterministic function of the outcome.
    pub fn with_derived(
        &self,
        variable: Variable,
        f: impl Fn(&[usize]) -> Result<usize>,
    ) -> Result<Self> {
        let mut vars = self.variables.clone();
        vars.push(variable);
        let mut entries = Vec::with_capacity(self.pmf.len());
        for (o, p) in &self.pmf {
            let mut o2 = o.clone();
            o2.push(f(o)?);
            entries.push((o2, p.clone()));
        }
        Self::new(vars, entries)
    }

    /// Restricts to the listed variables (in that order).
    pub fn project(&self, names: &[&str]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| Error::domain(format!("unknown variable {n:?}"))))
            .collect::<Result<_>>()?;
        let vars = idx.iter().map(|&i| self.variables[i].clone()).collect();
        let entries = self
            .pmf
            .iter()
            .map(|(o, p)| (idx.iter().map(|&i| o[i]).collect(), p.clone()))
            .collect();
        Self::new(vars, entries)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(s).map_err(|e| Error::Json {
            context: "distribution".into(),
            source: e,
        })?;
        Self::from_file_repr(file)
    }

    fn from_file_repr(file: DistributionFile) -> Result<Self> {
        let mut entries = Vec::with_capacity(file.pmf.len());
        for (k, e) in file.pmf.into_iter().enumerate() {
            let p = match &e.p {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                other => Err(Error::parse(format!("pmf[{k}].p"), format!("expected rational, got {other}"))),
            }
            .map_err(|err| match err {
                Error::Parse { message, .. } => Error::parse(format!("pmf[{k}].p"), message),
                other => other,
            })?;
            entries.push((e.outcome, p));
        }
        Self::from_labels(file.variables, entries)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let file: DistributionFile = serde_json::from_value(v).map_err(|e| Error::Json {
            context: "distribution".into(),
            source: e,
        })?;
        Self::from_file_repr(file)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let file = DistributionFile {
            variables: self.variables.clone(),
            pmf: self
                .pmf
                .iter()
                .map(|(o, p)| PmfEntry {
                    outcome: o
                        .iter()
                        .zip(&self.variables)
                        .map(|(&i, v)| v.alphabet[i].clone())
                        .collect(),
                    p: serde_json::Value::String(format_rational(p)),
                })
                .collect(),
        };
        serde_json::to_value(file).expect("serializable")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json_str(&text)
    }
}

/// Shannon entropy (bits) of a probability list; zeros are skipped.
///
/// Exact when every probability is a power of two; otherwise a dyadic
/// approximation within `2^-(precision - 1)` of the true value, where the
/// precision comes from [`rational::precision_bits`].
pub fn entropy_of_probabilities<'a>(probs: impl IntoIterator<Item = &'a Rational>) -> Entropy {
    entropy_with_cache(probs, &mut TermCache::default())
}

/// Memo of `p log2 p` terms, reusable across many entropy evaluations over
/// the same probabilities.
#[derive(Clone, Debug, Default)]
pub struct TermCache {
    bits: u32,
    terms: HashMap<Rational, (Rational, bool)>,
}

/// As [`entropy_of_probabilities`], reusing `cache` for the log terms.
pub fn entropy_with_cache<'a>(probs: impl IntoIterator<Item = &'a Rational>, cache: &mut TermCache) -> Entropy {
    let bits = rational::precision_bits();
    if cache.bits != bits {
        cache.terms.clear();
        cache.bits = bits;
    }
    let mut sum = Rational::zero();
    let mut exact = true;
    for p in probs {
        if p.is_zero() {
            continue;
        }
        let (term, e) = cache
            .terms
            .entry(p.clone())
            .or_insert_with(|| match rational::exact_log2(p) {
                Some(k) => (p * rational::int(k), true),
                None => (p * rational::log2_approx(p, bits + 8), false),
            });
        exact &= *e;
        sum -= &*term;
    }
    if exact {
        Entropy { bits: sum, exact }
    } else {
        let bits = rational::round_dyadic(&sum, bits);
        Entropy {
            bits: if bits.is_negative() { Rational::zero() } else { bits },
            exact,
        }
    }
}

/// Joint entropy of the variables in `subset`.
pub fn entropy_of(dist: &JointDistribution, subset: SubsetIndex) -> Result<Entropy> {
    if subset.is_empty() {
        return Err(Error::domain("entropy of the empty set is not a coordinate"));
    }
    if !subset.is_subset_of(dist.ground().full()) {
        return Err(Error::domain("subset references variables outside the distribution"));
    }
    let m = dist.marginal(subset);
    Ok(entropy_of_probabilities(m.values()))
}

/// The full entropy vector of a distribution over all nonempty subsets.
pub fn entropy_vector_of(dist: &JointDistribution) -> EntropyVector {
    let ground = dist.ground();
    let mut exact = true;
    let values = (0..ground.coordinates())
        .map(|c| {
            let e = entropy_of(dist, SubsetIndex::from_coordinate(c)).expect("valid subset");
            exact &= e.exact;
            e.bits
        })
        .collect();
    EntropyVector::new(ground, values, exact).expect("entropies are nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn bits3() -> JointDistribution {
        let vars = (0..3)
            .map(|i| Variable { name: format!("b{i}"), alphabet: vec!["0".into(), "1".into()] })
            .collect();
        let outcomes = (0..8).map(|m| (0..3).map(|i| (m >> i) & 1).collect()).collect();
        JointDistribution::uniform_over(vars, outcomes).unwrap()
    }

    #[test]
    fn uniform_bit_has_one_bit() {
        let d = JointDistribution::single("X", &[ratio(1, 2), ratio(1, 2)]).unwrap();
        let e = entropy_of(&d, SubsetIndex(1)).unwrap();
        assert_eq!(e.bits, int(1));
        assert!(e.exact);
    }

    #[test]
    fn dyadic_three_atoms() {
        let d = JointDistribution::single("X", &[ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let e = entropy_of(&d, SubsetIndex(1)).unwrap();
        assert_eq!(e.bits, ratio(3, 2));
        assert!(e.exact);
    }

    #[test]
    fn iid_bits_entropy_is_cardinality() {
        let h = entropy_vector_of(&bits3());
        for c in 0..7 {
            let s = SubsetIndex::from_coordinate(c);
            assert_eq!(h.get(s), &int(s.len() as i64));
        }
        assert!(h.is_exact());
    }

    #[test]
    fn single_variable_vector_has_one_coordinate() {
        let d = JointDistribution::single("X", &[ratio(1, 3), ratio(2, 3)]).unwrap();
        let h = entropy_vector_of(&d);
        assert_eq!(h.values().len(), 1);
        assert!(!h.is_exact());
        let want = -(1.0f64 / 3.0) * (1.0f64 / 3.0).log2() - (2.0f64 / 3.0) * (2.0f64 / 3.0).log2();
        assert!((rational::to_f64(h.get(SubsetIndex(1))) - want).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_pmf() {
        assert!(JointDistribution::single("X", &[ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(JointDistribution::single("X", &[ratio(3, 2), ratio(-1, 2)]).is_err());
        let d = bits3();
        assert!(entropy_of(&d, SubsetIndex::EMPTY).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"variables":[{"name":"Y1","alphabet":["0","1"]},{"name":"Y2","alphabet":["a","b"]}],
            "pmf":[{"outcome":["0","a"],"p":"1/4"},{"outcome":["1","b"],"p":0.75}]}"#;
        let d = JointDistribution::from_json_str(text).unwrap();
        assert_eq!(d.support().len(), 2);
        let back = JointDistribution::from_json_value(d.to_json_value()).unwrap();
        assert_eq!(back, d);
        let bad = text.replace("0.75", "0.5");
        assert!(JointDistribution::from_json_str(&bad).is_err());
    }
}
