//! Several variables: the indicator family over the flattened product space,
//! and recovery of the joint pmf up to per-axis relabeling.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::family::{EntropyOracle, IndicatorFamily};
use super::recover::{identify, Probe, TOLERANCE};
use crate::entropy::{binary_entropy, Entropy, JointDistribution, TermCache};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Largest flattened alphabet; the family has `2^(N-1) - 1` members.
pub const MAX_MULTIVAR_ATOMS: usize = 12;

/// Indicator family of the flattened product of several variables.
#[derive(Clone, Debug)]
pub struct MultivarFamily {
    pub sizes: Vec<usize>,
    /// Coordinates of each atom, in the family's (descending) atom order.
    pub coords: Vec<Vec<usize>>,
    pub family: IndicatorFamily,
}

/// Flattens a positive joint pmf over `X_1..X_m` into one variable on the
/// product space and builds its indicator family.
pub fn build_multivar_indicators(dist: &JointDistribution) -> Result<MultivarFamily> {
    let sizes: Vec<usize> = dist.variables().iter().map(|v| v.alphabet.len()).collect();
    if sizes.len() > 1 && sizes.iter().any(|&s| s < 3) {
        return Err(Error::Precondition("every variable needs an alphabet of at least 3".into()));
    }
    let total: usize = sizes.iter().product();
    if total > MAX_MULTIVAR_ATOMS {
        return Err(Error::Precondition(format!(
            "the product space has {total} atoms; at most {MAX_MULTIVAR_ATOMS} are supported"
        )));
    }
    if dist.support().len() != total {
        return Err(Error::domain("the joint pmf must be positive on the whole product space"));
    }
    let mut atoms: Vec<(Rational, Vec<usize>)> = dist.support().iter().map(|(o, p)| (p.clone(), o.clone())).collect();
    atoms.sort_by(|a, b| b.0.cmp(&a.0));
    let labels = atoms
        .iter()
        .map(|(_, o)| o.iter().enumerate().map(|(i, &v)| dist.variables()[i].alphabet[v].as_str()).join(","))
        .collect();
    let family = IndicatorFamily::build(atoms.iter().map(|a| a.0.clone()).collect(), labels)?;
    Ok(MultivarFamily { sizes, coords: atoms.into_iter().map(|a| a.1).collect(), family })
}

/// Oracle over a [`MultivarFamily`] that also answers joint queries with
/// the axis variables `X_i`. Member ids are opaque and shuffled.
pub struct MultivarOracle<'a> {
    source: &'a MultivarFamily,
    order: Vec<usize>,
    cache: RefCell<TermCache>,
}

impl<'a> MultivarOracle<'a> {
    pub fn new(source: &'a MultivarFamily) -> Self {
        MultivarOracle { source, order: (0..source.family.len()).collect(), cache: RefCell::default() }
    }

    pub fn shuffled(source: &'a MultivarFamily, rng: &mut impl Rng) -> Self {
        let mut order: Vec<usize> = (0..source.family.len()).collect();
        order.shuffle(rng);
        MultivarOracle { source, order, cache: RefCell::default() }
    }
}

impl EntropyOracle for MultivarOracle<'_> {
    fn member_ids(&self) -> Vec<String> {
        (0..self.order.len()).map(|i| format!("B{}", i + 1)).collect()
    }

    fn entropy(&self, members: &[usize]) -> Result<Entropy> {
        self.axis_entropy(&[], members)
    }

    fn axis_entropy(&self, axes: &[usize], members: &[usize]) -> Result<Entropy> {
        if let Some(&a) = axes.iter().find(|&&a| a >= self.source.sizes.len()) {
            return Err(Error::domain(format!("no axis {a}")));
        }
        let f = &self.source.family;
        let masks: Vec<u32> = members.iter().map(|&i| f.mask(self.order[i])).collect();
        Ok(f.entropy_by(&mut self.cache.borrow_mut(), |k| {
            let axis: Vec<usize> = axes.iter().map(|&a| self.source.coords[k][a]).collect();
            let bits: Vec<bool> = masks.iter().map(|m| m >> k & 1 == 1).collect();
            (axis, bits)
        }))
    }
}

/// Joint pmf recovered from entropies, over class labels per axis.
#[derive(Clone, Debug, Serialize)]
pub struct MultivarRecovery {
    pub sizes: Vec<usize>,
    /// `(coordinates, probability)` for each atom, largest first.
    pub atoms: Vec<(Vec<usize>, f64)>,
    pub exact: bool,
    pub queries: usize,
}

impl MultivarRecovery {
    pub fn probability(&self, coords: &[usize]) -> Option<f64> {
        self.atoms.iter().find(|(c, _)| c == coords).map(|a| a.1)
    }
}

/// Recovers a joint pmf over axes of the given sizes.
///
/// The atom probabilities come from the single-variable recovery on the
/// flattened space. Axis structure needs joint queries with the axis
/// variables: a member that is a function of `X_i` is an indicator of a
/// union of `X_i`-classes, and the minimal such members are the single-class
/// events `{X_i = v}`, which anchor the coordinates of every atom.
pub fn recover_multivar(oracle: &dyn EntropyOracle, sizes: &[usize]) -> Result<MultivarRecovery> {
    let n: usize = sizes.iter().product();
    let probe = Probe::new(oracle);
    let id = identify(&probe, n)?;
    if sizes.len() == 1 {
        return Ok(MultivarRecovery {
            sizes: sizes.to_vec(),
            atoms: id.probabilities.iter().enumerate().map(|(k, &p)| (vec![k], p)).collect(),
            exact: probe.exact(),
            queries: probe.queries(),
        });
    }
    if sizes.iter().any(|&s| s < 3) {
        return Err(Error::Precondition("every variable needs an alphabet of at least 3".into()));
    }
    let m = oracle.member_ids().len();

    // atom set of a member, from the identified atom indicators
    let atom_set = |e: usize| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for k in 1..n {
            let given: Vec<usize> =
                id.indicators.iter().enumerate().filter(|&(j, _)| j + 1 != k).map(|(_, &b)| b).collect();
            if probe.positive(&probe.cond(&[e], &given)?) {
                out.push(k);
            }
        }
        Ok(out)
    };

    let mut coords = vec![Vec::with_capacity(sizes.len()); n];
    for (axis, &size) in sizes.iter().enumerate() {
        let base = oracle.axis_entropy(&[axis], &[])?;
        let mut exact = base.exact;
        let mut sets = Vec::new();
        for e in 0..m {
            let joint = oracle.axis_entropy(&[axis], &[e])?;
            exact &= joint.exact;
            let d = &joint.bits - &base.bits;
            let zero = if exact { d.is_zero() } else { to_f64(&d).abs() <= TOLERANCE };
            if zero {
                sets.push(atom_set(e)?);
            }
        }
        let mut classes: Vec<Vec<usize>> = sets
            .iter()
            .filter(|s| !s.is_empty() && !sets.iter().any(|t| t.len() < s.len() && t.iter().all(|k| s.contains(k))))
            .cloned()
            .collect();
        classes.sort();
        classes.dedup();
        let step = format!("axis {}", axis + 1);
        if classes.len() != size - 1 {
            return Err(Error::inconsistent(
                step,
                format!("{} single-value events found, {} expected", classes.len(), size - 1),
            ));
        }
        let mut label = vec![0usize; n];
        for (c, class) in classes.iter().enumerate() {
            for &k in class {
                if label[k] != 0 {
                    return Err(Error::inconsistent(step, "single-value events overlap"));
                }
                label[k] = c + 1;
            }
        }
        for k in 0..n {
            coords[k].push(label[k]);
        }
        // the recovered marginal must reproduce H(X_i)
        let mut marginal = vec![0.0; size];
        for k in 0..n {
            marginal[label[k]] += id.probabilities[k];
        }
        let h: f64 = marginal.iter().map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 }).sum();
        if (h - to_f64(&base.bits)).abs() > 1e-6 {
            return Err(Error::inconsistent(step, "recovered marginal does not match H of the axis"));
        }
    }
    if coords.iter().unique().count() != n {
        return Err(Error::inconsistent("axes", "two atoms share all coordinates"));
    }
    Ok(MultivarRecovery {
        sizes: sizes.to_vec(),
        atoms: coords.into_iter().zip(id.probabilities).collect(),
        exact: probe.exact(),
        queries: probe.queries(),
    })
}

/// Per-axis relabelings mapping a recovery onto a known distribution.
#[derive(Clone, Debug, Serialize)]
pub struct AxisAlignment {
    /// `sigma[i][c]` is the value index of `X_i` for recovered class `c`.
    pub sigma: Vec<Vec<usize>>,
    /// Largest atom-wise difference under `sigma`.
    pub max_error: f64,
    /// Number of relabelings that match; 1 when the alignment is unique.
    pub matches: usize,
}

impl AxisAlignment {
    /// Re-checks the alignment atom by atom.
    pub fn verify(&self, rec: &MultivarRecovery, dist: &JointDistribution) -> bool {
        error_under(&self.sigma, rec, &pmf(dist)) <= TOLERANCE
    }
}

fn pmf(dist: &JointDistribution) -> HashMap<Vec<usize>, f64> {
    dist.support().iter().map(|(o, p)| (o.clone(), to_f64(p))).collect()
}

fn error_under(sigma: &[Vec<usize>], rec: &MultivarRecovery, target: &HashMap<Vec<usize>, f64>) -> f64 {
    rec.atoms
        .iter()
        .map(|(c, p)| {
            let o: Vec<usize> = c.iter().enumerate().map(|(i, &v)| sigma[i][v]).collect();
            (target.get(&o).copied().unwrap_or(0.0) - p).abs()
        })
        .fold(0.0, f64::max)
}

/// Searches all per-axis permutations for one under which the recovered
/// pmf equals `dist` within `1e-9` per atom.
pub fn align_axes(rec: &MultivarRecovery, dist: &JointDistribution) -> Result<AxisAlignment> {
    let sizes: Vec<usize> = dist.variables().iter().map(|v| v.alphabet.len()).collect();
    if sizes != rec.sizes {
        return Err(Error::domain("alphabet sizes differ"));
    }
    let target = pmf(dist);
    let mut best: Option<AxisAlignment> = None;
    let mut matches = 0;
    for sigma in sizes.iter().map(|&s| (0..s).permutations(s)).multi_cartesian_product() {
        let err = error_under(&sigma, rec, &target);
        if err <= TOLERANCE {
            matches += 1;
            if best.as_ref().map_or(true, |b| err < b.max_error) {
                best = Some(AxisAlignment { sigma, max_error: err, matches: 0 });
            }
        }
    }
    let mut a = best.ok_or_else(|| Error::inconsistent("alignment", "no per-axis relabeling matches"))?;
    a.matches = matches;
    Ok(a)
}

/// Marginal of each axis in a recovery, for reporting.
pub fn axis_marginals(rec: &MultivarRecovery) -> Vec<BTreeMap<usize, f64>> {
    (0..rec.sizes.len())
        .map(|i| {
            let mut m = BTreeMap::new();
            for (c, p) in &rec.atoms {
                *m.entry(c[i]).or_insert(0.0) += p;
            }
            m
        })
        .collect()
}

/// Entropy of a recovered axis marginal in bits.
pub fn marginal_entropy(m: &BTreeMap<usize, f64>) -> f64 {
    m.values().map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 }).sum::<f64>().max(binary_entropy(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::Variable;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn var(name: &str, k: usize) -> Variable {
        Variable { name: name.into(), alphabet: (0..k).map(|i| i.to_string()).collect() }
    }

    fn product(p: &[Rational], q: &[Rational]) -> JointDistribution {
        let mut e = Vec::new();
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                e.push((vec![i, j], a * b));
            }
        }
        JointDistribution::new(vec![var("X1", p.len()), var("X2", q.len())], e).unwrap()
    }

    #[test]
    fn independent_product() {
        let p = [ratio(1, 2), ratio(1, 4), ratio(1, 4)];
        let d = product(&p, &p);
        let f = build_multivar_indicators(&d).unwrap();
        assert_eq!(f.family.len(), 255);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = MultivarOracle::shuffled(&f, &mut rng);
        let rec = recover_multivar(&o, &[3, 3]).unwrap();
        let a = align_axes(&rec, &d).unwrap();
        assert!(a.verify(&rec, &d));
        // swapping the two quarter values on either axis also matches
        assert_eq!(a.matches, 4);
    }

    #[test]
    fn correlated_alignment_is_unique() {
        let w = [20, 3, 7, 11, 5, 13, 2, 17, 9];
        let entries = (0..9).map(|k| (vec![k / 3, k % 3], ratio(w[k], 87))).collect();
        let d = JointDistribution::new(vec![var("A", 3), var("B", 3)], entries).unwrap();
        let f = build_multivar_indicators(&d).unwrap();
        let rec = recover_multivar(&MultivarOracle::new(&f), &[3, 3]).unwrap();
        let a = align_axes(&rec, &d).unwrap();
        assert_eq!(a.matches, 1);
        assert!(a.max_error <= 1e-9);
    }

    #[test]
    fn single_axis_matches_single_variable_recovery() {
        let probs = [ratio(1, 5), ratio(1, 2), ratio(3, 10)];
        let d = JointDistribution::single("X", &probs).unwrap();
        let f = build_multivar_indicators(&d).unwrap();
        let rec = recover_multivar(&MultivarOracle::new(&f), &[3]).unwrap();
        let fam = IndicatorFamily::new(&d).unwrap();
        let single = super::super::recover_distribution(&super::super::FamilyOracle::new(&fam), 3).unwrap();
        let got: Vec<f64> = rec.atoms.iter().map(|a| a.1).collect();
        assert_eq!(got, single.probabilities);
    }

    #[test]
    fn small_axis_rejected() {
        let p = [ratio(1, 2), ratio(1, 2)];
        let q = [ratio(1, 2), ratio(1, 4), ratio(1, 4)];
        assert!(matches!(build_multivar_indicators(&product(&p, &q)), Err(Error::Precondition(_))));
    }

    #[test]
    fn wrong_target_has_no_alignment() {
        let p = [ratio(1, 2), ratio(1, 4), ratio(1, 4)];
        let q = [ratio(1, 3), ratio(1, 3), ratio(1, 3)];
        let d = product(&p, &p);
        let f = build_multivar_indicators(&d).unwrap();
        let rec = recover_multivar(&MultivarOracle::new(&f), &[3, 3]).unwrap();
        assert!(align_axes(&rec, &product(&p, &q)).is_err());
    }
}
