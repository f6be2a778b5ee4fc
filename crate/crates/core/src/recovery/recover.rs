//! Recovery of a distribution, up to relabeling, from the entropies of an
//! indicator-family-like collection of variables.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use super::family::EntropyOracle;
use crate::entropy::binary_entropy_inverse;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Tolerance for comparisons when some oracle value is not exact.
pub const TOLERANCE: f64 = 1e-9;

/// A recovered pmf, largest atom first.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveredDistribution {
    pub probabilities: Vec<f64>,
    /// `provenance[i]` is the member identified as the indicator of atom
    /// `i + 1`; `None` for atom 1, whose probability is the remainder.
    pub provenance: Vec<Option<String>>,
    /// Whether every entropy used was exact.
    pub exact: bool,
    /// Number of distinct entropy queries made.
    pub queries: usize,
}

/// Caching view of an oracle with the comparisons used by the recovery.
pub(crate) struct Probe<'a> {
    oracle: &'a dyn EntropyOracle,
    cache: RefCell<HashMap<Vec<usize>, Rational>>,
    exact: RefCell<bool>,
}

impl<'a> Probe<'a> {
    pub(crate) fn new(oracle: &'a dyn EntropyOracle) -> Self {
        Probe { oracle, cache: RefCell::new(HashMap::new()), exact: RefCell::new(true) }
    }

    pub(crate) fn h(&self, members: &[usize]) -> Result<Rational> {
        let mut key = members.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return Ok(Rational::zero());
        }
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let e = self.oracle.entropy(&key)?;
        if !e.exact {
            *self.exact.borrow_mut() = false;
        }
        self.cache.borrow_mut().insert(key, e.bits.clone());
        Ok(e.bits)
    }

    /// `H(a | given)`.
    pub(crate) fn cond(&self, a: &[usize], given: &[usize]) -> Result<Rational> {
        let mut all = given.to_vec();
        all.extend_from_slice(a);
        Ok(self.h(&all)? - self.h(given)?)
    }

    pub(crate) fn exact(&self) -> bool {
        *self.exact.borrow()
    }

    pub(crate) fn queries(&self) -> usize {
        self.cache.borrow().len()
    }

    fn tol(&self) -> f64 {
        if self.exact() {
            0.0
        } else {
            TOLERANCE
        }
    }

    pub(crate) fn positive(&self, x: &Rational) -> bool {
        to_f64(x) > self.tol() || (self.exact() && *x > Rational::zero())
    }

    /// `Some(ordering)` of `x` against `y`, treating values within the
    /// tolerance as equal.
    pub(crate) fn compare(&self, x: &Rational, y: &Rational) -> std::cmp::Ordering {
        if self.exact() {
            return x.cmp(y);
        }
        let d = to_f64(&(x - y));
        if d.abs() <= TOLERANCE {
            std::cmp::Ordering::Equal
        } else if d < 0.0 {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    }
}

/// Result of the identification steps, in oracle indices.
pub(crate) struct Identified {
    pub probabilities: Vec<f64>,
    /// `indicators[i]` is the member for atom `i + 2`
    pub indicators: Vec<usize>,
}

/// Recovers the pmf of an `n`-ary variable from the entropies of its
/// `2^(n-1) - 1` auxiliaries.
///
/// Every gate is checked rather than assumed: the member count, pairwise
/// distinctness, binarity (through a chain of `n - 2` strictly increasing
/// joint entropies), a candidate at every identification step, and the
/// final ordering and positivity of the result.
pub fn recover_distribution(oracle: &dyn EntropyOracle, n: usize) -> Result<RecoveredDistribution> {
    let probe = Probe::new(oracle);
    let id = identify(&probe, n)?;
    let ids = oracle.member_ids();
    let mut provenance = vec![None];
    provenance.extend(id.indicators.iter().map(|&m| Some(ids[m].clone())));
    Ok(RecoveredDistribution { probabilities: id.probabilities, provenance, exact: probe.exact(), queries: probe.queries() })
}

pub(crate) fn identify(probe: &Probe, n: usize) -> Result<Identified> {
    if n < 2 {
        return Err(Error::Precondition("recovery needs n >= 2".into()));
    }
    if n > super::family::MAX_ATOMS {
        return Err(Error::Precondition(format!("recovery supports n <= {}", super::family::MAX_ATOMS)));
    }
    let m = probe.oracle.member_ids().len();
    let expected = (1usize << (n - 1)) - 1;
    if m != expected {
        return Err(Error::inconsistent(
            "support",
            format!("{m} members given; a positive {n}-ary variable has exactly {expected} distinct binary auxiliaries"),
        ));
    }
    let ids = probe.oracle.member_ids();

    // distinctness
    for a in 0..m {
        if !probe.positive(&probe.h(&[a])?) {
            return Err(Error::inconsistent("distinct", format!("{} is constant", ids[a])));
        }
        for b in a + 1..m {
            if !probe.positive(&probe.cond(&[a], &[b])?) || !probe.positive(&probe.cond(&[b], &[a])?) {
                return Err(Error::inconsistent(
                    "distinct",
                    format!("{} and {} determine one another", ids[a], ids[b]),
                ));
            }
        }
    }

    let singles: Vec<Rational> = (0..m).map(|a| probe.h(&[a])).collect::<Result<_>>()?;
    let better = |x: usize, y: usize, kx: &Rational, ky: &Rational| {
        use std::cmp::Ordering::*;
        match probe.compare(kx, ky) {
            Less => true,
            Greater => false,
            Equal => match probe.compare(&singles[x], &singles[y]) {
                Less => true,
                Greater => false,
                Equal => ids[x] < ids[y],
            },
        }
    };

    // indicator of the smallest atom
    let mut best = 0;
    for a in 1..m {
        if better(a, best, &singles[a], &singles[best]) {
            best = a;
        }
    }
    let mut chosen = vec![best];
    let mut probs_rev = vec![inverse(&singles[best], "atom n")?];

    for i in (2..n).rev() {
        let mut pick: Option<(usize, Rational)> = None;
        for a in 0..m {
            if chosen.contains(&a) {
                continue;
            }
            let c = probe.cond(&[a], &chosen)?;
            if !probe.positive(&c) {
                continue;
            }
            if pick.as_ref().map_or(true, |(b, cb)| better(a, *b, &c, cb)) {
                pick = Some((a, c));
            }
        }
        let Some((a, _)) = pick else {
            return Err(Error::inconsistent(format!("atom {i}"), "no member adds information to the chain"));
        };
        chosen.push(a);
        probs_rev.push(inverse(&singles[a], &format!("atom {i}"))?);
    }

    binary_gate(probe, n, &chosen)?;

    let rest: f64 = probs_rev.iter().sum();
    let p1 = 1.0 - rest;
    probs_rev.reverse();
    chosen.reverse();
    let mut probabilities = vec![p1];
    probabilities.extend(probs_rev);
    if p1 <= 0.0 {
        return Err(Error::inconsistent("atom 1", format!("remaining probability {p1} is not positive")));
    }
    if p1 < probabilities[1] - TOLERANCE {
        return Err(Error::inconsistent(
            "atom 1",
            format!("remaining probability {p1} is below the next atom {}", probabilities[1]),
        ));
    }
    if probabilities.iter().any(|&p| p <= 0.0) {
        return Err(Error::inconsistent("positivity", "an atom has zero probability"));
    }
    Ok(Identified { probabilities, indicators: chosen })
}

/// Binarity: every member must start a chain of `n - 2` further members with
/// strictly increasing joint entropy, which for `Supp(Y) <= n` forces it to
/// be binary. The chain is drawn from the identified atom indicators in
/// atom order, skipping those that add nothing; for a consistent input this
/// is the singleton chain that omits the member's largest atom. Any chain
/// found is a valid certificate, whatever produced it.
fn binary_gate(probe: &Probe, n: usize, indicators_rev: &[usize]) -> Result<()> {
    let ids = probe.oracle.member_ids();
    for a in 0..ids.len() {
        let mut chain = vec![a];
        for &b in indicators_rev.iter().rev() {
            if chain.len() == n - 1 {
                break;
            }
            if b != a && probe.positive(&probe.cond(&[b], &chain)?) {
                chain.push(b);
            }
        }
        if chain.len() < n - 1 {
            return Err(Error::inconsistent(
                "binary",
                format!("no chain of {} strictly increasing joint entropies starts at {}", n - 2, ids[a]),
            ));
        }
    }
    Ok(())
}

fn inverse(h: &Rational, step: &str) -> Result<f64> {
    binary_entropy_inverse(to_f64(h)).map_err(|e| Error::inconsistent(step, e.to_string()))
}

/// True when `p` and `q` are the same multiset within `1e-9` per atom.
pub fn check_permutation_equivalence(p: &[f64], q: &[f64]) -> bool {
    if p.len() != q.len() {
        return false;
    }
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    sorted(p).iter().zip(sorted(q).iter()).all(|(a, b)| (a - b).abs() <= TOLERANCE)
}

/// Sum of a recovered pmf, for the normalisation invariant.
pub fn total(p: &[f64]) -> f64 {
    p.iter().sum()
}
