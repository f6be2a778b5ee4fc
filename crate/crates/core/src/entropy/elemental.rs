use num_traits::Signed;

use super::ground::SubsetIndex;
use super::vector::{EntropyVector, LinearFunctional};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Closed-form number of elemental inequalities on `n` variables.
pub fn elemental_count(n: usize) -> usize {
    if n == 1 {
        1
    } else {
        n + n * (n - 1) / 2 * (1usize << (n - 2))
    }
}

/// The elemental Shannon inequalities on `n` variables, each as a functional
/// required to be `>= 0`.
///
/// First the `n` monotonicity rows `h(N) − h(N∖{i})`, then for every pair
/// `i < j` and every `K ⊆ N∖{i,j}` (ascending bitmask) the row `I(i; j | K)`.
pub fn elemental_inequalities(n: usize) -> Result<Vec<LinearFunctional>> {
    if n == 0 {
        return Err(Error::domain("elemental inequalities need n >= 1"));
    }
    if n > super::ground::MAX_GROUND {
        return Err(Error::domain(format!("n = {n} exceeds the ground-set limit")));
    }
    let full = SubsetIndex(((1u64 << n) - 1) as u32);
    let mut out = Vec::with_capacity(elemental_count(n));
    for i in 0..n {
        let rest = full - SubsetIndex::singleton(i);
        out.push(LinearFunctional::conditional(SubsetIndex::singleton(i), rest));
    }
    for i in 0..n {
        for j in i + 1..n {
            let others = full - SubsetIndex::singleton(i) - SubsetIndex::singleton(j);
            // enumerate submasks of `others` in ascending order
            let mut k = 0u32;
            loop {
                if k & !others.0 == 0 {
                    out.push(LinearFunctional::mutual(
                        SubsetIndex::singleton(i),
                        SubsetIndex::singleton(j),
                        SubsetIndex(k),
                    ));
                }
                if k == others.0 {
                    break;
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// Outcome of [`is_polymatroid`]: the violated elemental rows with their
/// (negative) values.
#[derive(Clone, Debug)]
pub struct PolymatroidCheck {
    pub violated: Vec<(LinearFunctional, Rational)>,
}

impl PolymatroidCheck {
    pub fn holds(&self) -> bool {
        self.violated.is_empty()
    }
}

pub fn is_polymatroid(h: &EntropyVector) -> PolymatroidCheck {
    let rows = elemental_inequalities(h.ground().len()).expect("ground set is nonempty");
    let violated = rows
        .into_iter()
        .filter_map(|f| {
            let v = f.eval(h);
            v.is_negative().then_some((f, v))
        })
        .collect();
    PolymatroidCheck { violated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::GroundSet;
    use crate::rational::int;

    /// Independent enumeration: all (i, j, K) triples with K drawn from the
    /// full power set and filtered, rather than submask iteration.
    fn brute_force_count(n: usize) -> usize {
        let mut count = n;
        for i in 0..n {
            for j in i + 1..n {
                count += (0u32..1 << n).filter(|k| k >> i & 1 == 0 && k >> j & 1 == 0).count();
            }
        }
        count
    }

    #[test]
    fn counts_match_hand_enumeration() {
        assert_eq!(elemental_inequalities(2).unwrap().len(), 3);
        assert_eq!(elemental_inequalities(3).unwrap().len(), 9);
        assert_eq!(elemental_inequalities(1).unwrap().len(), 1);
        for n in 2..=8 {
            assert_eq!(elemental_count(n), brute_force_count(n));
        }
        assert!(elemental_inequalities(0).is_err());
    }

    #[test]
    fn rows_are_distinct() {
        let rows = elemental_inequalities(5).unwrap();
        let set: std::collections::BTreeSet<_> = rows.iter().collect();
        assert_eq!(set.len(), rows.len());
    }

    #[test]
    fn detects_superadditive_vector() {
        let g = GroundSet::new(["A", "B"]).unwrap();
        let h = EntropyVector::new(g.clone(), vec![int(1), int(1), int(3)], true).unwrap();
        let check = is_polymatroid(&h);
        assert!(!check.holds());
        assert_eq!(check.violated.len(), 1);
        assert!(is_polymatroid(&EntropyVector::zeros(g)).holds());
    }
}
