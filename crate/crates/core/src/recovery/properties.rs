//! Checks of the structural properties of an indicator family, evaluated
//! with the brute-force oracle.

use serde::Serialize;

use super::family::{FamilyOracle, IndicatorFamily};
use super::recover::Probe;
use crate::entropy::JointDistribution;
use crate::error::Result;
use crate::rational::to_f64;

/// Largest alphabet accepted by [`verify_properties`]; the subset check is
/// quadratic in the family size.
pub const MAX_VERIFY_ATOMS: usize = 8;

/// One failed check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Property number, 1 to 5.
    pub property: u8,
    pub detail: String,
}

/// Outcome of all five property checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyReport {
    pub n: usize,
    pub violations: Vec<Violation>,
    /// Non-unique minimisers and similar ties; informational.
    pub ties: Vec<String>,
    /// Number of individual inequalities evaluated, per property.
    pub checked: [usize; 5],
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, property: u8) -> Vec<&Violation> {
        self.violations.iter().filter(|v| v.property == property).collect()
    }
}

struct Checker<'a> {
    family: &'a IndicatorFamily,
    probe: Probe<'a>,
    report: PropertyReport,
}

impl Checker<'_> {
    fn fail(&mut self, property: u8, detail: String) {
        self.report.violations.push(Violation { property, detail });
    }

    fn singleton(&self, k: usize) -> usize {
        self.family.index_of(&[k]).expect("singleton member")
    }

    fn name(&self, a: usize) -> String {
        self.family.member_id(a)
    }

    fn distinct(&mut self) -> Result<()> {
        let m = self.family.len();
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                self.report.checked[0] += 1;
                if !self.probe.positive(&self.probe.cond(&[a], &[b])?) {
                    self.fail(1, format!("H({} | {}) = 0", self.name(a), self.name(b)));
                }
            }
        }
        Ok(())
    }

    fn subset(&mut self) -> Result<()> {
        let m = self.family.len();
        for a in 0..m {
            let sa = self.family.member_set(a);
            for b in 0..m {
                let sb = self.family.member_set(b);
                let given: Vec<usize> = sb.iter().map(|&k| self.singleton(k)).collect();
                let positive = self.probe.positive(&self.probe.cond(&[a], &given)?);
                let outside = sa.iter().any(|k| !sb.contains(k));
                self.report.checked[1] += 1;
                if positive != outside {
                    self.fail(
                        2,
                        format!(
                            "H({} | singletons of {}) {} 0",
                            self.name(a),
                            self.name(b),
                            if positive { ">" } else { "=" }
                        ),
                    );
                }
            }
        }
        Ok(())
    }

    /// Chain of singletons over `{2..n}` without `max(a)`, in increasing order.
    fn partition(&mut self) -> Result<()> {
        let n = self.family.n();
        for a in 0..self.family.len() {
            let top = *self.family.member_set(a).last().expect("nonempty member");
            let mut known = vec![a];
            for k in (2..=n).filter(|&k| k != top) {
                let b = self.singleton(k);
                self.report.checked[2] += 1;
                if !self.probe.positive(&self.probe.cond(&[b], &known)?) {
                    self.fail(3, format!("chain for {} stalls at {}", self.name(a), self.name(b)));
                    break;
                }
                known.push(b);
            }
        }
        Ok(())
    }

    fn smallest_atom(&mut self) -> Result<()> {
        let n = self.family.n();
        let last = self.singleton(n);
        let target = self.probe.h(&[last])?;
        let mut tied = Vec::new();
        for a in 0..self.family.len() {
            let h = self.probe.h(&[a])?;
            self.report.checked[3] += 1;
            match self.probe.compare(&h, &target) {
                std::cmp::Ordering::Less => {
                    self.fail(4, format!("H({}) < H({})", self.name(a), self.name(last)))
                }
                std::cmp::Ordering::Equal if a != last => tied.push(self.name(a)),
                _ => {}
            }
        }
        if !tied.is_empty() {
            self.report.ties.push(format!(
                "minimum entropy {:.9} also attained by {}",
                to_f64(&target),
                tied.join(", ")
            ));
        }
        Ok(())
    }

    fn singleton_steps(&mut self) -> Result<()> {
        let n = self.family.n();
        for i in 2..n {
            let xi = self.singleton(i);
            let after: Vec<usize> = (i + 1..=n).map(|k| self.singleton(k)).collect();
            let ci = self.probe.cond(&[xi], &after)?;
            let hi = self.probe.h(&[xi])?;
            self.report.checked[4] += 1;
            if !self.probe.positive(&ci) {
                self.fail(5, format!("H({} | later singletons) = 0", self.name(xi)));
            }
            for a in 0..self.family.len() {
                let ca = self.probe.cond(&[a], &after)?;
                if !self.probe.positive(&ca) {
                    continue;
                }
                self.report.checked[4] += 2;
                if self.probe.compare(&ci, &ca).is_gt() {
                    self.fail(5, format!("conditional of {} exceeds that of {}", self.name(xi), self.name(a)));
                }
                if self.probe.compare(&hi, &self.probe.h(&[a])?).is_gt() {
                    self.fail(5, format!("H({}) > H({})", self.name(xi), self.name(a)));
                }
            }
        }
        Ok(())
    }
}

/// Evaluates properties 1 to 5 of the indicator family of `dist`.
pub fn verify_properties(dist: &JointDistribution) -> Result<PropertyReport> {
    let family = IndicatorFamily::new(dist)?;
    verify_family(&family)
}

/// As [`verify_properties`], for an already built family.
pub fn verify_family(family: &IndicatorFamily) -> Result<PropertyReport> {
    if family.n() > MAX_VERIFY_ATOMS {
        return Err(crate::Error::Precondition(format!("property checks support n <= {MAX_VERIFY_ATOMS}")));
    }
    let oracle = FamilyOracle::new(family);
    let mut c = Checker {
        family,
        probe: Probe::new(&oracle),
        report: PropertyReport { n: family.n(), ..Default::default() },
    };
    c.distinct()?;
    c.subset()?;
    c.partition()?;
    c.smallest_atom()?;
    c.singleton_steps()?;
    Ok(c.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn report(p: &[(i64, i64)]) -> PropertyReport {
        let probs: Vec<_> = p.iter().map(|&(a, b)| ratio(a, b)).collect();
        verify_family(&IndicatorFamily::from_probabilities(&probs).unwrap()).unwrap()
    }

    #[test]
    fn five_three_two() {
        let r = report(&[(5, 10), (3, 10), (2, 10)]);
        assert!(r.holds(), "{:?}", r.violations);
        assert!(r.ties.is_empty());
        assert!(r.checked.iter().all(|&c| c > 0));
    }

    #[test]
    fn uniform_reports_tie() {
        let r = report(&[(1, 3), (1, 3), (1, 3)]);
        assert!(r.holds(), "{:?}", r.violations);
        assert_eq!(r.ties.len(), 1);
    }

    #[test]
    fn two_atoms() {
        let r = report(&[(7, 10), (3, 10)]);
        assert!(r.holds());
        assert_eq!(r.checked[0], 0);
        assert_eq!(r.checked[2], 0);
        assert!(r.checked[3] > 0);
    }

    #[test]
    fn from_distribution_file_shape() {
        let d = JointDistribution::single("X", &[ratio(1, 5), ratio(1, 2), ratio(3, 10)]).unwrap();
        assert!(verify_properties(&d).unwrap().holds());
    }

    #[test]
    fn five_atoms() {
        let r = report(&[(1, 3), (1, 4), (1, 6), (1, 8), (1, 8)]);
        assert!(r.holds(), "{:?}", r.violations);
    }
}
