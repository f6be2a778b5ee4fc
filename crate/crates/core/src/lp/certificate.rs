use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::solve::{FeasibilityResult, MinimizeResult};
use super::system::{LinearSystem, Relation};
use crate::entropy::{EntropyVector, LinearFunctional, SubsetIndex};
use crate::rational::Rational;

/// One multiplier per constraint, applied to the constraint written as
/// `functional >= rhs` (a `<=` row is negated first). Inequality multipliers
/// are nonnegative; equality multipliers may take either sign.
///
/// Valid when the combined functional has no positive coefficient (all
/// coordinates are nonnegative) while the combined right-hand side is
/// positive: `0 >= Σ λ·functional >= Σ λ·rhs > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    #[serde(with = "multipliers_serde")]
    pub multipliers: Vec<Rational>,
}

mod multipliers_serde {
    use super::Rational;
    use crate::rational::{format_rational, parse_rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl FarkasCertificate {
    /// Indices of constraints with a nonzero multiplier.
    pub fn support(&self) -> Vec<usize> {
        self.multipliers
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks the certificate against `sys` by summing rows directly.
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        if self.multipliers.len() != sys.len() {
            return false;
        }
        let mut combined: BTreeMap<SubsetIndex, Rational> = BTreeMap::new();
        let mut rhs = Rational::zero();
        for (c, m) in sys.constraints().iter().zip(&self.multipliers) {
            if m.is_zero() {
                continue;
            }
            if c.relation != Relation::Eq && m.is_negative() {
                return false;
            }
            let sign = if c.relation == Relation::Le { -m.clone() } else { m.clone() };
            for (s, v) in c.functional.terms() {
                *combined.entry(*s).or_insert_with(Rational::zero) += v * &sign;
            }
            rhs += &c.rhs * &sign;
        }
        rhs.is_positive() && combined.values().all(|v| !v.is_positive())
    }
}

fn feasible(sys: &LinearSystem, h: &EntropyVector) -> bool {
    h.ground() == sys.ground()
        && h.values().iter().all(|v| !v.is_negative())
        && sys.constraints().iter().all(|c| c.is_satisfied_by(h))
}

/// Re-validates a solver result with exact arithmetic, independently of the
/// solver: witnesses are substituted into every row, certificates are summed.
pub fn verify_certificate(sys: &LinearSystem, result: &FeasibilityResult) -> bool {
    match result {
        FeasibilityResult::Feasible { witness } => feasible(sys, witness),
        FeasibilityResult::Infeasible { certificate } => certificate.verify(sys),
    }
}

/// Checks a [`MinimizeResult`]: the witness is feasible and attains the
/// reported value, an unbounded ray is a recession direction that lowers the
/// objective, or the certificate is valid.
pub fn verify_minimum(sys: &LinearSystem, objective: &LinearFunctional, result: &MinimizeResult) -> bool {
    match result {
        MinimizeResult::Optimal { value, witness } => feasible(sys, witness) && objective.eval(witness) == *value,
        MinimizeResult::Infeasible { certificate } => certificate.verify(sys),
        MinimizeResult::Unbounded { point, ray } => {
            if ray.len() != sys.ground().coordinates() || ray.iter().any(|v| v.is_negative()) {
                return false;
            }
            let at = |s: SubsetIndex| ray[s.coordinate()].clone();
            let homogeneous_ok = sys.constraints().iter().all(|c| {
                let v = c.functional.eval_with(at);
                c.relation.holds(&v, &Rational::zero())
            });
            feasible(sys, point) && homogeneous_ok && objective.eval_with(at).is_negative()
        }
    }
}
