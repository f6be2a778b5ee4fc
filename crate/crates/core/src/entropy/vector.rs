use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use super::ground::{GroundSet, SubsetIndex};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Values `h(α)` for every nonempty subset `α` of a ground set.
/// `h(∅) = 0` is implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyVector {
    ground: GroundSet,
    values: Vec<Rational>,
    exact: bool,
}

impl EntropyVector {
    pub fn new(ground: GroundSet, values: Vec<Rational>, exact: bool) -> Result<Self> {
        if values.len() != ground.coordinates() {
            return Err(Error::domain(format!(
                "entropy vector has {} values, expected {}",
                values.len(),
                ground.coordinates()
            )));
        }
        if let Some(c) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::domain(format!(
                "negative entropy at {{{}}}",
                ground.display(SubsetIndex::from_coordinate(c))
            )));
        }
        Ok(EntropyVector { ground, values, exact })
    }

    pub fn zeros(ground: GroundSet) -> Self {
        let values = vec![Rational::zero(); ground.coordinates()];
        EntropyVector { ground, values, exact: true }
    }

    pub fn from_fn(ground: GroundSet, exact: bool, f: impl Fn(SubsetIndex) -> Rational) -> Result<Self> {
        let values = (0..ground.coordinates()).map(|c| f(SubsetIndex::from_coordinate(c))).collect();
        Self::new(ground, values, exact)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// True when every value is exact rather than a dyadic approximation.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `h(s)`; the empty set maps to zero.
    pub fn get(&self, s: SubsetIndex) -> &Rational {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        if s.is_empty() {
            ZERO.get_or_init(Rational::zero)
        } else {
            &self.values[s.coordinate()]
        }
    }

    pub fn get_named<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<&Rational> {
        Ok(self.get(self.ground.subset(names)?))
    }
}

/// `h(A | B) = h(A ∪ B) − h(B)`.
pub fn eval_conditional(h: &EntropyVector, a: SubsetIndex, b: SubsetIndex) -> Rational {
    h.get(a | b) - h.get(b)
}

/// `I(A; B | C) = h(A ∪ C) + h(B ∪ C) − h(A ∪ B ∪ C) − h(C)`.
pub fn eval_mutual(h: &EntropyVector, a: SubsetIndex, b: SubsetIndex, c: SubsetIndex) -> Rational {
    h.get(a | c) + h.get(b | c) - h.get(a | b | c) - h.get(c)
}

/// A linear combination of joint entropies, `Σ c_α h(α)`.
///
/// Terms are kept sorted by subset with zero coefficients and empty-set
/// terms removed, so structural equality is semantic equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearFunctional {
    terms: Vec<(SubsetIndex, Rational)>,
}

impl LinearFunctional {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (SubsetIndex, Rational)>) -> Self {
        let mut acc: BTreeMap<SubsetIndex, Rational> = BTreeMap::new();
        for (s, c) in terms {
            if s.is_empty() {
                continue;
            }
            *acc.entry(s).or_insert_with(Rational::zero) += c;
        }
        LinearFunctional {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// `h(A)`.
    pub fn entropy(a: SubsetIndex) -> Self {
        Self::from_terms([(a, Rational::from_integer(1.into()))])
    }

    /// `h(A | B)`.
    pub fn conditional(a: SubsetIndex, b: SubsetIndex) -> Self {
        let one = Rational::from_integer(1.into());
        Self::from_terms([(a | b, one.clone()), (b, -one)])
    }

    /// `I(A; B | C)`.
    pub fn mutual(a: SubsetIndex, b: SubsetIndex, c: SubsetIndex) -> Self {
        let one = Rational::from_integer(1.into());
        Self::from_terms([
            (a | c, one.clone()),
            (b | c, one.clone()),
            (a | b | c, -one.clone()),
            (c, -one),
        ])
    }

    pub fn terms(&self) -> &[(SubsetIndex, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> SubsetIndex {
        self.terms.iter().fold(SubsetIndex::EMPTY, |m, (s, _)| m | *s)
    }

    pub fn add(&self, other: &LinearFunctional) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn sub(&self, other: &LinearFunctional) -> Self {
        self.add(&other.scale(&Rational::from_integer((-1).into())))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(s, c)| (*s, c * k)))
    }

    /// Re-indexes every subset through `f` (used to map between ground sets).
    pub fn map_subsets(&self, f: impl Fn(SubsetIndex) -> SubsetIndex) -> Self {
        Self::from_terms(self.terms.iter().map(|(s, c)| (f(*s), c.clone())))
    }

    pub fn eval(&self, h: &EntropyVector) -> Rational {
        self.eval_with(|s| h.get(s).clone())
    }

    pub fn eval_with(&self, value: impl Fn(SubsetIndex) -> Rational) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (s, c)| acc + c * value(*s))
    }

    pub fn eval_f64(&self, value: impl Fn(SubsetIndex) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(s, c)| crate::rational::to_f64(c) * value(*s))
            .sum()
    }

    /// Renders as `c*h{A,B} ...` using `ground` for labels.
    pub fn render(&self, ground: &GroundSet) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let coeff = format_rational(c);
            let coeff = if c.is_negative() || k == 0 { coeff } else { format!("+{coeff}") };
            out.push_str(&format!("{coeff}*h{{{}}}", ground.names_of(*s).join(",")));
        }
        out
    }
}

impl fmt::Display for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}*h[{:#b}]", format_rational(c), s.bits())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn two_var(h1: i64, h2: i64, h12: i64) -> EntropyVector {
        let g = GroundSet::new(["A", "B"]).unwrap();
        EntropyVector::new(g, vec![int(h1), int(h2), int(h12)], true).unwrap()
    }

    #[test]
    fn conditional_and_mutual() {
        let h = two_var(2, 2, 3);
        let a = SubsetIndex(1);
        let b = SubsetIndex(2);
        assert_eq!(eval_mutual(&h, a, b, SubsetIndex::EMPTY), int(1));
        assert_eq!(eval_conditional(&h, a, b), int(1));
        assert_eq!(eval_conditional(&h, a, a), int(0));
        assert_eq!(LinearFunctional::mutual(a, b, SubsetIndex::EMPTY).eval(&h), int(1));
    }

    #[test]
    fn independent_bits_have_zero_mutual_information() {
        let h = two_var(1, 1, 2);
        assert_eq!(eval_mutual(&h, SubsetIndex(1), SubsetIndex(2), SubsetIndex::EMPTY), int(0));
    }

    #[test]
    fn functional_normalises() {
        let a = SubsetIndex(1);
        let f = LinearFunctional::conditional(a, a);
        assert!(f.is_zero());
        let g = LinearFunctional::entropy(a).add(&LinearFunctional::entropy(a));
        assert_eq!(g.terms(), &[(a, int(2))]);
        let ground = GroundSet::new(["A", "B"]).unwrap();
        assert_eq!(
            LinearFunctional::conditional(a, SubsetIndex(2)).render(&ground),
            "-1*h{B} +1*h{A,B}"
        );
    }

    #[test]
    fn rejects_negative_or_short_vectors() {
        let g = GroundSet::new(["A"]).unwrap();
        assert!(EntropyVector::new(g.clone(), vec![int(-1)], true).is_err());
        assert!(EntropyVector::new(g, vec![], true).is_err());
    }
}
