use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of random variables in one ground set.
pub const MAX_GROUND: usize = 24;

/// A subset of the ground set, as a bitmask (bit `i` set means variable `i`
/// is in the subset).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubsetIndex(pub u32);

impl SubsetIndex {
    pub const EMPTY: SubsetIndex = SubsetIndex(0);

    pub fn singleton(i: usize) -> Self {
        SubsetIndex(1 << i)
    }

    pub fn from_members(members: impl IntoIterator<Item = usize>) -> Self {
        SubsetIndex(members.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetIndex) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// Position of this subset in a `2^n - 1` coordinate vector.
    pub fn coordinate(self) -> usize {
        debug_assert!(!self.is_empty());
        self.0 as usize - 1
    }

    pub fn from_coordinate(c: usize) -> Self {
        SubsetIndex(c as u32 + 1)
    }
}

impl BitOr for SubsetIndex {
    type Output = SubsetIndex;
    fn bitor(self, rhs: SubsetIndex) -> SubsetIndex {
        SubsetIndex(self.0 | rhs.0)
    }
}

impl BitAnd for SubsetIndex {
    type Output = SubsetIndex;
    fn bitand(self, rhs: SubsetIndex) -> SubsetIndex {
        SubsetIndex(self.0 & rhs.0)
    }
}

impl Sub for SubsetIndex {
    type Output = SubsetIndex;
    fn sub(self, rhs: SubsetIndex) -> SubsetIndex {
        SubsetIndex(self.0 & !rhs.0)
    }
}

/// Ordered, uniquely named random variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct GroundSet {
    names: Vec<String>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::domain("ground set must contain at least one variable"));
        }
        if names.len() > MAX_GROUND {
            return Err(Error::domain(format!(
                "ground set has {} variables, limit is {MAX_GROUND}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(|c| c.is_whitespace() || ",{}|()".contains(c)) {
                return Err(Error::domain(format!("invalid variable label {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::domain(format!("duplicate variable label {n:?}")));
            }
        }
        Ok(GroundSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Number of nonempty subsets, `2^n - 1`.
    pub fn coordinates(&self) -> usize {
        (1usize << self.names.len()) - 1
    }

    pub fn full(&self) -> SubsetIndex {
        SubsetIndex(((1u64 << self.names.len()) - 1) as u32)
    }

    pub fn subset<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<SubsetIndex> {
        let mut mask = SubsetIndex::EMPTY;
        for n in names {
            let n = n.as_ref();
            let i = self
                .index_of(n)
                .ok_or_else(|| Error::domain(format!("unknown variable {n:?}")))?;
            mask = mask | SubsetIndex::singleton(i);
        }
        Ok(mask)
    }

    pub fn names_of(&self, s: SubsetIndex) -> Vec<&str> {
        s.members().map(|i| self.names[i].as_str()).collect()
    }

    /// Space-separated member names, e.g. `"Z0 Z1"`.
    pub fn display(&self, s: SubsetIndex) -> String {
        self.names_of(s).join(" ")
    }

    pub fn contains_subset(&self, s: SubsetIndex) -> bool {
        s.is_subset_of(self.full())
    }
}

impl TryFrom<Vec<String>> for GroundSet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        GroundSet::new(v)
    }
}

impl From<GroundSet> for Vec<String> {
    fn from(g: GroundSet) -> Vec<String> {
        g.names
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_labels() {
        assert!(GroundSet::new(Vec::<String>::new()).is_err());
        assert!(GroundSet::new(["a", "a"]).is_err());
        assert!(GroundSet::new(["a b"]).is_err());
        assert!(GroundSet::new((0..25).map(|i| format!("v{i}"))).is_err());
    }

    #[test]
    fn subset_arithmetic() {
        let g = GroundSet::new(["X", "Y", "Z"]).unwrap();
        let xy = g.subset(["X", "Y"]).unwrap();
        assert_eq!(xy, SubsetIndex(0b011));
        assert_eq!(g.display(xy | SubsetIndex::singleton(2)), "X Y Z");
        assert_eq!((g.full() - xy).members().collect::<Vec<_>>(), vec![2]);
        assert_eq!(g.coordinates(), 7);
        assert!(g.subset(["W"]).is_err());
    }
}
