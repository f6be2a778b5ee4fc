use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::entropy::{EntropyVector, GroundSet, LinearFunctional, SubsetIndex};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `functional  relation  rhs`, with an optional human-readable label such
/// as `h(U1|Z0 Z1) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub functional: LinearFunctional,
    pub relation: Relation,
    pub rhs: Rational,
    pub label: Option<String>,
}

impl LinearConstraint {
    pub fn new(functional: LinearFunctional, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint { functional, relation, rhs, label: None }
    }

    pub fn ge_zero(functional: LinearFunctional) -> Self {
        Self::new(functional, Relation::Ge, Rational::zero())
    }

    pub fn eq(functional: LinearFunctional, rhs: Rational) -> Self {
        Self::new(functional, Relation::Eq, rhs)
    }

    pub fn le(functional: LinearFunctional, rhs: Rational) -> Self {
        Self::new(functional, Relation::Le, rhs)
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_satisfied_by(&self, h: &EntropyVector) -> bool {
        self.relation.holds(&self.functional.eval(h), &self.rhs)
    }

    /// Dump-format rendering, e.g. `1*h{Y1,U2} -1*h{U2} = 0`.
    pub fn render(&self, ground: &GroundSet) -> String {
        format!(
            "{} {} {}",
            self.functional.render(ground),
            self.relation,
            format_rational(&self.rhs)
        )
    }

    /// The label when present, otherwise the dump rendering.
    pub fn describe(&self, ground: &GroundSet) -> String {
        self.label.clone().unwrap_or_else(|| self.render(ground))
    }
}

/// Constraints (and an optional objective) over the coordinates of one
/// ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    ground: GroundSet,
    constraints: Vec<LinearConstraint>,
    objective: Option<LinearFunctional>,
}

impl LinearSystem {
    pub fn new(ground: GroundSet) -> Self {
        LinearSystem { ground, constraints: Vec::new(), objective: None }
    }

    pub fn with_constraints(ground: GroundSet, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let mut sys = Self::new(ground);
        for c in constraints {
            sys.push(c)?;
        }
        Ok(sys)
    }

    fn check_functional(&self, f: &LinearFunctional) -> Result<()> {
        let support = f.support();
        if !self.ground.contains_subset(support) {
            return Err(Error::domain(format!(
                "functional references variables outside ground set {}",
                self.ground
            )));
        }
        Ok(())
    }

    pub fn push(&mut self, c: LinearConstraint) -> Result<()> {
        self.check_functional(&c.functional)?;
        self.constraints.push(c);
        Ok(())
    }

    pub fn set_objective(&mut self, objective: LinearFunctional) -> Result<()> {
        self.check_functional(&objective)?;
        self.objective = Some(objective);
        Ok(())
    }

    /// Appends the constraints of `other`, which must share this ground set.
    pub fn extend_from(&mut self, other: &LinearSystem) -> Result<()> {
        if other.ground != self.ground {
            return Err(Error::domain("systems are over different ground sets"));
        }
        self.constraints.extend(other.constraints.iter().cloned());
        Ok(())
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> Option<&LinearFunctional> {
        self.objective.as_ref()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Indices of constraints violated by `h`.
    pub fn violations(&self, h: &EntropyVector) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied_by(h))
            .map(|(i, _)| i)
            .collect()
    }

    /// The subset coordinate for named variables, e.g. `["Y1", "U2"]`.
    pub fn subset<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<SubsetIndex> {
        self.ground.subset(names)
    }
}
