//! Gács–Körner common information of a pair of variables.

use std::collections::BTreeMap;

use crate::entropy::{entropy_of_probabilities, Entropy, JointDistribution, Variable};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// The maximal common function `K` of `X` and `Y`: the connected component
/// of an outcome in the bipartite graph linking every `x` and `y` that occur
/// together with positive probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkDecomposition {
    pub x: String,
    pub y: String,
    /// component index of each `x` label in the support
    pub x_component: BTreeMap<String, usize>,
    pub y_component: BTreeMap<String, usize>,
    pub components: usize,
    /// probability of each component
    pub weights: Vec<Rational>,
    pub entropy: Entropy,
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Computes the common part of a two-variable distribution.
pub fn gk_common_information(dist: &JointDistribution) -> Result<GkDecomposition> {
    let vars = dist.variables();
    if vars.len() != 2 {
        return Err(Error::domain(format!(
            "common information needs exactly two variables, got {}",
            vars.len()
        )));
    }
    let nx = vars[0].alphabet.len();
    let mut parent: Vec<usize> = (0..nx + vars[1].alphabet.len()).collect();
    for (o, _) in dist.support() {
        let (a, b) = (find(&mut parent, o[0]), find(&mut parent, nx + o[1]));
        parent[a.max(b)] = a.min(b);
    }
    // number components in order of the smallest x label index they contain
    let mut label: BTreeMap<usize, usize> = BTreeMap::new();
    let mut x_component = BTreeMap::new();
    let mut y_component = BTreeMap::new();
    let mut weights: Vec<Rational> = Vec::new();
    for (o, p) in dist.support() {
        let root = find(&mut parent, o[0]);
        let next = label.len();
        let k = *label.entry(root).or_insert(next);
        if k == weights.len() {
            weights.push(Rational::default());
        }
        weights[k] += p;
        x_component.insert(vars[0].alphabet[o[0]].clone(), k);
        y_component.insert(vars[1].alphabet[o[1]].clone(), k);
    }
    Ok(GkDecomposition {
        x: vars[0].name.clone(),
        y: vars[1].name.clone(),
        components: weights.len(),
        entropy: entropy_of_probabilities(&weights),
        x_component,
        y_component,
        weights,
    })
}

impl GkDecomposition {
    /// The joint distribution of `(X, Y, K)` with `K` named `name`.
    pub fn joint(&self, dist: &JointDistribution, name: &str) -> Result<JointDistribution> {
        let var = Variable { name: name.into(), alphabet: (0..self.components).map(|k| k.to_string()).collect() };
        let xs = &dist.variables()[0].alphabet;
        dist.with_derived(var, |o| Ok(self.x_component[&xs[o[0]]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy_of;
    use crate::network::example1_sources;
    use crate::rational::int;

    fn var(name: &str, n: usize) -> Variable {
        Variable { name: name.into(), alphabet: (0..n).map(|i| i.to_string()).collect() }
    }

    #[test]
    fn example_pair_shares_one_bit() {
        let d = example1_sources().project(&["Y1", "Y2"]).unwrap();
        let gk = gk_common_information(&d).unwrap();
        assert_eq!(gk.components, 2);
        assert_eq!(gk.entropy.bits, int(1));
        // the component is the first bit of either label
        for (label, k) in &gk.x_component {
            assert_eq!(*k, usize::from(&label[..1] == "1"));
        }
    }

    #[test]
    fn independent_and_identical() {
        let full: Vec<Vec<usize>> = (0..2).flat_map(|a| (0..3).map(move |b| vec![a, b])).collect();
        let d = JointDistribution::uniform_over(vec![var("X", 2), var("Y", 3)], full).unwrap();
        let gk = gk_common_information(&d).unwrap();
        assert_eq!((gk.components, gk.entropy.bits.clone()), (1, int(0)));

        let same = JointDistribution::uniform_over(vec![var("X", 4), var("Y", 4)], (0..4).map(|i| vec![i, i]).collect())
            .unwrap();
        let gk = gk_common_information(&same).unwrap();
        assert_eq!((gk.components, gk.entropy.bits), (4, int(2)));
    }

    #[test]
    fn common_part_is_function_of_each_side() {
        let d = example1_sources().project(&["Y2", "Y3"]).unwrap();
        let gk = gk_common_information(&d).unwrap();
        let j = gk.joint(&d, "K").unwrap();
        let g = j.ground();
        let h = |names: &[&str]| entropy_of(&j, g.subset(names.iter().copied()).unwrap()).unwrap().bits;
        assert_eq!(h(&["K", "Y2"]), h(&["Y2"]));
        assert_eq!(h(&["K", "Y3"]), h(&["Y3"]));
        assert_eq!(h(&["K"]), gk.entropy.bits);
    }

    #[test]
    fn rejects_wrong_arity() {
        let d = example1_sources();
        assert!(gk_common_information(&d).is_err());
    }
}
