//! One auxiliary per pair of sources, for the improved network bound.

use num_traits::One;

use crate::error::{Error, Result};
use crate::network::{AuxFunction, AuxSpec, AuxVariable, Fixing, NetworkProblem};
use crate::rational::{format_rational, precision_bits, Rational};

use super::delta::{delta_star_search, DeltaParams, DeltaSearchResult};
use super::gk::{gk_common_information, GkDecomposition};

#[derive(Clone, Debug)]
pub enum PairwiseMode {
    /// Exact common part, as a function of either source.
    Gk,
    /// Relaxed common part from the δ* search, constrained by three
    /// `<= δ_ij` rows.
    Delta(DeltaParams),
}

#[derive(Clone, Debug)]
pub enum PairDetail {
    Gk(GkDecomposition),
    /// the search result and the δ used in the rows (rounded up to cover
    /// entropy approximation)
    Delta(DeltaSearchResult, Rational),
}

#[derive(Clone, Debug)]
pub struct PairAux {
    pub id: String,
    pub sources: (String, String),
    pub detail: PairDetail,
}

#[derive(Clone, Debug)]
pub struct PairwiseAux {
    pub spec: AuxSpec,
    pub pairs: Vec<PairAux>,
}

/// Builds `K_{ij}` for every unordered pair of sources.
pub fn pairwise_aux_for_network(p: &NetworkProblem, mode: &PairwiseMode) -> Result<PairwiseAux> {
    let dist = p
        .distribution()
        .ok_or_else(|| Error::Precondition("pairwise auxiliaries need an explicit source distribution".into()))?;
    let ids: Vec<&str> = p.sources().iter().map(|s| s.id.as_str()).collect();
    let mut spec = AuxSpec { aux: vec![], constraints: vec![], fixing: Fixing::All };
    let mut pairs = Vec::new();
    for a in 0..ids.len() {
        for b in a + 1..ids.len() {
            let (yi, yj) = (ids[a], ids[b]);
            let id = format!("K_{yi}_{yj}");
            let pair = dist.project(&[yi, yj])?;
            let detail = match mode {
                PairwiseMode::Gk => {
                    let gk = gk_common_information(&pair)?;
                    spec.aux.push(AuxVariable {
                        id: id.clone(),
                        function: Some(AuxFunction {
                            of: vec![yi.to_string()],
                            table: gk.x_component.iter().map(|(l, k)| (l.clone(), k.to_string())).collect(),
                        }),
                    });
                    spec.constraints.push(format!("h{{{id},{yi}}} -h{{{yi}}} = 0"));
                    spec.constraints.push(format!("h{{{id},{yj}}} -h{{{yj}}} = 0"));
                    PairDetail::Gk(gk)
                }
                PairwiseMode::Delta(params) => {
                    let r = delta_star_search(&pair, params)?;
                    let delta = if r.exact {
                        r.delta_achieved.clone()
                    } else {
                        // each of the four entropies is within 2^-(bits-1)
                        let slack = Rational::one() / Rational::from_integer(num_bigint::BigInt::one() << (precision_bits() - 3));
                        &r.delta_achieved + slack
                    };
                    let d = format_rational(&delta);
                    spec.aux.push(AuxVariable { id: id.clone(), function: None });
                    spec.constraints.push(format!("h{{{id},{yi}}} -h{{{yi}}} <= {d}"));
                    spec.constraints.push(format!("h{{{id},{yj}}} -h{{{yj}}} <= {d}"));
                    spec.constraints.push(format!("h{{{yi},{id}}} +h{{{yj},{id}}} -h{{{yi},{yj},{id}}} -h{{{id}}} <= {d}"));
                    PairDetail::Delta(r, delta)
                }
            };
            pairs.push(PairAux { id, sources: (yi.to_string(), yj.to_string()), detail });
        }
    }
    Ok(PairwiseAux { spec, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{check_improved_bound, example1_problem, CapacityTuple};
    use crate::rational::int;

    #[test]
    fn example_gk_aux_are_the_bits() {
        let p = example1_problem();
        let pw = pairwise_aux_for_network(&p, &PairwiseMode::Gk).unwrap();
        assert_eq!(pw.spec.aux.len(), 3);
        for pair in &pw.pairs {
            let PairDetail::Gk(gk) = &pair.detail else { panic!() };
            assert_eq!(gk.entropy.bits, int(1));
        }
        let unit = CapacityTuple::uniform(p.variable_edges(), int(1));
        let r = check_improved_bound(&p, &unit, &pw.spec).unwrap();
        assert!(!r.verdict.is_achievable());
        assert!(r.verify());
    }

    #[test]
    fn delta_rows_parse() {
        let p = example1_problem();
        let pw = pairwise_aux_for_network(&p, &PairwiseMode::Delta(DeltaParams { resolution: 2, restarts: 1, ..DeltaParams::new(1) }))
            .unwrap();
        assert_eq!(pw.spec.constraints.len(), 9);
        for pair in &pw.pairs {
            let PairDetail::Delta(r, d) = &pair.detail else { panic!() };
            assert_eq!(r.delta_achieved, int(0));
            assert_eq!(d, &int(0));
        }
    }
}
