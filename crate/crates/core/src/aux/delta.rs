//! Upper bounds on δ*, the smallest δ for which some `K` has
//! `H(K|X), H(K|Y), I(X;Y|K) <= δ`.
//!
//! The conditional `P(K|x,y)` is searched on the grid of multiples of
//! `1/resolution` by single-unit coordinate moves from several starts. The
//! landscape is not convex, so the result is only an upper bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::{entropy_of, JointDistribution, Variable};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

use super::gk::gk_common_information;

/// Largest default `K` alphabet.
pub const MAX_DEFAULT_K: usize = 16;

const MAX_SWEEPS: usize = 500;
const TIE_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct DeltaParams {
    /// Size of the `K` alphabet; defaults to `|supp X|·|supp Y|` capped at 16.
    pub k_alphabet: Option<usize>,
    /// Grid steps per probability; every resolution from 2 up to this one is
    /// searched, so raising it never makes the result worse.
    pub resolution: usize,
    /// Random starts per resolution, on top of the deterministic ones.
    pub restarts: usize,
    pub seed: u64,
}

impl DeltaParams {
    pub fn new(seed: u64) -> Self {
        DeltaParams { k_alphabet: None, resolution: 8, restarts: 4, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSearchResult {
    pub delta_achieved: Rational,
    pub h_k_given_x: Rational,
    pub h_k_given_y: Rational,
    pub i_xy_given_k: Rational,
    /// false when the entropies above are dyadic approximations
    pub exact: bool,
    pub k_alphabet: usize,
    /// grid resolution of the returned conditional
    pub resolution: usize,
    /// `P(K = k | x, y)` for each `(x, y)` label pair in the support
    pub conditional: Vec<((String, String), Vec<Rational>)>,
}

impl DeltaSearchResult {
    /// The joint distribution of `(X, Y, K)` with `K` named `name`.
    pub fn joint(&self, dist: &JointDistribution, name: &str) -> Result<JointDistribution> {
        joint_with(dist, name, self.k_alphabet, &self.conditional)
    }
}

fn joint_with(
    dist: &JointDistribution,
    name: &str,
    k: usize,
    conditional: &[((String, String), Vec<Rational>)],
) -> Result<JointDistribution> {
    let vars = dist.variables();
    let mut entries = Vec::new();
    for (o, p) in dist.support() {
        let key = (vars[0].alphabet[o[0]].clone(), vars[1].alphabet[o[1]].clone());
        let row = conditional
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| Error::domain(format!("conditional has no row for {key:?}")))?;
        for (kk, q) in row.1.iter().enumerate() {
            entries.push((vec![o[0], o[1], kk], p * q));
        }
    }
    let kvar = Variable { name: name.into(), alphabet: (0..k).map(|v| v.to_string()).collect() };
    JointDistribution::new(vec![vars[0].clone(), vars[1].clone(), kvar], entries)
}

/// Support pairs with probabilities, as compact indices.
struct Landscape {
    pairs: Vec<(usize, usize, f64)>,
    nx: usize,
    ny: usize,
    k: usize,
}

impl Landscape {
    fn objective(&self, units: &[Vec<u32>], r: u32) -> f64 {
        let k = self.k;
        let mut xk = vec![0.0; self.nx * k];
        let mut yk = vec![0.0; self.ny * k];
        let mut mk = vec![0.0; k];
        let mut hxyk = 0.0;
        let mut hx = vec![0.0; self.nx];
        let mut hy = vec![0.0; self.ny];
        for ((x, y, p), u) in self.pairs.iter().zip(units) {
            hx[*x] += p;
            hy[*y] += p;
            for (kk, &c) in u.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let q = p * c as f64 / r as f64;
                xk[x * k + kk] += q;
                yk[y * k + kk] += q;
                mk[kk] += q;
                hxyk -= q * q.log2();
            }
        }
        let h = |v: &[f64]| -> f64 { v.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum() };
        let (hxk, hyk, hk) = (h(&xk), h(&yk), h(&mk));
        let a = hxk - h(&hx);
        let b = hyk - h(&hy);
        let c = hxk + hyk - hxyk - hk;
        a.max(b).max(c)
    }

    /// Single-unit moves until no move lowers the objective.
    fn descend(&self, units: &mut [Vec<u32>], r: u32) -> f64 {
        let mut best = self.objective(units, r);
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for i in 0..units.len() {
                for a in 0..self.k {
                    for b in 0..self.k {
                        if a == b || units[i][a] == 0 {
                            continue;
                        }
                        units[i][a] -= 1;
                        units[i][b] += 1;
                        let v = self.objective(units, r);
                        if v < best - 1e-12 {
                            best = v;
                            improved = true;
                        } else {
                            units[i][b] -= 1;
                            units[i][a] += 1;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best
    }
}

/// Exact (oracle) components of a candidate.
fn evaluate(
    dist: &JointDistribution,
    k: usize,
    resolution: usize,
    conditional: Vec<((String, String), Vec<Rational>)>,
) -> Result<DeltaSearchResult> {
    let j = joint_with(dist, "K", k, &conditional)?;
    let g = j.ground();
    let h = |names: &[&str]| entropy_of(&j, g.subset(names.iter().copied()).expect("known names"));
    let (x, y) = (dist.variables()[0].name.as_str(), dist.variables()[1].name.as_str());
    let (hx, hy, hk) = (h(&[x])?, h(&[y])?, h(&["K"])?);
    let (hxk, hyk, hxyk) = (h(&[x, "K"])?, h(&[y, "K"])?, h(&[x, y, "K"])?);
    let exact = [&hx, &hy, &hk, &hxk, &hyk, &hxyk].iter().all(|e| e.exact);
    let a = &hxk.bits - &hx.bits;
    let b = &hyk.bits - &hy.bits;
    let c = &hxk.bits + &hyk.bits - &hxyk.bits - &hk.bits;
    let delta = a.clone().max(b.clone()).max(c.clone());
    Ok(DeltaSearchResult {
        delta_achieved: delta,
        h_k_given_x: a,
        h_k_given_y: b,
        i_xy_given_k: c,
        exact,
        k_alphabet: k,
        resolution,
        conditional,
    })
}

/// Searches for a `K` with small `max(H(K|X), H(K|Y), I(X;Y|K))`.
///
/// Deterministic given `params.seed`. Starts include the constant, `K = X`,
/// `K = Y` and the Gács–Körner common part whenever they fit in the alphabet.
pub fn delta_star_search(dist: &JointDistribution, params: &DeltaParams) -> Result<DeltaSearchResult> {
    let vars = dist.variables();
    if vars.len() != 2 {
        return Err(Error::domain(format!("δ* search needs exactly two variables, got {}", vars.len())));
    }
    if params.resolution < 2 {
        return Err(Error::domain("resolution must be at least 2"));
    }
    let mut xs: Vec<usize> = dist.support().iter().map(|(o, _)| o[0]).collect();
    let mut ys: Vec<usize> = dist.support().iter().map(|(o, _)| o[1]).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let k = params.k_alphabet.unwrap_or((xs.len() * ys.len()).min(MAX_DEFAULT_K));
    if k == 0 {
        return Err(Error::domain("K alphabet must have at least one symbol"));
    }
    let land = Landscape {
        pairs: dist
            .support()
            .iter()
            .map(|(o, p)| {
                (
                    xs.binary_search(&o[0]).expect("in support"),
                    ys.binary_search(&o[1]).expect("in support"),
                    crate::rational::to_f64(p),
                )
            })
            .collect(),
        nx: xs.len(),
        ny: ys.len(),
        k,
    };
    let gk = gk_common_information(dist)?;
    let labels = |o: &[usize]| (vars[0].alphabet[o[0]].clone(), vars[1].alphabet[o[1]].clone());
    // deterministic starts as a symbol per support pair
    let mut seeds: Vec<Vec<usize>> = vec![vec![0; land.pairs.len()]];
    if xs.len() <= k {
        seeds.push(land.pairs.iter().map(|p| p.0).collect());
    }
    if ys.len() <= k {
        seeds.push(land.pairs.iter().map(|p| p.1).collect());
    }
    if gk.components <= k {
        seeds.push(dist.support().iter().map(|(o, _)| gk.x_component[&vars[0].alphabet[o[0]]]).collect());
    }

    let mut best: Option<f64> = None;
    let mut best_exact: Option<DeltaSearchResult> = None;
    for r in 2..=params.resolution {
        let r32 = r as u32;
        let mut starts: Vec<Vec<Vec<u32>>> = seeds
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&sym| {
                        let mut u = vec![0; k];
                        u[sym] = r32;
                        u
                    })
                    .collect()
            })
            .collect();
        for restart in 0..params.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ ((r as u64) << 32) ^ restart as u64);
            starts.push(
                (0..land.pairs.len())
                    .map(|_| {
                        let mut u = vec![0; k];
                        for _ in 0..r {
                            u[rng.gen_range(0..k)] += 1;
                        }
                        u
                    })
                    .collect(),
            );
        }
        for mut units in starts {
            let v = land.descend(&mut units, r32);
            let replace = match (best, &best_exact) {
                (Some(b), Some(cur)) if v >= b - TIE_EPS => {
                    // near tie: let the exact values decide
                    if v <= b + TIE_EPS {
                        let cand = evaluate(dist, k, r, to_conditional(&units, r, dist, &labels))?;
                        (cand.delta_achieved < cur.delta_achieved).then_some(cand)
                    } else {
                        None
                    }
                }
                _ => Some(evaluate(dist, k, r, to_conditional(&units, r, dist, &labels))?),
            };
            if let Some(cand) = replace {
                best = Some(v);
                best_exact = Some(cand);
            }
        }
    }
    Ok(best_exact.expect("at least one start"))
}

fn to_conditional(
    units: &[Vec<u32>],
    r: usize,
    dist: &JointDistribution,
    labels: &dyn Fn(&[usize]) -> (String, String),
) -> Vec<((String, String), Vec<Rational>)> {
    dist.support()
        .iter()
        .zip(units)
        .map(|((o, _), u)| (labels(o), u.iter().map(|&c| int(c as i64) / int(r as i64)).collect()))
        .collect()
}
