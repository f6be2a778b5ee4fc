use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::certificate::FarkasCertificate;
use super::float::{self, FloatRow, Hint};
use super::reduce::Reduction;
use super::simplex::{self, DenseRow, SimplexOutcome};
use super::system::{LinearSystem, Relation};
use crate::entropy::{EntropyVector, LinearFunctional, SubsetIndex};
use crate::error::Result;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible { witness: EntropyVector },
    Infeasible { certificate: FarkasCertificate },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinimizeResult {
    Optimal { value: Rational, witness: EntropyVector },
    /// `point` is feasible and `ray` is a nonnegative direction that keeps
    /// every constraint satisfied while decreasing the objective.
    Unbounded { point: EntropyVector, ray: Vec<Rational> },
    Infeasible { certificate: FarkasCertificate },
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Start from the non-homogeneous rows and add violated homogeneous
    /// inequalities in rounds, instead of loading every row up front.
    pub lazy_rows: bool,
    /// Maximum number of violated rows added per round.
    pub batch: usize,
    /// Run a floating-point solve first and use it to pick the starting
    /// rows (or, for feasibility, a candidate point checked exactly).
    pub float_hint: bool,
    /// Merge coordinates forced equal by functional dependencies before
    /// solving (only when every elemental inequality is present).
    pub fd_presolve: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { lazy_rows: true, batch: 150, float_hint: true, fd_presolve: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    /// Whether the floating-point pre-solve produced a usable suggestion.
    pub hinted: bool,
    pub rounds: usize,
    pub active_rows: usize,
    pub distinct_rows: usize,
    /// Distinct coordinates left after the dependency presolve, if it ran.
    pub presolved_coordinates: Option<usize>,
}

/// A constraint after the redundancy pre-pass: oriented as `>=` (or `=`)
/// and scaled so its leading coefficient has absolute value one.
#[derive(Clone, Debug)]
struct NormRow {
    source: usize,
    /// original (>=-oriented) row = scale * normalized row
    scale: Rational,
    functional: LinearFunctional,
    equality: bool,
    rhs: Rational,
}

enum Prepared {
    Rows(Vec<NormRow>),
    /// A constraint with no terms that cannot hold.
    Contradiction(usize, Rational),
}

fn prepare(sys: &LinearSystem) -> Prepared {
    let mut best: BTreeMap<(LinearFunctional, bool), usize> = BTreeMap::new();
    let mut rows: Vec<NormRow> = Vec::new();
    for (i, c) in sys.constraints().iter().enumerate() {
        let (f, b) = match c.relation {
            Relation::Le => (c.functional.scale(&-Rational::one()), -c.rhs.clone()),
            _ => (c.functional.clone(), c.rhs.clone()),
        };
        let equality = c.relation == Relation::Eq;
        if f.is_zero() {
            let holds = if equality { b.is_zero() } else { !b.is_positive() };
            if !holds {
                // 0 >= b with b > 0, or 0 = b with b != 0
                let m = if equality && b.is_negative() { -Rational::one() } else { Rational::one() };
                return Prepared::Contradiction(i, m);
            }
            continue;
        }
        let scale = f.terms()[0].1.abs();
        let inv = Rational::one() / &scale;
        let f = f.scale(&inv);
        let b = b * &inv;
        let key = (f.clone(), equality);
        match best.get(&key) {
            Some(&k) if equality => {
                if rows[k].rhs != b {
                    rows.push(NormRow { source: i, scale, functional: f, equality, rhs: b });
                }
            }
            Some(&k) => {
                if b > rows[k].rhs {
                    rows[k] = NormRow { source: i, scale, functional: f, equality, rhs: b };
                }
            }
            None => {
                best.insert(key, rows.len());
                rows.push(NormRow { source: i, scale, functional: f, equality, rhs: b });
            }
        }
    }
    Prepared::Rows(rows)
}

fn restricted_solve(
    rows: &[NormRow],
    active: &[usize],
    objective: Option<&LinearFunctional>,
    ncoords: usize,
) -> (SimplexOutcome, Vec<usize>) {
    let mut col_of: BTreeMap<SubsetIndex, usize> = BTreeMap::new();
    for &k in active {
        for (s, _) in rows[k].functional.terms() {
            let n = col_of.len();
            col_of.entry(*s).or_insert(n);
        }
    }
    if let Some(obj) = objective {
        for (s, _) in obj.terms() {
            let n = col_of.len();
            col_of.entry(*s).or_insert(n);
        }
    }
    let mut coord_of_col = vec![0usize; col_of.len()];
    for (s, &c) in &col_of {
        coord_of_col[c] = s.coordinate();
    }
    debug_assert!(coord_of_col.iter().all(|&c| c < ncoords));
    let dense: Vec<DenseRow> = active
        .iter()
        .map(|&k| DenseRow {
            coeffs: rows[k].functional.terms().iter().map(|(s, v)| (col_of[s], v.clone())).collect(),
            relation: if rows[k].equality { Relation::Eq } else { Relation::Ge },
            rhs: rows[k].rhs.clone(),
        })
        .collect();
    let obj: Option<Vec<(usize, Rational)>> =
        objective.map(|o| o.terms().iter().map(|(s, v)| (col_of[s], v.clone())).collect());
    (simplex::solve(&dense, col_of.len(), obj.as_deref()), coord_of_col)
}

fn expand(values: &[Rational], coord_of_col: &[usize], ncoords: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); ncoords];
    for (c, v) in values.iter().enumerate() {
        out[coord_of_col[c]] = v.clone();
    }
    out
}

fn certificate(sys: &LinearSystem, rows: &[NormRow], active: &[usize], multipliers: &[Rational]) -> FarkasCertificate {
    let mut m = vec![Rational::zero(); sys.len()];
    for (&k, y) in active.iter().zip(multipliers) {
        if !y.is_zero() {
            m[rows[k].source] += y / &rows[k].scale;
        }
    }
    FarkasCertificate { multipliers: m }
}

enum Outcome {
    Point(Vec<Rational>, Rational),
    Infeasible(FarkasCertificate),
    Unbounded(Vec<Rational>, Vec<Rational>),
}

/// Checks `Σ y_k a_k <= 0` coordinatewise and `Σ y_k b_k > 0`, with
/// `y_k >= 0` on inequality rows.
fn is_farkas(rows: &[NormRow], idx: &[usize], y: &[Rational]) -> bool {
    let mut combo: BTreeMap<SubsetIndex, Rational> = BTreeMap::new();
    let mut rhs = Rational::zero();
    for (&k, yk) in idx.iter().zip(y) {
        if yk.is_zero() {
            continue;
        }
        if !rows[k].equality && yk.is_negative() {
            return false;
        }
        for (s, v) in rows[k].functional.terms() {
            *combo.entry(*s).or_insert_with(Rational::zero) += yk * v;
        }
        rhs += yk * &rows[k].rhs;
    }
    rhs.is_positive() && combo.values().all(|v| !v.is_positive())
}

const SNAP_DENOMINATOR: i64 = 1 << 12;
const TIGHT_EPS: f64 = 1e-7;

fn float_hint(rows: &[NormRow], ncoords: usize, objective: Option<&LinearFunctional>) -> Hint {
    let to_float = |f: &LinearFunctional| -> Vec<(usize, f64)> {
        f.terms().iter().map(|(s, v)| (s.coordinate(), float::to_f64(v))).collect()
    };
    let frows: Vec<FloatRow> = rows
        .iter()
        .map(|r| FloatRow { coeffs: to_float(&r.functional), equality: r.equality, rhs: float::to_f64(&r.rhs) })
        .collect();
    let obj = objective.map(to_float);
    float::hint(&frows, ncoords, obj.as_deref())
}

fn run(sys: &LinearSystem, objective: Option<&LinearFunctional>, opts: &SolverOptions, stats: &mut SolverStats) -> Outcome {
    let ncoords = sys.ground().coordinates();
    let rows = match prepare(sys) {
        Prepared::Contradiction(i, m) => {
            let mut mult = vec![Rational::zero(); sys.len()];
            mult[i] = m;
            return Outcome::Infeasible(FarkasCertificate { multipliers: mult });
        }
        Prepared::Rows(rows) => rows,
    };
    stats.distinct_rows = rows.len();
    let mut in_active = vec![false; rows.len()];
    for (k, r) in rows.iter().enumerate() {
        if !opts.lazy_rows || r.equality || !r.rhs.is_zero() {
            in_active[k] = true;
        }
    }
    let mut full = !opts.lazy_rows;
    if opts.float_hint {
        let h = float_hint(&rows, ncoords, objective);
        match h {
            Hint::Point(x) => {
                stats.hinted = true;
                let snapped: Vec<Rational> = x.iter().map(|&v| float::snap(v.max(0.0), SNAP_DENOMINATOR)).collect();
                let value_at = |s: SubsetIndex| snapped[s.coordinate()].clone();
                if objective.is_none() && rows.iter().all(|r| {
                    let lhs = r.functional.eval_with(value_at);
                    if r.equality { lhs == r.rhs } else { lhs >= r.rhs }
                }) {
                    return Outcome::Point(snapped, Rational::zero());
                }
                for (k, r) in rows.iter().enumerate() {
                    let slack = r.functional.eval_f64(|s| x[s.coordinate()]) - float::to_f64(&r.rhs);
                    if slack.abs() <= TIGHT_EPS {
                        in_active[k] = true;
                    }
                }
            }
            Hint::Support(support) => {
                stats.hinted = true;
                let idx: Vec<usize> = support.iter().map(|e| e.0).collect();
                let y: Vec<Rational> = support.iter().map(|e| float::snap(e.1, SNAP_DENOMINATOR)).collect();
                if is_farkas(&rows, &idx, &y) {
                    return Outcome::Infeasible(certificate(sys, &rows, &idx, &y));
                }
                in_active.iter_mut().for_each(|a| *a = false);
                for k in idx {
                    in_active[k] = true;
                }
                full = false;
            }
            Hint::Nothing => {}
        }
    }
    loop {
        stats.rounds += 1;
        let active: Vec<usize> = (0..rows.len()).filter(|&k| in_active[k]).collect();
        stats.active_rows = active.len();
        let (outcome, coord_of_col) = restricted_solve(&rows, &active, objective, ncoords);
        let (point, value) = match outcome {
            SimplexOutcome::Infeasible { multipliers } => {
                return Outcome::Infeasible(certificate(sys, &rows, &active, &multipliers));
            }
            SimplexOutcome::Unbounded { x, ray } => {
                if full {
                    return Outcome::Unbounded(expand(&x, &coord_of_col, ncoords), expand(&ray, &coord_of_col, ncoords));
                }
                in_active.iter_mut().for_each(|a| *a = true);
                full = true;
                continue;
            }
            SimplexOutcome::Optimal { x, value } => (expand(&x, &coord_of_col, ncoords), value),
        };
        let value_at = |s: SubsetIndex| point[s.coordinate()].clone();
        let mut violated: Vec<(Rational, usize)> = rows
            .iter()
            .enumerate()
            .filter(|(k, _)| !in_active[*k])
            .filter_map(|(k, r)| {
                let v = r.functional.eval_with(value_at) - &r.rhs;
                v.is_negative().then_some((v, k))
            })
            .collect();
        if violated.is_empty() {
            return Outcome::Point(point, value);
        }
        violated.sort();
        for (_, k) in violated.into_iter().take(opts.batch.max(1)) {
            in_active[k] = true;
        }
    }
}

pub fn solve_feasibility(sys: &LinearSystem) -> Result<FeasibilityResult> {
    Ok(solve_feasibility_with(sys, &SolverOptions::default())?.0)
}

pub fn solve_feasibility_with(sys: &LinearSystem, opts: &SolverOptions) -> Result<(FeasibilityResult, SolverStats)> {
    if opts.fd_presolve {
        if let Some(red) = Reduction::new(sys) {
            let inner = SolverOptions { fd_presolve: false, ..opts.clone() };
            let (result, mut stats) = solve_feasibility_with(&red.system, &inner)?;
            stats.presolved_coordinates = Some(red.closed_coordinates());
            let lifted = match result {
                FeasibilityResult::Feasible { witness } => {
                    let h = EntropyVector::new(sys.ground().clone(), red.lift_values(witness.values()), true)?;
                    sys.violations(&h).is_empty().then_some(FeasibilityResult::Feasible { witness: h })
                }
                FeasibilityResult::Infeasible { certificate } => {
                    let c = red.lift_certificate(sys, &certificate);
                    c.verify(sys).then_some(FeasibilityResult::Infeasible { certificate: c })
                }
            };
            if let Some(r) = lifted {
                return Ok((r, stats));
            }
        }
    }
    let mut stats = SolverStats::default();
    let result = match run(sys, None, opts, &mut stats) {
        Outcome::Point(x, _) => FeasibilityResult::Feasible {
            witness: EntropyVector::new(sys.ground().clone(), x, true)?,
        },
        Outcome::Infeasible(certificate) => FeasibilityResult::Infeasible { certificate },
        Outcome::Unbounded(..) => unreachable!("feasibility has no objective"),
    };
    Ok((result, stats))
}

/// Minimises `objective` subject to the constraints of `sys`.
pub fn minimize(sys: &LinearSystem, objective: &LinearFunctional) -> Result<MinimizeResult> {
    minimize_with(sys, objective, &SolverOptions::default())
}

pub fn minimize_with(sys: &LinearSystem, objective: &LinearFunctional, opts: &SolverOptions) -> Result<MinimizeResult> {
    if !sys.ground().contains_subset(objective.support()) {
        return Err(crate::Error::Domain("objective references variables outside the ground set".into()));
    }
    if opts.fd_presolve {
        if let Some(red) = Reduction::new(sys) {
            let inner = SolverOptions { fd_presolve: false, ..opts.clone() };
            let reduced_obj = objective.map_subsets(|s| red.close(s));
            let lift = |v: &EntropyVector| EntropyVector::new(sys.ground().clone(), red.lift_values(v.values()), true);
            let lifted = match minimize_with(&red.system, &reduced_obj, &inner)? {
                MinimizeResult::Optimal { value, witness } => {
                    let h = lift(&witness)?;
                    sys.violations(&h).is_empty().then_some(MinimizeResult::Optimal { value, witness: h })
                }
                MinimizeResult::Unbounded { point, ray } => {
                    let h = lift(&point)?;
                    let ray = red.lift_values(&ray);
                    sys.violations(&h).is_empty().then_some(MinimizeResult::Unbounded { point: h, ray })
                }
                MinimizeResult::Infeasible { certificate } => {
                    let c = red.lift_certificate(sys, &certificate);
                    c.verify(sys).then_some(MinimizeResult::Infeasible { certificate: c })
                }
            };
            if let Some(r) = lifted {
                return Ok(r);
            }
        }
    }
    let mut stats = SolverStats::default();
    Ok(match run(sys, Some(objective), opts, &mut stats) {
        Outcome::Point(x, value) => MinimizeResult::Optimal {
            value,
            witness: EntropyVector::new(sys.ground().clone(), x, true)?,
        },
        Outcome::Infeasible(certificate) => MinimizeResult::Infeasible { certificate },
        Outcome::Unbounded(x, ray) => MinimizeResult::Unbounded {
            point: EntropyVector::new(sys.ground().clone(), x, true)?,
            ray,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::GroundSet;
    use crate::lp::{verify_certificate, LinearConstraint};
    use crate::rational::int;

    fn one_var() -> (GroundSet, LinearFunctional) {
        let g = GroundSet::new(["x"]).unwrap();
        (g, LinearFunctional::entropy(SubsetIndex(1)))
    }

    #[test]
    fn contradictory_bounds() {
        let (g, x) = one_var();
        let sys = LinearSystem::with_constraints(
            g,
            vec![
                LinearConstraint::new(x.clone(), Relation::Ge, int(1)),
                LinearConstraint::new(x, Relation::Le, int(0)),
            ],
        )
        .unwrap();
        let r = solve_feasibility(&sys).unwrap();
        match &r {
            FeasibilityResult::Infeasible { certificate } => {
                assert_eq!(certificate.multipliers, vec![int(1), int(1)]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert!(verify_certificate(&sys, &r));
    }

    #[test]
    fn trivial_feasible() {
        let (g, x) = one_var();
        let sys = LinearSystem::with_constraints(g, vec![LinearConstraint::ge_zero(x)]).unwrap();
        match solve_feasibility(&sys).unwrap() {
            FeasibilityResult::Feasible { witness } => assert_eq!(witness.values(), &[int(0)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimize_simple() {
        let (g, x) = one_var();
        let sys = LinearSystem::with_constraints(g.clone(), vec![LinearConstraint::new(x.clone(), Relation::Ge, int(3))]).unwrap();
        match minimize(&sys, &x).unwrap() {
            MinimizeResult::Optimal { value, .. } => assert_eq!(value, int(3)),
            other => panic!("{other:?}"),
        }
        let empty = LinearSystem::new(g);
        assert!(matches!(minimize(&empty, &x.scale(&int(-1))).unwrap(), MinimizeResult::Unbounded { .. }));
        assert!(matches!(minimize(&empty, &x).unwrap(), MinimizeResult::Optimal { .. }));
    }

    #[test]
    fn zero_row_contradiction() {
        let (g, _) = one_var();
        let sys = LinearSystem::with_constraints(g, vec![LinearConstraint::eq(LinearFunctional::zero(), int(-2))]).unwrap();
        let r = solve_feasibility(&sys).unwrap();
        assert!(!r.is_feasible());
        assert!(verify_certificate(&sys, &r));
    }
}
