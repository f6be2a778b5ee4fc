//! Floating-point pre-solve. It never decides anything: it only proposes a
//! candidate point or a small set of rows that the exact phase then checks.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::rational::Rational;

/// A `>=` or `=` row over dense column indices.
pub(crate) struct FloatRow {
    pub coeffs: Vec<(usize, f64)>,
    pub equality: bool,
    pub rhs: f64,
}

pub(crate) enum Hint {
    /// Approximate optimal (or feasible) point, one value per column.
    Point(Vec<f64>),
    /// Rows carrying an approximate Farkas combination, with multipliers.
    Support(Vec<(usize, f64)>),
    Nothing,
}

const SUPPORT_EPS: f64 = 1e-9;

const VIOLATION_EPS: f64 = 1e-9;
const BATCH: usize = 400;
const MAX_ROUNDS: usize = 200;

/// Solves with lazily added rows: starts from the equality and
/// nonzero-rhs rows and adds the most violated remaining rows each round.
pub(crate) fn hint(rows: &[FloatRow], ncols: usize, objective: Option<&[(usize, f64)]>) -> Hint {
    let mut active: Vec<bool> = rows.iter().map(|r| r.equality || r.rhs != 0.0).collect();
    for _ in 0..MAX_ROUNDS {
        let idx: Vec<usize> = (0..rows.len()).filter(|&k| active[k]).collect();
        let sub: Vec<&FloatRow> = idx.iter().map(|&k| &rows[k]).collect();
        match solve_primal(&sub, ncols, objective) {
            Primal::Point(x) => {
                let mut violated: Vec<(f64, usize)> = rows
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| !active[*k])
                    .filter_map(|(k, r)| {
                        let lhs: f64 = r.coeffs.iter().map(|&(c, v)| v * x[c]).sum();
                        let gap = lhs - r.rhs;
                        let bad = if r.equality { gap.abs() > VIOLATION_EPS } else { gap < -VIOLATION_EPS };
                        bad.then_some((-gap.abs(), k))
                    })
                    .collect();
                if violated.is_empty() {
                    return Hint::Point(x);
                }
                violated.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                for (_, k) in violated.into_iter().take(BATCH) {
                    active[k] = true;
                }
            }
            Primal::Infeasible => {
                let fm = farkas_multipliers(&sub, ncols);
                return match fm {
                    Some(y) => Hint::Support(
                        y.iter().enumerate().filter(|(_, v)| v.abs() > SUPPORT_EPS).map(|(i, &v)| (idx[i], v)).collect(),
                    ),
                    None => Hint::Nothing,
                };
            }
            Primal::Unbounded => {
                if active.iter().all(|&a| a) {
                    return Hint::Nothing;
                }
                active.iter_mut().for_each(|a| *a = true);
            }
            Primal::Failed => return Hint::Nothing,
        }
    }
    Hint::Nothing
}

enum Primal {
    Point(Vec<f64>),
    Infeasible,
    Unbounded,
    Failed,
}

fn solve_primal(rows: &[&FloatRow], ncols: usize, objective: Option<&[(usize, f64)]>) -> Primal {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let mut cost = vec![0.0; ncols];
    if let Some(obj) = objective {
        for &(c, v) in obj {
            cost[c] += v;
        }
    }
    let vars: Vec<_> = cost.iter().map(|&c| lp.add_var(c, (0.0, f64::INFINITY))).collect();
    for r in rows {
        let expr: Vec<_> = r.coeffs.iter().map(|&(c, v)| (vars[c], v)).collect();
        let op = if r.equality { ComparisonOp::Eq } else { ComparisonOp::Ge };
        lp.add_constraint(expr.as_slice(), op, r.rhs);
    }
    match lp.solve() {
        Ok(out) => match out.solution() {
            Some(sol) => Primal::Point(vars.iter().map(|&v| sol.var_value(v)).collect()),
            None => Primal::Failed,
        },
        Err(microlp::Error::Infeasible) => Primal::Infeasible,
        Err(microlp::Error::Unbounded) => Primal::Unbounded,
        Err(_) => Primal::Failed,
    }
}

/// Approximate Farkas multipliers for an infeasible row set: solves
/// `min Σ y_i` over `yᵀA <= 0`, `yᵀb = 1`, `y_i >= 0` on inequality rows.
fn farkas_multipliers(rows: &[&FloatRow], ncols: usize) -> Option<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let ys: Vec<_> = rows
        .iter()
        .map(|r| {
            if r.equality {
                lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))
            } else {
                lp.add_var(1.0, (0.0, f64::INFINITY))
            }
        })
        .collect();
    let mut cols: Vec<Vec<(microlp::Variable, f64)>> = vec![Vec::new(); ncols];
    for (r, &y) in rows.iter().zip(&ys) {
        for &(c, v) in &r.coeffs {
            cols[c].push((y, v));
        }
    }
    for col in cols.iter().filter(|c| !c.is_empty()) {
        lp.add_constraint(col.as_slice(), ComparisonOp::Le, 0.0);
    }
    let b: Vec<_> = rows.iter().zip(&ys).filter(|(r, _)| r.rhs != 0.0).map(|(r, &y)| (y, r.rhs)).collect();
    if b.is_empty() {
        return None;
    }
    lp.add_constraint(b.as_slice(), ComparisonOp::Eq, 1.0);
    let out = lp.solve().ok()?;
    let sol = out.solution()?;
    Some(ys.iter().map(|&y| sol.var_value(y)).collect())
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub(crate) fn snap(x: f64, max_den: i64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if neg { -r } else { r }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    let v = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    if v.is_finite() {
        v
    } else {
        crate::rational::to_f64(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn snap_recovers_small_fractions() {
        assert_eq!(snap(0.5000000001, 1000), ratio(1, 2));
        assert_eq!(snap(-1.0 / 3.0, 1000), ratio(-1, 3));
        assert_eq!(snap(2.0, 1000), ratio(2, 1));
        assert_eq!(snap(1e-13, 1000), ratio(0, 1));
        assert!(snap(0.1234567, 100).denom() <= &BigInt::from(100));
    }

    #[test]
    fn hints() {
        // x >= 1, x <= 0
        let rows = vec![
            FloatRow { coeffs: vec![(0, 1.0)], equality: false, rhs: 1.0 },
            FloatRow { coeffs: vec![(0, -1.0)], equality: false, rhs: 0.0 },
        ];
        match hint(&rows, 1, None) {
            Hint::Support(s) => {
                assert_eq!(s.iter().map(|e| e.0).collect::<Vec<_>>(), vec![0, 1]);
                assert!((s[0].1 - s[1].1).abs() < 1e-9);
            }
            _ => panic!("expected support"),
        }
        match hint(&rows[..1], 1, Some(&[(0, 1.0)])) {
            Hint::Point(x) => assert!((x[0] - 1.0).abs() < 1e-9),
            _ => panic!("expected point"),
        }
    }
}
