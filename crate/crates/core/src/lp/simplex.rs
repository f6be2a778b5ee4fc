//! Two-phase primal simplex over exact rationals on a sparse tableau.
//!
//! All structural variables are nonnegative. Pricing is Dantzig's rule until
//! a run of degenerate pivots is seen, after which Bland's rule takes over for
//! the rest of the phase, which rules out cycling.

use num_traits::{One, Signed, Zero};

use super::Relation;
use crate::rational::Rational;

/// Sorted sparse vector.
type SparseRow = Vec<(usize, Rational)>;

#[derive(Clone, Debug)]
pub(crate) struct DenseRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug)]
pub(crate) enum SimplexOutcome {
    /// Structural values and objective value (zero for pure feasibility).
    Optimal { x: Vec<Rational>, value: Rational },
    /// Multipliers per input row, for the row oriented as `>=`.
    Infeasible { multipliers: Vec<Rational> },
    /// A feasible point and a nonnegative ray along which the objective drops.
    Unbounded { x: Vec<Rational>, ray: Vec<Rational> },
}

const DEGENERATE_STREAK_FOR_BLAND: usize = 50;

struct Tableau {
    rows: Vec<SparseRow>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs (sparse) and current objective value.
    reduced: SparseRow,
    objective: Rational,
    ncols: usize,
    first_artificial: usize,
    /// Column that formed the identity for each row, with its phase-1 cost.
    identity: Vec<(usize, Rational)>,
    /// Orientation sign applied to each row when building the standard form.
    tau: Vec<Rational>,
    live: Vec<bool>,
}

fn get(row: &SparseRow, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

/// `a - f * b` for sorted sparse rows.
fn axpy(a: &SparseRow, f: &Rational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, -(f * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - f * &b[j].1;
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Tableau {
    fn build(rows: &[DenseRow], nstruct: usize) -> Tableau {
        let m = rows.len();
        let nslack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let mut slack_col = nstruct;
        let first_artificial = nstruct + nslack;
        let mut art_col = first_artificial;
        let mut t_rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut identity = Vec::with_capacity(m);
        let mut tau = Vec::with_capacity(m);
        for r in rows {
            // orient as >=
            let (sign_ge, b) = match r.relation {
                Relation::Le => (-Rational::one(), -r.rhs.clone()),
                _ => (Rational::one(), r.rhs.clone()),
            };
            let mut coeffs: SparseRow = r.coeffs.iter().map(|(c, v)| (*c, v * &sign_ge)).collect();
            coeffs.sort_by_key(|e| e.0);
            let t = match r.relation {
                Relation::Eq => {
                    if b.is_negative() {
                        -Rational::one()
                    } else {
                        Rational::one()
                    }
                }
                _ => {
                    if b.is_positive() {
                        Rational::one()
                    } else {
                        -Rational::one()
                    }
                }
            };
            let mut row: SparseRow = coeffs.into_iter().map(|(c, v)| (c, v * &t)).collect();
            if r.relation != Relation::Eq {
                // a'x - s = b', times tau
                row.push((slack_col, -t.clone()));
                if t.is_negative() {
                    identity.push((slack_col, Rational::zero()));
                } else {
                    row.push((art_col, Rational::one()));
                    identity.push((art_col, Rational::one()));
                    art_col += 1;
                }
                slack_col += 1;
            } else {
                row.push((art_col, Rational::one()));
                identity.push((art_col, Rational::one()));
                art_col += 1;
            }
            rhs.push(b * &t);
            tau.push(t);
            t_rows.push(row);
        }
        let basis = identity.iter().map(|(c, _)| *c).collect();
        let mut tab = Tableau {
            rows: t_rows,
            rhs,
            basis,
            reduced: Vec::new(),
            objective: Rational::zero(),
            ncols: art_col,
            first_artificial,
            identity,
            tau,
            live: vec![true; m],
        };
        let costs: Vec<(usize, Rational)> = (first_artificial..art_col).map(|c| (c, Rational::one())).collect();
        tab.set_objective(&costs);
        tab
    }

    /// Installs cost vector `costs` (sparse, sorted) and prices out the basis.
    fn set_objective(&mut self, costs: &[(usize, Rational)]) {
        let mut cost_of = vec![Rational::zero(); self.ncols];
        for (c, v) in costs {
            cost_of[*c] = v.clone();
        }
        let mut reduced: SparseRow = costs.to_vec();
        let mut obj = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if !self.live[i] || cost_of[b].is_zero() {
                continue;
            }
            let cb = cost_of[b].clone();
            reduced = axpy(&reduced, &cb, &self.rows[i]);
            obj += &cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.objective = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = get(&self.rows[r], c).expect("pivot on nonzero").clone();
        let inv = Rational::one() / p;
        for e in self.rows[r].iter_mut() {
            e.1 *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || !self.live[i] {
                continue;
            }
            if let Some(f) = get(&self.rows[i], c).cloned() {
                self.rows[i] = axpy(&self.rows[i], &f, &prow);
                self.rhs[i] -= &f * &prhs;
            }
        }
        if let Some(f) = get(&self.reduced, c).cloned() {
            self.reduced = axpy(&self.reduced, &f, &prow);
            // reduced-cost row tracks -objective in its rhs slot
            self.objective += &f * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    /// Runs primal simplex on the current objective. Returns the entering
    /// column when unbounded.
    fn optimize(&mut self, allow: impl Fn(usize) -> bool) -> Option<usize> {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            let entering = if bland {
                self.reduced
                    .iter()
                    .find(|(c, v)| v.is_negative() && allow(*c))
                    .map(|(c, _)| *c)
            } else {
                let mut best: Option<(usize, &Rational)> = None;
                for (c, v) in &self.reduced {
                    if v.is_negative() && allow(*c) && best.map_or(true, |(_, b)| v < b) {
                        best = Some((*c, v));
                    }
                }
                best.map(|(c, _)| c)
            };
            let Some(c) = entering else { return None };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if !self.live[i] {
                    continue;
                }
                if let Some(a) = get(&self.rows[i], c) {
                    if a.is_positive() {
                        let ratio = &self.rhs[i] / a;
                        let better = match &leave {
                            None => true,
                            Some((j, best)) => {
                                ratio < *best || (ratio == *best && self.basis[i] < self.basis[*j])
                            }
                        };
                        if better {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else { return Some(c) };
            if ratio.is_zero() {
                degenerate += 1;
                if degenerate >= DEGENERATE_STREAK_FOR_BLAND {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }

    fn values(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if self.live[i] && b < n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent and get retired.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if !self.live[i] || self.basis[i] < self.first_artificial {
                continue;
            }
            let col = self.rows[i]
                .iter()
                .find(|(c, v)| *c < self.first_artificial && !v.is_zero())
                .map(|(c, _)| *c);
            match col {
                Some(c) => self.pivot(i, c),
                None => self.live[i] = false,
            }
        }
    }
}

/// Solves `min objective·x` subject to `rows`, `x >= 0`, over `nstruct`
/// structural columns. With no objective this is a pure feasibility test.
pub(crate) fn solve(rows: &[DenseRow], nstruct: usize, objective: Option<&[(usize, Rational)]>) -> SimplexOutcome {
    let mut tab = Tableau::build(rows, nstruct);
    let first_art = tab.first_artificial;
    tab.optimize(|_| true);
    if tab.objective.is_positive() {
        let mut reduced = vec![Rational::zero(); tab.ncols];
        for (c, v) in &tab.reduced {
            reduced[*c] = v.clone();
        }
        let multipliers = tab
            .identity
            .iter()
            .zip(&tab.tau)
            .map(|((col, cost), t)| (cost - &reduced[*col]) * t)
            .collect();
        return SimplexOutcome::Infeasible { multipliers };
    }
    tab.drive_out_artificials();
    let Some(obj) = objective else {
        return SimplexOutcome::Optimal { x: tab.values(nstruct), value: Rational::zero() };
    };
    let mut costs: Vec<(usize, Rational)> = obj.iter().filter(|(_, v)| !v.is_zero()).cloned().collect();
    costs.sort_by_key(|e| e.0);
    tab.set_objective(&costs);
    match tab.optimize(|c| c < first_art) {
        None => {
            let x = tab.values(nstruct);
            let value = costs.iter().fold(Rational::zero(), |acc, (c, v)| acc + v * &x[*c]);
            SimplexOutcome::Optimal { x, value }
        }
        Some(c) => {
            let x = tab.values(nstruct);
            let mut ray = vec![Rational::zero(); nstruct];
            if c < nstruct {
                ray[c] = Rational::one();
            }
            for (i, &b) in tab.basis.iter().enumerate() {
                if tab.live[i] && b < nstruct {
                    if let Some(a) = get(&tab.rows[i], c) {
                        ray[b] = -a.clone();
                    }
                }
            }
            SimplexOutcome::Unbounded { x, ray }
        }
    }
}
