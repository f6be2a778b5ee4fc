//! Functional-dependence presolve for systems that contain every elemental
//! inequality of their ground set.
//!
//! Rows of the form `h(A) - h(B) = 0` with `B ⊂ A` (or `<= 0`), and pairs of
//! fixings `h(A) = v`, `h(B) = v`, say that `A` is determined by `B`. Under
//! the polymatroid axioms this forces `h(S ∪ A) = h(S)` for every `S ⊇ B`,
//! so each coordinate can be replaced by that of its closure. The reduced
//! system is feasible exactly when the original is. Witnesses lift by
//! reading `h(S) = h'(cl S)`; certificates lift by adding the elemental
//! chains that prove each `h(S) = h(cl S)` from the original rows.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use super::certificate::FarkasCertificate;
use super::system::{LinearConstraint, LinearSystem, Relation};
use crate::entropy::{elemental_inequalities, LinearFunctional, SubsetIndex};
use crate::rational::Rational;

/// Largest ground set for which the presolve is attempted.
const MAX_PRESOLVE_GROUND: usize = 16;

/// `h(lower) - h(upper) >= 0` with `lower ⊂ upper`, proved by the listed
/// certificate multipliers (total rhs zero).
#[derive(Clone, Debug)]
struct Dependency {
    lower: SubsetIndex,
    upper: SubsetIndex,
    proof: Vec<(usize, Rational)>,
}

pub(crate) struct Reduction {
    deps: Vec<Dependency>,
    /// normalized elemental functional -> (row, scale) with row = scale * elemental
    elemental: HashMap<LinearFunctional, (usize, Rational)>,
    ground_len: usize,
    closure: std::cell::RefCell<HashMap<SubsetIndex, SubsetIndex>>,
    pub system: LinearSystem,
}

/// Row `k` written as `functional >= rhs` (equalities keep their sign).
fn oriented(c: &LinearConstraint) -> (LinearFunctional, Rational) {
    match c.relation {
        Relation::Le => (c.functional.scale(&-Rational::one()), -c.rhs.clone()),
        _ => (c.functional.clone(), c.rhs.clone()),
    }
}

/// Sign applied by certificate verification to a multiplier on row `c`.
fn sign(c: &LinearConstraint) -> Rational {
    if c.relation == Relation::Le {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl Reduction {
    /// Builds the reduction, or `None` when the system lacks some elemental
    /// row or has no usable dependency.
    pub fn new(sys: &LinearSystem) -> Option<Reduction> {
        let n = sys.ground().len();
        if n > MAX_PRESOLVE_GROUND {
            return None;
        }
        let mut elemental = HashMap::new();
        let mut deps = Vec::new();
        // single-term equalities: subset -> (value, row, coefficient)
        let mut fixings: Vec<(SubsetIndex, Rational, usize, Rational)> = Vec::new();
        for (k, c) in sys.constraints().iter().enumerate() {
            let (f, b) = oriented(c);
            let terms = f.terms();
            if terms.is_empty() {
                continue;
            }
            if !b.is_zero() {
                if c.relation == Relation::Eq && terms.len() == 1 {
                    fixings.push((terms[0].0, &b / &terms[0].1, k, terms[0].1.clone()));
                }
                continue;
            }
            if c.relation != Relation::Eq {
                let scale = terms[0].1.abs();
                elemental.entry(f.scale(&(Rational::one() / &scale))).or_insert((k, scale));
            }
            // k * (h(lower) - h(upper)) >= 0 with k > 0, or any equality of that shape
            let dep = match terms {
                [(a, ca)] if c.relation == Relation::Eq || ca.is_negative() => {
                    Some((SubsetIndex::EMPTY, *a, Rational::one() / -ca.clone()))
                }
                [(s, cs), (t, ct)] if (cs + ct).is_zero() => {
                    let (lower, upper, cl) = if s.is_subset_of(*t) { (*s, *t, cs) } else { (*t, *s, ct) };
                    let ok = lower.is_subset_of(upper) && (c.relation == Relation::Eq || cl.is_positive());
                    ok.then(|| (lower, upper, Rational::one() / cl.clone()))
                }
                _ => None,
            };
            if let Some((lower, upper, m)) = dep {
                deps.push(Dependency { lower, upper, proof: vec![(k, m)] });
            }
        }
        for (i, (a, va, ka, ca)) in fixings.iter().enumerate() {
            for (b, vb, kb, cb) in &fixings[i + 1..] {
                if va != vb || a == b {
                    continue;
                }
                let (lower, upper, kl, cl, ku, cu) = if a.is_subset_of(*b) {
                    (*a, *b, *ka, ca, *kb, cb)
                } else if b.is_subset_of(*a) {
                    (*b, *a, *kb, cb, *ka, ca)
                } else {
                    continue;
                };
                let proof = vec![(kl, Rational::one() / cl), (ku, -Rational::one() / cu)];
                deps.push(Dependency { lower, upper, proof });
            }
        }
        if deps.is_empty() {
            return None;
        }
        for e in elemental_inequalities(n).ok()? {
            if !elemental.contains_key(&e) {
                return None;
            }
        }
        let mut red = Reduction {
            deps,
            elemental,
            ground_len: n,
            closure: Default::default(),
            system: LinearSystem::new(sys.ground().clone()),
        };
        let mut reduced = LinearSystem::new(sys.ground().clone());
        for c in sys.constraints() {
            let f = c.functional.map_subsets(|s| red.close(s));
            reduced.push(LinearConstraint { functional: f, relation: c.relation, rhs: c.rhs.clone(), label: None }).ok()?;
        }
        if let Some(obj) = sys.objective() {
            reduced.set_objective(obj.map_subsets(|s| red.close(s))).ok()?;
        }
        red.system = reduced;
        Some(red)
    }

    pub fn close(&self, s: SubsetIndex) -> SubsetIndex {
        if s.is_empty() {
            return self.close_uncached(s);
        }
        if let Some(c) = self.closure.borrow().get(&s) {
            return *c;
        }
        let c = self.close_uncached(s);
        self.closure.borrow_mut().insert(s, c);
        c
    }

    fn close_uncached(&self, s: SubsetIndex) -> SubsetIndex {
        let mut cur = s;
        loop {
            let before = cur;
            for d in &self.deps {
                if d.lower.is_subset_of(cur) {
                    cur = cur | d.upper;
                }
            }
            if cur == before {
                return cur;
            }
        }
    }

    /// Number of distinct closed coordinates used by the reduced system.
    pub fn closed_coordinates(&self) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for c in self.system.constraints() {
            seen.extend(c.functional.terms().iter().map(|t| t.0));
        }
        seen.len()
    }

    /// `h(S) = h'(cl S)` for every coordinate.
    pub fn lift_values(&self, reduced: &[Rational]) -> Vec<Rational> {
        (0..reduced.len())
            .map(|c| reduced[self.close(SubsetIndex::from_coordinate(c)).coordinate()].clone())
            .collect()
    }

    fn add_elemental(&self, out: &mut BTreeMap<usize, Rational>, f: LinearFunctional, w: &Rational) {
        if f.is_zero() || w.is_zero() {
            return;
        }
        let (k, scale) = &self.elemental[&f];
        *out.entry(*k).or_insert_with(Rational::zero) += w / scale;
    }

    /// `w * (h(P ∪ a) - h(P))` as elemental rows, for `a ∉ P`.
    fn mono_step(&self, out: &mut BTreeMap<usize, Rational>, p: SubsetIndex, a: usize, w: &Rational) {
        let full = SubsetIndex(((1u64 << self.ground_len) - 1) as u32);
        let sa = SubsetIndex::singleton(a);
        self.add_elemental(out, LinearFunctional::conditional(sa, full - sa), w);
        let mut k = p;
        for b in (full - p - sa).members() {
            let sb = SubsetIndex::singleton(b);
            self.add_elemental(out, LinearFunctional::mutual(sa, sb, k), w);
            k = k | sb;
        }
    }

    /// `w * (h(upper) - h(lower))` for `lower ⊆ upper`.
    fn mono(&self, out: &mut BTreeMap<usize, Rational>, lower: SubsetIndex, upper: SubsetIndex, w: &Rational) {
        let mut p = lower;
        for a in (upper - lower).members() {
            self.mono_step(out, p, a, w);
            p = p | SubsetIndex::singleton(a);
        }
    }

    /// `w * (h(X) + h(Y) - h(X ∪ Y) - h(X ∩ Y))`.
    fn submod(&self, out: &mut BTreeMap<usize, Rational>, x: SubsetIndex, y: SubsetIndex, w: &Rational) {
        let common = x & y;
        let mut xs = common;
        for xi in (x - common).members() {
            let sx = SubsetIndex::singleton(xi);
            let mut k = xs;
            for yj in (y - common).members() {
                let sy = SubsetIndex::singleton(yj);
                self.add_elemental(out, LinearFunctional::mutual(sx, sy, k), w);
                k = k | sy;
            }
            xs = xs | sx;
        }
    }

    /// `w * (h(S) - h(cl S))` from dependencies and elemental rows.
    fn down_to_closure(&self, out: &mut BTreeMap<usize, Rational>, s: SubsetIndex, w: &Rational) {
        let mut cur = s;
        loop {
            let before = cur;
            for d in &self.deps {
                if d.lower.is_subset_of(cur) && !d.upper.is_subset_of(cur) {
                    // h(cur) - h(cur ∪ U) = [h(cur)+h(U)-h(cur∪U)-h(cur∩U)]
                    //                      + [h(cur∩U) - h(L)] + [h(L) - h(U)]
                    self.submod(out, cur, d.upper, w);
                    self.mono(out, d.lower, cur & d.upper, w);
                    for (k, m) in &d.proof {
                        *out.entry(*k).or_insert_with(Rational::zero) += m * w;
                    }
                    cur = cur | d.upper;
                }
            }
            if cur == before {
                break;
            }
        }
    }

    /// Turns a certificate for the reduced system into one for `original`.
    pub fn lift_certificate(&self, original: &LinearSystem, cert: &FarkasCertificate) -> FarkasCertificate {
        let mut combo: BTreeMap<SubsetIndex, Rational> = BTreeMap::new();
        for (c, m) in original.constraints().iter().zip(&cert.multipliers) {
            if m.is_zero() {
                continue;
            }
            let w = m * sign(c);
            for (s, v) in c.functional.terms() {
                *combo.entry(*s).or_insert_with(Rational::zero) += v * &w;
            }
        }
        let mut extra: BTreeMap<usize, Rational> = BTreeMap::new();
        for (s, coef) in combo {
            let cl = self.close(s);
            if cl == s || coef.is_zero() {
                continue;
            }
            // the combination holds coef * (h(s) - h(cl s)) beyond its reduced form
            if coef.is_positive() {
                self.mono(&mut extra, s, cl, &coef);
            } else {
                self.down_to_closure(&mut extra, s, &-coef);
            }
        }
        let mut multipliers = cert.multipliers.clone();
        for (k, v) in extra {
            multipliers[k] += v;
        }
        FarkasCertificate { multipliers }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::GroundSet;
    use crate::lp::solve::{solve_feasibility_with, SolverOptions};
    use crate::lp::FeasibilityResult;
    use crate::rational::int;

    fn with_elementals(g: &GroundSet) -> LinearSystem {
        let mut sys = LinearSystem::new(g.clone());
        for f in elemental_inequalities(g.len()).unwrap() {
            sys.push(LinearConstraint::ge_zero(f)).unwrap();
        }
        sys
    }

    #[test]
    fn closure_and_lifting() {
        // C is a function of A; A and B have one bit each; C must carry 2 bits.
        let g = GroundSet::new(["A", "B", "C"]).unwrap();
        let mut sys = with_elementals(&g);
        let s = |n: &[&str]| g.subset(n.iter().copied()).unwrap();
        sys.push(LinearConstraint::eq(LinearFunctional::conditional(s(&["C"]), s(&["A"])), int(0))).unwrap();
        sys.push(LinearConstraint::le(LinearFunctional::entropy(s(&["A"])), int(1))).unwrap();
        sys.push(LinearConstraint::new(LinearFunctional::entropy(s(&["C"])), Relation::Ge, int(2))).unwrap();
        let red = Reduction::new(&sys).unwrap();
        assert_eq!(red.close(s(&["A", "B"])), s(&["A", "B", "C"]));
        assert_eq!(red.close(s(&["B"])), s(&["B"]));
        let opts = SolverOptions { fd_presolve: false, ..Default::default() };
        let (r, _) = solve_feasibility_with(&red.system, &opts).unwrap();
        let FeasibilityResult::Infeasible { certificate } = r else { panic!("expected infeasible") };
        let lifted = red.lift_certificate(&sys, &certificate);
        assert!(lifted.verify(&sys));
    }

    #[test]
    fn missing_elementals_disable_presolve() {
        let g = GroundSet::new(["A", "C"]).unwrap();
        let s = |n: &[&str]| g.subset(n.iter().copied()).unwrap();
        let sys = LinearSystem::with_constraints(
            g.clone(),
            vec![LinearConstraint::eq(LinearFunctional::conditional(s(&["C"]), s(&["A"])), int(0))],
        )
        .unwrap();
        assert!(Reduction::new(&sys).is_none());
        let full = with_elementals(&g);
        assert!(Reduction::new(&full).is_none(), "no dependencies");
    }
}
