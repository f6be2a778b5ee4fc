//! The exact solver against brute-force vertex enumeration on small random
//! systems over three coordinates.

use entrolab::entropy::{GroundSet, LinearFunctional, SubsetIndex};
use entrolab::lp::{
    minimize, solve_feasibility, verify_certificate, verify_minimum, FeasibilityResult, LinearConstraint,
    LinearSystem, MinimizeResult, Relation,
};
use entrolab::rational::int;
use entrolab::Rational;
use itertools::Itertools;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 3;

/// Solves a 3×3 system exactly; `None` when singular.
fn solve3(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    for col in 0..DIM {
        let pivot = (col..DIM).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..DIM {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in 0..DIM {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some((0..DIM).map(|i| &b[i] / &a[i][i]).collect())
}

struct Row {
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

fn holds(rows: &[Row], x: &[Rational]) -> bool {
    x.iter().all(|v| !v.is_negative())
        && rows.iter().all(|r| {
            let lhs: Rational = r.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            r.relation.holds(&lhs, &r.rhs)
        })
}

/// All feasible vertices of `{x >= 0, rows}`. The region is pointed, so it
/// is nonempty exactly when this list is.
fn vertices(rows: &[Row]) -> Vec<Vec<Rational>> {
    let mut planes: Vec<(Vec<Rational>, Rational)> = rows.iter().map(|r| (r.coeffs.clone(), r.rhs.clone())).collect();
    for i in 0..DIM {
        planes.push(((0..DIM).map(|j| int(i64::from(i == j))).collect(), int(0)));
    }
    planes
        .iter()
        .combinations(DIM)
        .filter_map(|sel| solve3(sel.iter().map(|p| p.0.clone()).collect(), sel.iter().map(|p| p.1.clone()).collect()))
        .filter(|x| holds(rows, x))
        .collect()
}

fn random_rows(rng: &mut impl Rng) -> Vec<Row> {
    let m = rng.gen_range(1..=5);
    (0..m)
        .map(|_| Row {
            coeffs: (0..DIM).map(|_| int(rng.gen_range(-3..=3))).collect(),
            relation: [Relation::Ge, Relation::Le, Relation::Eq][rng.gen_range(0..3)],
            rhs: int(rng.gen_range(-3..=4)),
        })
        .collect()
}

fn functional(coeffs: &[Rational]) -> LinearFunctional {
    LinearFunctional::from_terms(coeffs.iter().enumerate().map(|(c, v)| (SubsetIndex::from_coordinate(c), v.clone())))
}

fn system(rows: &[Row]) -> LinearSystem {
    let g = GroundSet::new(["A", "B"]).unwrap();
    assert_eq!(g.coordinates(), DIM);
    let cs = rows.iter().map(|r| LinearConstraint::new(functional(&r.coeffs), r.relation, r.rhs.clone())).collect();
    LinearSystem::with_constraints(g, cs).unwrap()
}

#[test]
fn feasibility_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut feasible, mut infeasible) = (0, 0);
    for trial in 0..200 {
        let rows = random_rows(&mut rng);
        let sys = system(&rows);
        let result = solve_feasibility(&sys).unwrap();
        assert!(verify_certificate(&sys, &result), "trial {trial}: unverifiable result");
        let expect = !vertices(&rows).is_empty();
        assert_eq!(result.is_feasible(), expect, "trial {trial}");
        if let FeasibilityResult::Feasible { witness } = &result {
            let x: Vec<Rational> = witness.values().to_vec();
            assert!(holds(&rows, &x), "trial {trial}: witness violates a row");
        }
        if expect { feasible += 1 } else { infeasible += 1 }
    }
    assert!(feasible > 20 && infeasible > 20, "{feasible} feasible, {infeasible} infeasible");
}

#[test]
fn minimum_matches_best_vertex() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut optimal = 0;
    for trial in 0..200 {
        let rows = random_rows(&mut rng);
        let sys = system(&rows);
        // Nonnegative costs keep the objective bounded below on x >= 0.
        let cost: Vec<Rational> = (0..DIM).map(|_| int(rng.gen_range(0..=4))).collect();
        let obj = functional(&cost);
        let result = minimize(&sys, &obj).unwrap();
        assert!(verify_minimum(&sys, &obj, &result), "trial {trial}: unverifiable result");
        let best = vertices(&rows)
            .iter()
            .map(|x| cost.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>())
            .min();
        match (result, best) {
            (MinimizeResult::Optimal { value, .. }, Some(b)) => {
                assert_eq!(value, b, "trial {trial}");
                optimal += 1;
            }
            (MinimizeResult::Infeasible { .. }, None) => {}
            (r, b) => panic!("trial {trial}: solver {r:?}, enumeration {b:?}"),
        }
    }
    assert!(optimal > 20);
}
