//! Exact feasibility checks: a witness when the system is feasible, a Farkas
//! certificate when it is not.

use entrolab::entropy::{elemental_inequalities, GroundSet, LinearFunctional};
use entrolab::lp::{parse_lp, render_lp, solve_feasibility, verify_certificate, FeasibilityResult, LinearConstraint, LinearSystem};
use entrolab::rational::{format_rational, int};

fn main() -> entrolab::Result<()> {
    let g = GroundSet::new(["A", "B"])?;
    let mut sys = LinearSystem::new(g.clone());
    for f in elemental_inequalities(2)? {
        sys.push(LinearConstraint::ge_zero(f))?;
    }
    let a = g.subset(["A"])?;
    let b = g.subset(["B"])?;
    sys.push(LinearConstraint::eq(LinearFunctional::entropy(a), int(2)).labelled("h(A) = 2"))?;
    sys.push(LinearConstraint::le(LinearFunctional::entropy(a | b), int(1)).labelled("h(A B) <= 1"))?;

    print!("{}", render_lp(&sys));
    let result = solve_feasibility(&sys)?;
    match &result {
        FeasibilityResult::Feasible { witness } => println!("feasible: {witness:?}"),
        FeasibilityResult::Infeasible { certificate } => {
            println!("infeasible; certificate rows:");
            for i in certificate.support() {
                let c = &sys.constraints()[i];
                println!("  {:>3} x  {}", format_rational(&certificate.multipliers[i]), c.describe(&g));
            }
        }
    }
    println!("certificate checks independently: {}", verify_certificate(&sys, &result));

    // The dump format round-trips.
    let again = parse_lp(&render_lp(&sys))?;
    assert_eq!(render_lp(&again), render_lp(&sys));
    Ok(())
}
