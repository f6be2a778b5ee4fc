//! The flagship three-source network at unit capacities: the plain LP bound
//! cannot rule it out, the bound tightened with pairwise common parts can.

use entrolab::aux::{pairwise_aux_for_network, PairwiseMode};
use entrolab::network::{
    check_improved_bound, check_lp_bound, example1_problem, example1_selected_aux, BoundVerdict, CapacityTuple,
};
use entrolab::rational::int;
use entrolab::report::info_notation;

fn main() -> entrolab::Result<()> {
    let p = example1_problem();
    let unit = CapacityTuple::uniform(p.variable_edges(), int(1));

    let base = check_lp_bound(&p, &unit)?;
    println!("base LP: achievable={} verified={}", base.verdict.is_achievable(), base.verify());

    let selected = check_improved_bound(&p, &unit, &example1_selected_aux())?;
    println!("selected aux: achievable={} verified={}", selected.verdict.is_achievable(), selected.verify());

    let gk = pairwise_aux_for_network(&p, &PairwiseMode::Gk)?;
    let improved = check_improved_bound(&p, &unit, &gk.spec)?;
    println!("GK pairwise aux: achievable={} verified={}", improved.verdict.is_achievable(), improved.verify());
    if let BoundVerdict::NotAchievable { certificate } = &improved.verdict {
        let g = improved.lp.system.ground();
        println!("certificate ({} rows):", certificate.support().len());
        for i in certificate.support() {
            println!("  {} x  {}", certificate.multipliers[i], info_notation(&improved.lp.system.constraints()[i], g));
        }
    }
    Ok(())
}
