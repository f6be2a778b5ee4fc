//! A common basis for linearly correlated sources and the bound it gives.

use entrolab::aux::{linear_basis_aux, LinearSource, LinearSources};
use entrolab::network::{check_improved_bound, example1_problem, CapacityTuple};
use entrolab::rational::int;

fn unit(i: usize) -> Vec<u16> {
    (0..3).map(|j| u16::from(i == j)).collect()
}

fn main() -> entrolab::Result<()> {
    let s = |id: &str, a: usize, b: usize| LinearSource { id: id.into(), columns: vec![unit(a), unit(b)] };
    let src = LinearSources { q: 2, ambient: 3, sources: vec![s("Y1", 0, 1), s("Y2", 0, 2), s("Y3", 1, 2)] };
    let aux = linear_basis_aux(&src)?;
    println!("basis of size {} over GF({})", aux.model.m, aux.model.q);
    for (i, (id, _)) in aux.model.generators.iter().enumerate() {
        println!("  {id} depends on K{:?}", aux.model.support_of(i).iter().map(|j| j + 1).collect::<Vec<_>>());
    }
    println!("aux rows:");
    for r in &aux.spec.constraints {
        println!("  {r}");
    }

    let p = example1_problem();
    let unit_caps = CapacityTuple::uniform(p.variable_edges(), int(1));
    let r = check_improved_bound(&p, &unit_caps, &aux.spec)?;
    println!("unit capacities with linear aux: achievable={} verified={}", r.verdict.is_achievable(), r.verify());
    Ok(())
}
