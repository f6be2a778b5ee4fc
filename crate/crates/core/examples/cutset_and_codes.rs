//! Graphical bounds and an explicit code on the flagship network.

use entrolab::network::{
    check_lp_bound, code_witness, cutset_check, example1_problem, fd_bound, CapacityTuple, CutsetVerdict,
    FdVerdict, NetworkCode, NetworkProblem,
};
use entrolab::rational::{int, ratio};

fn main() -> entrolab::Result<()> {
    let p = example1_problem();

    // Source labels are two-bit strings, so index = 2*first + second.
    let code = NetworkCode::new()
        .edge("e1", |o| o[0] >> 1)
        .edge("e2", |o| o[0] & 1)
        .edge("e3", |o| o[1] & 1)
        .edge("e4", |o| o[2])
        .edge("r3", |o| o[0] >> 1)
        .edge("r4", |o| o[0] >> 1)
        .edge("r5", |o| o[0] >> 1);
    let w = code_witness(&p, &code)?;
    println!("code uses capacities:");
    for (e, c) in &w.capacities.values {
        println!("  {e} = {c}");
    }
    println!("inside LP bound: {}", check_lp_bound(&p, &w.capacities)?.verdict.is_achievable());

    for c in [int(1), ratio(2, 3)] {
        let caps = CapacityTuple::uniform(p.variable_edges(), c.clone());
        match fd_bound(&p, &caps)? {
            FdVerdict::PassesFd { .. } => println!("FD bound at {c}: passes"),
            FdVerdict::FailsFd(w) => println!("FD bound at {c}: {:?} via {:?} need {} > {}", w.sources, w.edges, w.need, w.capacity),
        }
    }

    // Cut-set needs every sink to demand every source.
    let mut v = p.to_json_value();
    for s in v["sources"].as_array_mut().expect("sources") {
        s["demanded_at"] = serde_json::json!(["3", "4", "5"]);
    }
    let multicast = NetworkProblem::from_json_value(&v)?;
    let unit = CapacityTuple::uniform(multicast.variable_edges(), int(1));
    match cutset_check(&multicast, &unit)? {
        CutsetVerdict::PassesCutset => println!("multicast cut-set: passes"),
        CutsetVerdict::FailsCutset(w) => {
            println!("multicast cut-set: side {:?} needs {} but cut carries {}", w.side, w.need, w.capacity)
        }
    }
    Ok(())
}
