//! Recovering a pmf, up to relabeling, from the entropies of its indicators.

use entrolab::entropy::JointDistribution;
use entrolab::rational::ratio;
use entrolab::recovery::{
    check_permutation_equivalence, recover_distribution, FamilyOracle, IndicatorFamily, RecordingOracle,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> entrolab::Result<()> {
    let dist = JointDistribution::single("X", &[ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)])?;
    let family = IndicatorFamily::new(&dist)?;
    println!("{} indicator members", family.len());

    // The recoverer sees opaque ids in shuffled order, never the sets.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inner = FamilyOracle::shuffled(&family, &mut rng);
    let oracle = RecordingOracle::new(&inner);
    let truth: Vec<f64> = family.probabilities().iter().map(entrolab::rational::to_f64).collect();
    let r = recover_distribution(&oracle, family.n())?;
    println!("recovered {:?} with {} entropy queries (exact: {})", r.probabilities, r.queries, r.exact);
    println!("matches the source up to relabeling: {}", check_permutation_equivalence(&r.probabilities, &truth));
    let table = oracle.table.borrow().to_json_value();
    println!("recorded table:\n{}", serde_json::to_string_pretty(&table).expect("json"));
    Ok(())
}
