//! Checks the structural properties of the indicator family that make
//! recovery possible, and shows how ties surface.

use entrolab::entropy::JointDistribution;
use entrolab::rational::ratio;
use entrolab::recovery::verify_properties;

fn main() -> entrolab::Result<()> {
    for probs in [vec![ratio(1, 2), ratio(3, 10), ratio(1, 5)], vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)]] {
        let dist = JointDistribution::single("X", &probs)?;
        let report = verify_properties(&dist)?;
        println!(
            "n={} holds={} checked={:?} ties={} violations={}",
            report.n,
            report.holds(),
            report.checked,
            report.ties.len(),
            report.violations.len()
        );
        for v in &report.violations {
            println!("  property {}: {}", v.property, v.detail);
        }
    }
    Ok(())
}
