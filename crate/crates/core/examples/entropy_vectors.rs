//! Entropy vector of a small joint distribution and its elemental inequalities.

use entrolab::entropy::{elemental_count, elemental_inequalities, entropy_vector_of, is_polymatroid};
use entrolab::lp::LinearConstraint;
use entrolab::network::example1_sources;
use entrolab::report::info_notation;
use entrolab::rational::format_rational;

fn main() -> entrolab::Result<()> {
    // Y1=(b0,b1), Y2=(b0,b2), Y3=(b1,b2) over three fair bits.
    let dist = example1_sources();
    let h = entropy_vector_of(&dist);
    let g = h.ground().clone();
    println!("entropy vector over {:?} (exact: {})", g.names(), h.is_exact());
    for c in 0..g.coordinates() {
        let s = entrolab::entropy::SubsetIndex::from_coordinate(c);
        println!("  h({}) = {}", g.display(s), format_rational(h.get(s)));
    }

    let rows = elemental_inequalities(g.len())?;
    assert_eq!(rows.len(), elemental_count(g.len()));
    println!("{} elemental inequalities:", rows.len());
    for f in &rows {
        let row = LinearConstraint::ge_zero(f.clone());
        println!("  {:<22} value {}", info_notation(&row, &g), format_rational(&f.eval(&h)));
    }
    println!("polymatroid: {}", is_polymatroid(&h).holds());
    Ok(())
}
