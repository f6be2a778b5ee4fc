//! Gács–Körner common part and the relaxed δ* search on a perturbed pair.

use entrolab::aux::{delta_star_search, gk_common_information, DeltaParams};
use entrolab::entropy::{JointDistribution, Variable};
use entrolab::rational::{format_rational, ratio};

fn main() -> entrolab::Result<()> {
    let bit = |n: &str| Variable { name: n.into(), alphabet: vec!["0".into(), "1".into()] };

    // Two copies of a fair bit: the common part is the bit itself.
    let copies = JointDistribution::uniform_over(vec![bit("X"), bit("Y")], vec![vec![0, 0], vec![1, 1]])?;
    let gk = gk_common_information(&copies)?;
    println!("copies: {} components, H(K) = {}", gk.components, format_rational(&gk.entropy.bits));

    // A fair bit seen through a noisy channel has no common part at all,
    // but a K with small δ still exists.
    let noisy = JointDistribution::new(
        vec![bit("X"), bit("Y")],
        vec![
            (vec![0, 0], ratio(9, 20)),
            (vec![1, 1], ratio(9, 20)),
            (vec![0, 1], ratio(1, 20)),
            (vec![1, 0], ratio(1, 20)),
        ],
    )?;
    let gk = gk_common_information(&noisy)?;
    println!("noisy: {} component(s), H(K) = {}", gk.components, format_rational(&gk.entropy.bits));

    let r = delta_star_search(&noisy, &DeltaParams::new(7))?;
    let f = |q: &entrolab::Rational| format!("{:.4}", entrolab::rational::to_f64(q));
    println!(
        "delta search: δ <= {}  H(K|X)={} H(K|Y)={} I(X;Y|K)={} (|K|={}, grid 1/{})",
        f(&r.delta_achieved),
        f(&r.h_k_given_x),
        f(&r.h_k_given_y),
        f(&r.i_xy_given_k),
        r.k_alphabet,
        r.resolution
    );
    Ok(())
}
