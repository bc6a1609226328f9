// Rounding a random permutation of degree km into a conjugate of k stacked
// copies of a permutation of degree m.

use mgw::perm::Permutation;
use mgw::rounding::{m0, round_to_subgroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (m, k) = (64, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma = Permutation::random(k * m, &mut rng);
    let r = round_to_subgroup(&sigma, m, k)?;

    println!("m0(1/3)          = {}", m0(&mgw::rounding::default_beta()));
    println!("d(sigma, chopped) = {}", r.chop_distance);
    println!("d(chopped, rho)   = {}", r.align_distance);
    println!(
        "d(sigma, rho)     = {} (bound {} ≈ {:.4})",
        r.achieved,
        r.bound,
        r.bound.to_f64()
    );
    println!("width(rho)        = {}", r.rounded.width());
    println!("small cycles      = {:?}", r.small.cycle_profile().counts());
    assert!(r.guaranteed && r.within_bound());
    assert_eq!(r.reconstruct(), r.rounded);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
