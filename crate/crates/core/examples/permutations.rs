// Permutations, cycle notation and the normalized Hamming metric.

use mgw::perm::Permutation;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = Permutation::parse_cycles("(1 2 3)(4 5)", 6)?;
    let tau = Permutation::parse_cycles("(2 3)", 6)?;

    println!("sigma       = {sigma:?}");
    println!("images      = {sigma}");
    println!("sigma∘tau   = {:?}", sigma.compose(&tau)?);
    println!("[sigma,tau] = {:?}", Permutation::commutator(&sigma, &tau)?);
    println!("profile     = {:?}", sigma.cycle_profile().counts());
    println!(
        "d(sigma, e) = {}",
        sigma.hamming_distance(&Permutation::identity(6))?
    );

    // Three copies of a 3-cycle stacked in S_10, the last point fixed.
    let small = Permutation::parse_cycles("(1 2 3)", 3)?;
    let big = small.diagonal_embed(3, 10)?;
    println!("embedded    = {big:?}");
    assert_eq!(big.cycle_profile().count(3), 3);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
