// Exact rank distances between rational matrices.

use mgw::matrix::{rank_distance, RationalMatrix};
use mgw::order::rank_chain;
use mgw::perm::Permutation;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = Permutation::parse_cycles("(1 2 3)(4 5)", 6)?;
    let a = RationalMatrix::from_permutation(&sigma);
    let d = rank_distance(&RationalMatrix::identity(6), &a)?;
    println!("rk(I - A_sigma)/6 = {d}");

    let m = RationalMatrix::from_integers(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]])?;
    println!("rank of a rank-2 matrix: {}", m.rank());

    for (n, l) in [(5, 1), (9, 2)] {
        let chain = rank_chain(n, l)?;
        let (s, t) = &chain[l - 1];
        let d = rank_distance(&s.mul(t)?, &t.mul(s)?)?;
        println!("n={n}, l={l}: d(ST, TS) = {d}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
