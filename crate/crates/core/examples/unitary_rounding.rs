// Rounding Haar-random unitaries: block truncation with a polar repair, and
// eigenvalue block averaging.

use mgw::matrix::{hs_distance, UnitaryElement};
use mgw::rounding::{block_average_unitary, padding_shrinkage, unitary_round};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (k, m, r) = (16, 8, 5);
    let c = UnitaryElement::haar(k * m + r, &mut rng);
    let res = unitary_round(&c, k, m, r)?;
    println!(
        "pad:     achieved {:.5}, bound {:.5}",
        res.achieved, res.bound
    );

    let a = UnitaryElement::haar(k * m, &mut rng);
    let b = UnitaryElement::haar(k * m, &mut rng);
    let before = hs_distance(&a, &b)?;
    let after = hs_distance(&a.pad_identity(r), &b.pad_identity(r))?;
    println!(
        "shrinkage {:.5} <= {:.5} * {:.5}",
        before - after,
        padding_shrinkage(k, m, r),
        before
    );

    let u = UnitaryElement::haar(64, &mut rng);
    let avg = block_average_unitary(&u, 4)?;
    let err = u.matrix().sub(avg.approximant.matrix())?.normalized_hs();
    println!(
        "average: normalized error {err:.5}, bound {:.5}",
        2.0 * avg.bound
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
