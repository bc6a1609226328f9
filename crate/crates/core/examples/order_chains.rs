// Chains of pairs that commute exactly when the first index is smaller, in
// symmetric, unitary and rank-metric settings.

use mgw::formula::{EvalMode, SymmetricGroup, UnitaryGroup};
use mgw::order::{as_tuples, chain_check, sym_chain, unitary_chain, RelationFormula};
use mgw::perm::Permutation;
use mgw::rational::int;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (n, l) = (27, 3);
    let chain = sym_chain(n, l)?;
    for (i, (sigma, _)) in chain.iter().enumerate() {
        for (j, (_, tau)) in chain.iter().enumerate() {
            let c = Permutation::commutator(sigma, tau)?;
            let d = c.hamming_distance(&Permutation::identity(n))?;
            println!("d([S_{i}, T_{j}], e) = {d}");
        }
    }

    let s = SymmetricGroup::new(n, EvalMode::Exhaustive)?;
    let check = chain_check(&s, &RelationFormula::eta(), &int(0), as_tuples(&chain))?;
    let witness = check.witness().ok_or("chain check failed")?;
    println!(
        "{}",
        serde_json::to_string(&witness.to_json()["values_matrix"])?
    );

    let u = UnitaryGroup::new(12, EvalMode::Exhaustive)?;
    let uchain = as_tuples(&unitary_chain(12, 2)?);
    let ucheck = chain_check(&u, &RelationFormula::eta(), &int(0), uchain)?;
    println!("unitary chain in U_12 valid: {}", ucheck.is_valid());
    assert!(ucheck.is_valid());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
