// Defects of maps between symmetric groups, and zero sets of `q(d(s, t))`.

use mgw::formula::{
    discrete_shadow_check, double_clamped, embedding_defect, EvalMode, SymmetricGroup, Term,
};
use mgw::perm::Permutation;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s2 = SymmetricGroup::new(2, EvalMode::Exhaustive)?;
    let s3 = SymmetricGroup::new(3, EvalMode::Exhaustive)?;
    let s6 = SymmetricGroup::new(6, EvalMode::Exhaustive)?;

    let pad = embedding_defect(|p: &Permutation| p.pad_embed(3).unwrap(), &s2, &s3, None)?;
    println!(
        "pad S_2 -> S_3:       product {}, inverse {}, metric {}, overall {}",
        pad.product,
        pad.inverse,
        pad.metric,
        pad.max()
    );

    let diag = embedding_defect(
        |p: &Permutation| p.diagonal_embed(2, 6).unwrap(),
        &s3,
        &s6,
        None,
    )?;
    println!("diagonal S_3 -> S_6:  overall {}", diag.max());

    let xy = Term::mul(Term::var("x"), Term::var("y"));
    let yx = Term::mul(Term::var("y"), Term::var("x"));
    let s4 = SymmetricGroup::new(4, EvalMode::Exhaustive)?;
    println!(
        "min(2d, 1) vanishes exactly on commuting pairs: {}",
        discrete_shadow_check(&s4, double_clamped, &xy, &yx)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
