// Parsing, printing and evaluating formulas.

use mgw::formula::{
    evaluate, parse, parse_sentence, sigma2_report, Assignment, EvalMode, SymmetricGroup,
    DEFAULT_BUDGET,
};
use mgw::perm::Permutation;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let body = parse("min(2*d(comm(x,y), e), 1)")?;
    println!("parsed: {body}");

    let s3 = SymmetricGroup::new(3, EvalMode::Exhaustive)?;
    let mut env = Assignment::new();
    env.insert("x".to_string(), Permutation::parse_cycles("(1 2)", 3)?);
    env.insert("y".to_string(), Permutation::parse_cycles("(2 3)", 3)?);
    println!("value at ((1 2), (2 3)): {}", evaluate(&s3, &body, &env)?);

    for text in [
        "inf x. sup y. min(2*d(comm(x,y), e), 1)",
        "sup x. d(x, e)",
        "inf x. sup y. d(x, y)",
    ] {
        let f = parse_sentence(text)?;
        let s4 = SymmetricGroup::new(4, EvalMode::Exhaustive)?;
        let r = sigma2_report(&s4, &f, DEFAULT_BUDGET)?;
        println!("S_4 ⊨ {f} = {} ({} evaluations)", r.value, r.evaluations);
    }

    match parse("d(x, ") {
        Err(e) => println!("error: {e}"),
        Ok(f) => println!("unexpected: {f}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
