// Series of sentence values over growing symmetric and unitary groups.

use mgw::formula::{convergence_scan, parse_sentence, Family, ScanOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_sentence("inf x. sup y. d(x*y, y*x)")?;
    for p in convergence_scan(&f, Family::Sym, &[2, 3, 4, 5], &ScanOptions::default())? {
        println!("S_{}: {} [{}]", p.n, p.value, p.mode);
    }

    let options = ScanOptions {
        samples: 16,
        ..ScanOptions::default()
    };
    let g = parse_sentence("sup x. d(x, e)")?;
    for p in convergence_scan(&g, Family::Unitary, &[2, 4, 8], &options)? {
        println!("U_{}: {:.4} [{}]", p.n, p.value.to_f64(), p.mode);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
