//! Writes the TFF problem for a pair from the bundled corpus and runs the
//! syntax check over it.
//!
//!     cargo run --example tptp_export -- 14

use std::path::Path;

use strongeq::cli::{load_program, pair_problem};
use strongeq::render::{check_tff, render_tptp};

fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(21);
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/programs");
    let mut sink = std::io::sink();
    let a = load_program(&dir.join(format!("ex{n:02}.a.lp")), &mut sink).unwrap();
    let b = load_program(&dir.join(format!("ex{n:02}.b.lp")), &mut sink).unwrap();

    let problem = render_tptp(&pair_problem(&a, &b, false).unwrap());
    let text = problem.serialize();
    print!("{text}");

    match check_tff(&text) {
        Ok(summary) => eprintln!(
            "% {} type declarations, {} axioms, {} conjecture",
            summary.types, summary.axioms, summary.conjectures
        ),
        Err(e) => {
            eprintln!("malformed output: {e}");
            std::process::exit(1);
        }
    }
}
