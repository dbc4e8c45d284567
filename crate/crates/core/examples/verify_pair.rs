//! Builds the equivalence problem for two program files and hands it to
//! whichever provers are installed.
//!
//!     cargo run --example verify_pair -- a.lp b.lp

use std::path::PathBuf;
use std::time::Duration;

use strongeq::cli::{load_program, pair_problem};
use strongeq::prover_driver::{run_prover, ProverSuite};
use strongeq::render::{render_human, render_tptp};

fn main() {
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let (left, right) = match args.as_slice() {
        [a, b] => (a.clone(), b.clone()),
        _ => {
            let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/programs");
            (dir.join("ex14.a.lp"), dir.join("ex14.b.lp"))
        }
    };
    let mut err = std::io::stderr();
    let a = load_program(&left, &mut err).unwrap_or_else(|e| panic!("{e}"));
    let b = load_program(&right, &mut err).unwrap_or_else(|e| panic!("{e}"));
    let theory = pair_problem(&a, &b, false).unwrap();
    print!("{}", render_human(&theory));

    let suite = ProverSuite::default().with_timeout(Duration::from_secs(30));
    let installed = suite.installed();
    if installed.is_empty() {
        eprintln!("no prover installed; set STRONGEQ_PROVER_VAMPIRE or similar");
        return;
    }
    let problem = render_tptp(&theory).serialize();
    for config in installed {
        let verdict = run_prover(&problem, config);
        println!("{}: {:?} ({:.3} s)", config.id, verdict.outcome, verdict.wall_time.as_secs_f64());
    }
}
