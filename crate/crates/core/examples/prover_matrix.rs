//! Runs the installed provers over the whole corpus and prints the result
//! table. Proved cells on pairs known not to be equivalent are reported as
//! violations.

use std::path::Path;
use std::time::Duration;

use strongeq::cli::{load_program, pair_problem, Expected, Manifest};
use strongeq::prover_driver::{run_matrix, MatrixProblem, ProverSuite};
use strongeq::render::render_tptp;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/programs");
    let manifest = Manifest::load(&dir).unwrap();
    let mut sink = std::io::sink();
    let problems: Vec<MatrixProblem> = manifest
        .pairs
        .iter()
        .map(|pair| {
            let a = load_program(&dir.join(&pair.a), &mut sink).unwrap();
            let b = load_program(&dir.join(&pair.b), &mut sink).unwrap();
            MatrixProblem {
                name: format!("Example {}", pair.example),
                text: render_tptp(&pair_problem(&a, &b, false).unwrap()).serialize(),
                known_not_equivalent: pair.expected == Expected::NotEquivalent,
            }
        })
        .collect();

    let suite = ProverSuite::default().with_timeout(Duration::from_secs(10));
    let provers: Vec<_> = suite.installed().into_iter().cloned().collect();
    if provers.is_empty() {
        eprintln!("no prover installed");
        return;
    }
    let report = run_matrix(&problems, &provers, suite.parallel);
    print!("{}", report.to_markdown());
    if !report.is_sound() {
        eprintln!("soundness violations: {:?}", report.violations);
        std::process::exit(4);
    }
}
