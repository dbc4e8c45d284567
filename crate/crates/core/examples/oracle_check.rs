//! Runs the model checker over every pair in the corpus. Programs with
//! variables only get the bounded check.

use std::path::Path;

use strongeq::cli::{load_program, Expected, Manifest};
use strongeq::oracle::{check_strong_equivalence_bounded, check_strong_equivalence_ground, Value};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/programs");
    let manifest = Manifest::load(&dir).unwrap();
    let domain = [Value::Integer(1), Value::Integer(2)];
    let mut sink = std::io::sink();

    for pair in &manifest.pairs {
        let a = load_program(&dir.join(&pair.a), &mut sink).unwrap();
        let b = load_program(&dir.join(&pair.b), &mut sink).unwrap();
        let expected = match pair.expected {
            Expected::Equivalent => "SE",
            Expected::NotEquivalent => "not SE",
        };
        let line = if a.is_ground() && b.is_ground() {
            match check_strong_equivalence_ground(&a, &b) {
                Ok(v) => match v.witness() {
                    None => "strongly equivalent".to_string(),
                    Some(w) => format!("not strongly equivalent, witness {w}"),
                },
                Err(e) => format!("error: {e}"),
            }
        } else {
            match check_strong_equivalence_bounded(&a, &b, &domain) {
                Ok(v) => match v.verdict.witness() {
                    None => "not refuted on {1, 2}".to_string(),
                    Some(w) => format!("refuted on {{1, 2}} by {w}"),
                },
                Err(e) => format!("error: {e}"),
            }
        };
        println!("{:>2} ({expected:>6}): {line}", pair.example);
    }
}
