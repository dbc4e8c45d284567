//! Translates a program given on the command line (or the colour pool) and
//! prints it before and after simplification.
//!
//!     cargo run --example translate_program -- "p(X;Y) :- q(X,Y)."

use strongeq::cli::single_theory;
use strongeq::parser::parse_program;
use strongeq::render::render_human;

fn main() {
    let source = std::env::args().nth(1).unwrap_or_else(|| "colour(r;g;b).".to_string());
    let program = match parse_program(&source) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(3);
        }
    };

    for simplify in [false, true] {
        let theory = single_theory(&program, simplify).expect("translation");
        println!("% simplify = {simplify}, mapped = {}", theory.mapped);
        print!("{}", render_human(&theory));
    }
}
