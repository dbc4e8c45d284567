//! Output formats: the human-readable formula syntax, TPTP TFF, and source
//! syntax for programs.

pub mod human;
pub mod program;
pub mod tff_check;
pub mod tptp;

pub use human::{render_formula, render_human, HumanRenderer, Naming};
pub use program::{render_program, render_program_term, render_rule};
pub use tff_check::{check_tff, TffError};
pub use tptp::{render_tptp, TptpProblem};
