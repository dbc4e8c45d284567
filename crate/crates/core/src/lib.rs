//! Strong equivalence of logic programs with pools, arithmetic and
//! intervals, checked by translating the programs into classical
//! first-order formulas.
//!
//! The pipeline is [`parser`] → [`translate`] (the rule translation τ*) →
//! [`ht_map`] (moving here-and-there formulas into classical logic) →
//! [`simplify`] → [`render`] (human-readable text or TPTP). The
//! [`prover_driver`] runs theorem provers on the result and [`oracle`]
//! decides small propositional cases by enumerating interpretations.

pub mod ast;
pub mod cli;
pub mod ht_map;
pub mod oracle;
pub mod parser;
pub mod prover_driver;
pub mod render;
pub mod simplify;
pub mod translate;
