//! Shows a formula that holds classically but not in here-and-there, and
//! how the primed copy recovers the difference.

use std::collections::BTreeSet;

use strongeq::ast::{Formula, Predicate};
use strongeq::ht_map::{prime_axioms, sigma_star_def, PrimeStyle, PrimedSignature};
use strongeq::oracle::{
    all_ht_interpretations, classical_satisfies, ht_satisfies, to_classical, GroundAtom,
};
use strongeq::render::render_formula;

fn main() {
    let p = GroundAtom::prop("p");
    // excluded middle
    let f = Formula::Or(vec![p.to_formula(false), Formula::not(p.to_formula(false))]);
    let signature = [Predicate::new("p", 0)];
    let sig = PrimedSignature::new(&signature, PrimeStyle::Tick);
    let mapped = sigma_star_def(&f, &sig).unwrap();

    println!("formula:  {}", render_formula(&f));
    println!("mapped:   {}", render_formula(&mapped));
    for axiom in prime_axioms(&signature) {
        println!("axiom:    {}", render_formula(&axiom));
    }
    println!();

    let alphabet: BTreeSet<GroundAtom> = [p].into();
    for i in all_ht_interpretations(&alphabet).unwrap() {
        let ht = ht_satisfies(&i, &f).unwrap();
        let classical = classical_satisfies(&to_classical(&i), &mapped).unwrap();
        println!("{:<16} HT: {ht:<5}  classical after mapping: {classical}", i.to_string());
    }
}
