use std::collections::BTreeSet;

use proptest::prelude::*;

use strongeq::ast::{ArithOp, ProgramTerm};
use strongeq::oracle::{
    all_ht_interpretations, classical_satisfies, ht_equivalent, ht_satisfies, propositional_alphabet,
    random_formula, ClassicalInterpretation, HtInterpretation,
};
use strongeq::parser::parse_term;
use strongeq::render::render_program_term;
use strongeq::simplify::{simplify, SimplifyConfig};

fn leaf() -> impl Strategy<Value = ProgramTerm> {
    prop_oneof![
        (-20i64..20).prop_map(ProgramTerm::Numeral),
        prop::sample::select(vec!["a", "b", "c"]).prop_map(|s| ProgramTerm::Symbol(s.into())),
        prop::sample::select(vec!["X", "Y"]).prop_map(|s| ProgramTerm::Variable(s.into())),
        Just(ProgramTerm::Infimum),
        Just(ProgramTerm::Supremum),
    ]
}

fn term() -> impl Strategy<Value = ProgramTerm> {
    let ops = prop::sample::select(vec![
        ArithOp::Add,
        ArithOp::Subtract,
        ArithOp::Multiply,
        ArithOp::Divide,
        ArithOp::Modulo,
    ]);
    leaf().prop_recursive(4, 24, 3, move |inner| {
        // the parser flattens a pool written directly inside a pool
        let alternative = inner.clone().prop_filter("nested pool", |t| !matches!(t, ProgramTerm::Pool(_)));
        prop_oneof![
            (ops.clone(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| ProgramTerm::binary(op, l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, u)| ProgramTerm::Interval {
                lower: Box::new(l),
                upper: Box::new(u),
            }),
            prop::collection::vec(inner.clone(), 2..4).prop_map(ProgramTerm::Tuple),
            prop::collection::vec(alternative, 2..4).prop_map(ProgramTerm::Pool),
        ]
    })
}

fn ht_models(f: &strongeq::ast::Formula, n: usize) -> Vec<(HtInterpretation, bool)> {
    let alphabet: BTreeSet<_> = propositional_alphabet(n).into_iter().collect();
    all_ht_interpretations(&alphabet)
        .unwrap()
        .into_iter()
        .map(|i| {
            let holds = ht_satisfies(&i, f).unwrap();
            (i, holds)
        })
        .collect()
}

proptest! {
    #[test]
    fn program_terms_print_and_parse_back(t in term()) {
        let printed = render_program_term(&t);
        let back = parse_term(&printed);
        prop_assert!(back.is_ok(), "{printed}: {:?}", back);
        prop_assert_eq!(back.unwrap(), t, "{}", printed);
    }

    #[test]
    fn here_and_there_is_persistent(seed in any::<u64>(), n in 1usize..4) {
        let f = random_formula(&propositional_alphabet(n), 8, seed);
        for (i, holds) in ht_models(&f, n) {
            if holds {
                let total = HtInterpretation::total(i.there().clone());
                prop_assert!(ht_satisfies(&total, &f).unwrap(), "{i} but not its total version");
            }
        }
    }

    #[test]
    fn total_interpretations_are_classical(seed in any::<u64>(), n in 1usize..4) {
        let f = random_formula(&propositional_alphabet(n), 8, seed);
        for (i, holds) in ht_models(&f, n) {
            if i.here() == i.there() {
                let classical = ClassicalInterpretation::unprimed(i.there().clone());
                prop_assert_eq!(holds, classical_satisfies(&classical, &f).unwrap());
            }
        }
    }

    #[test]
    fn witnesses_separate_the_formulas(a in any::<u64>(), b in any::<u64>(), n in 1usize..4) {
        let atoms = propositional_alphabet(n);
        let f1 = random_formula(&atoms, 6, a);
        let f2 = random_formula(&atoms, 6, b);
        let alphabet: BTreeSet<_> = atoms.into_iter().collect();
        let verdict = ht_equivalent(&f1, &f2, &alphabet).unwrap();
        match verdict.witness() {
            Some(w) => prop_assert_ne!(ht_satisfies(w, &f1).unwrap(), ht_satisfies(w, &f2).unwrap()),
            None => {
                for (i, holds) in ht_models(&f1, n) {
                    prop_assert_eq!(holds, ht_satisfies(&i, &f2).unwrap());
                }
            }
        }
        prop_assert!(ht_equivalent(&f1, &f1, &alphabet).unwrap().is_equivalent());
    }

    #[test]
    fn simplification_keeps_here_and_there_models(seed in any::<u64>(), n in 1usize..4) {
        let f = random_formula(&propositional_alphabet(n), 8, seed);
        let g = simplify(&f, &SimplifyConfig::default());
        for (i, holds) in ht_models(&f, n) {
            prop_assert_eq!(holds, ht_satisfies(&i, &g).unwrap(), "{}", i);
        }
    }
}
