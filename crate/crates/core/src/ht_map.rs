//! Mapping of here-and-there formulas into classical logic by means of
//! primed copies of the predicates.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ast::{fresh_name_like, Formula, Predicate, PredicateAtom, Term, Variable};
use crate::translate::{Semantics, TranslationOutput};

pub const PRIME_TEXT_SUFFIX: &str = "__prime__";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PrimeStyle {
    /// `p'`
    #[default]
    Tick,
    /// `p__prime__`, for output languages where `'` is not allowed in names
    TextSuffix,
}

impl PrimeStyle {
    pub fn apply(self, name: &str) -> String {
        match self {
            PrimeStyle::Tick => format!("{name}'"),
            PrimeStyle::TextSuffix => format!("{name}{PRIME_TEXT_SUFFIX}"),
        }
    }
}

/// The predicates that may be primed, together with the naming of their
/// primed twins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimedSignature {
    names: BTreeMap<Predicate, String>,
    style: PrimeStyle,
}

impl PrimedSignature {
    pub fn new<'a>(signature: impl IntoIterator<Item = &'a Predicate>, style: PrimeStyle) -> Self {
        PrimedSignature {
            names: signature
                .into_iter()
                .map(|p| (p.clone(), style.apply(&p.name)))
                .collect(),
            style,
        }
    }

    pub fn primed_name(&self, predicate: &Predicate) -> Option<&str> {
        self.names.get(predicate).map(String::as_str)
    }

    pub fn contains(&self, predicate: &Predicate) -> bool {
        self.names.contains_key(predicate)
    }

    pub fn style(&self) -> PrimeStyle {
        self.style
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.names.keys()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HtMapError {
    #[error("predicate {0} is not part of the signature")]
    UnknownPredicate(Predicate),
    #[error("predicate {0} is already primed")]
    AlreadyPrimed(Predicate),
}

fn prime_atom(atom: &PredicateAtom, sig: &PrimedSignature) -> Result<Formula, HtMapError> {
    let predicate = atom.signature();
    if atom.primed {
        return Err(HtMapError::AlreadyPrimed(predicate));
    }
    if !sig.contains(&predicate) {
        return Err(HtMapError::UnknownPredicate(predicate));
    }
    Ok(Formula::Atom(PredicateAtom {
        primed: true,
        ..atom.clone()
    }))
}

fn check_atom(atom: &PredicateAtom, sig: &PrimedSignature) -> Result<Formula, HtMapError> {
    prime_atom(atom, sig)?;
    Ok(Formula::Atom(atom.clone()))
}

/// Replaces every predicate atom by its primed twin.
pub fn prime(f: &Formula, sig: &PrimedSignature) -> Result<Formula, HtMapError> {
    f.map_atoms(&mut |atom| prime_atom(atom, sig))
}

/// The recursive definition: negations and implications are evaluated in
/// the "there" world through the primed copy.
pub fn sigma_star_def(f: &Formula, sig: &PrimedSignature) -> Result<Formula, HtMapError> {
    Ok(match f {
        Formula::Truth | Formula::Falsity | Formula::Comparison { .. } => f.clone(),
        Formula::Atom(atom) => check_atom(atom, sig)?,
        Formula::Not(g) => Formula::not(prime(g, sig)?),
        Formula::And(gs) => Formula::And(
            gs.iter()
                .map(|g| sigma_star_def(g, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(gs) => Formula::Or(
            gs.iter()
                .map(|g| sigma_star_def(g, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Implies(a, b) => Formula::And(vec![
            Formula::implies(sigma_star_def(a, sig)?, sigma_star_def(b, sig)?),
            Formula::implies(prime(a, sig)?, prime(b, sig)?),
        ]),
        Formula::Iff(a, b) => {
            let forward = Formula::implies((**a).clone(), (**b).clone());
            let backward = Formula::implies((**b).clone(), (**a).clone());
            sigma_star_def(&Formula::And(vec![forward, backward]), sig)?
        }
        Formula::ForAll(vars, body) => {
            Formula::ForAll(vars.clone(), Box::new(sigma_star_def(body, sig)?))
        }
        Formula::Exists(vars, body) => {
            Formula::Exists(vars.clone(), Box::new(sigma_star_def(body, sig)?))
        }
    })
}

/// Primes the atoms occurring under a negation and leaves all others.
fn prime_negated(f: &Formula, sig: &PrimedSignature) -> Result<Formula, HtMapError> {
    Ok(match f {
        Formula::Not(g) => Formula::not(prime(g, sig)?),
        Formula::Atom(atom) => check_atom(atom, sig)?,
        Formula::Truth | Formula::Falsity | Formula::Comparison { .. } => f.clone(),
        Formula::And(gs) => Formula::And(
            gs.iter()
                .map(|g| prime_negated(g, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(gs) => Formula::Or(
            gs.iter()
                .map(|g| prime_negated(g, sig))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Implies(a, b) => Formula::implies(prime_negated(a, sig)?, prime_negated(b, sig)?),
        Formula::Iff(a, b) => Formula::iff(prime_negated(a, sig)?, prime_negated(b, sig)?),
        Formula::ForAll(vars, body) => {
            Formula::ForAll(vars.clone(), Box::new(prime_negated(body, sig)?))
        }
        Formula::Exists(vars, body) => {
            Formula::Exists(vars.clone(), Box::new(prime_negated(body, sig)?))
        }
    })
}

/// Renames every bound variable to a name outside `avoid`, extending it.
pub fn rename_bound_apart(f: &Formula, avoid: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::ForAll(vars, body) | Formula::Exists(vars, body) => {
            let mut map = BTreeMap::new();
            let mut renamed = Vec::with_capacity(vars.len());
            for v in vars {
                let name = fresh_name_like(&v.name, avoid);
                avoid.insert(name.clone());
                let new_var = Variable { name, sort: v.sort };
                map.insert(v.name.clone(), Term::var(&new_var));
                renamed.push(new_var);
            }
            let body = Box::new(rename_bound_apart(&body.substitute(&map), avoid));
            if matches!(f, Formula::ForAll(..)) {
                Formula::ForAll(renamed, body)
            } else {
                Formula::Exists(renamed, body)
            }
        }
        Formula::Not(g) => Formula::not(rename_bound_apart(g, avoid)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_bound_apart(g, avoid)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_bound_apart(g, avoid)).collect()),
        Formula::Implies(a, b) => {
            let a = rename_bound_apart(a, avoid);
            Formula::implies(a, rename_bound_apart(b, avoid))
        }
        Formula::Iff(a, b) => {
            let a = rename_bound_apart(a, avoid);
            Formula::iff(a, rename_bound_apart(b, avoid))
        }
        _ => f.clone(),
    }
}

/// The two-copy variant: for each input formula, first the formula with
/// its negated atoms primed, then the fully primed formula with its bound
/// variables renamed apart.
pub fn sigma_star_impl(formulas: &[Formula], sig: &PrimedSignature) -> Result<Vec<Formula>, HtMapError> {
    let mut avoid: BTreeSet<String> = formulas.iter().flat_map(Formula::variable_names).collect();
    sigma_star_impl_avoiding(formulas, sig, &mut avoid)
}

fn sigma_star_impl_avoiding(
    formulas: &[Formula],
    sig: &PrimedSignature,
    avoid: &mut BTreeSet<String>,
) -> Result<Vec<Formula>, HtMapError> {
    let mut out = Vec::with_capacity(2 * formulas.len());
    for f in formulas {
        out.push(prime_negated(f, sig)?);
        out.push(rename_bound_apart(&prime(f, sig)?, avoid));
    }
    Ok(out)
}

/// `∀X1 ... Xk (p(X1, ..., Xk) → p'(X1, ..., Xk))` for every predicate,
/// ordered by name and then arity.
pub fn prime_axioms<'a>(signature: impl IntoIterator<Item = &'a Predicate>) -> Vec<Formula> {
    let mut predicates: Vec<&Predicate> = signature.into_iter().collect();
    predicates.sort();
    predicates.dedup();
    predicates
        .into_iter()
        .map(|p| {
            let vars: Vec<Variable> = (1..=p.arity).map(|i| Variable::program(format!("X{i}"))).collect();
            let args: Vec<Term> = vars.iter().map(Term::var).collect();
            let atom = PredicateAtom::new(p.name.clone(), args);
            let primed = PredicateAtom {
                primed: true,
                ..atom.clone()
            };
            Formula::forall(vars, Formula::implies(Formula::Atom(atom), Formula::Atom(primed)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum TheoryBody {
    /// The formulas of a single program.
    Single(Vec<Formula>),
    /// Two programs whose conjunctions are to be shown equivalent.
    Pair { left: Vec<Formula>, right: Vec<Formula> },
}

/// Formulas ready for output, always to be read classically.
#[derive(Clone, Debug, PartialEq)]
pub struct HtTheory {
    pub axioms: Vec<Formula>,
    pub body: TheoryBody,
    /// Whether the formulas went through the mapping.
    pub mapped: bool,
    pub signature: BTreeSet<Predicate>,
}

impl HtTheory {
    pub fn is_pair(&self) -> bool {
        matches!(self.body, TheoryBody::Pair { .. })
    }

    /// The conjecture `(⋀ left) ↔ (⋀ right)` for a pair.
    pub fn conjecture(&self) -> Option<Formula> {
        match &self.body {
            TheoryBody::Single(_) => None,
            TheoryBody::Pair { left, right } => Some(Formula::iff(
                Formula::conjunction(left.clone()),
                Formula::conjunction(right.clone()),
            )),
        }
    }

    pub fn all_formulas(&self) -> Vec<&Formula> {
        let mut out: Vec<&Formula> = self.axioms.iter().collect();
        match &self.body {
            TheoryBody::Single(fs) => out.extend(fs),
            TheoryBody::Pair { left, right } => {
                out.extend(left);
                out.extend(right);
            }
        }
        out
    }
}

/// Leaves classical translations alone and maps here-and-there ones.
pub fn apply_if_needed(t: &TranslationOutput, sig: &PrimedSignature) -> Result<HtTheory, HtMapError> {
    Ok(match t.semantics {
        Semantics::Classical => HtTheory {
            axioms: vec![],
            body: TheoryBody::Single(t.formulas.clone()),
            mapped: false,
            signature: t.signature.clone(),
        },
        Semantics::HereAndThere => HtTheory {
            axioms: prime_axioms(&t.signature),
            body: TheoryBody::Single(sigma_star_impl(&t.formulas, sig)?),
            mapped: true,
            signature: t.signature.clone(),
        },
    })
}

/// Builds the two-program theory. If either side needs here-and-there
/// semantics both sides are mapped and the axioms cover the union of the
/// signatures.
pub fn pair_theory(left: &TranslationOutput, right: &TranslationOutput) -> Result<HtTheory, HtMapError> {
    let signature: BTreeSet<Predicate> = left.signature.union(&right.signature).cloned().collect();
    let mapped = left.semantics == Semantics::HereAndThere || right.semantics == Semantics::HereAndThere;
    if !mapped {
        return Ok(HtTheory {
            axioms: vec![],
            body: TheoryBody::Pair {
                left: left.formulas.clone(),
                right: right.formulas.clone(),
            },
            mapped,
            signature,
        });
    }
    let sig = PrimedSignature::new(&signature, PrimeStyle::Tick);
    // One renaming context for both sides, so that no bound name is reused.
    let mut avoid: BTreeSet<String> = left
        .formulas
        .iter()
        .chain(&right.formulas)
        .flat_map(Formula::variable_names)
        .collect();
    let left_mapped = sigma_star_impl_avoiding(&left.formulas, &sig, &mut avoid)?;
    let right_mapped = sigma_star_impl_avoiding(&right.formulas, &sig, &mut avoid)?;
    Ok(HtTheory {
        axioms: prime_axioms(&signature),
        body: TheoryBody::Pair {
            left: left_mapped,
            right: right_mapped,
        },
        mapped,
        signature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::translate::tau_star_program;

    fn p() -> Formula {
        Formula::prop("p")
    }
    fn q() -> Formula {
        Formula::prop("q")
    }
    fn primed(name: &str) -> Formula {
        Formula::Atom(PredicateAtom {
            predicate: name.into(),
            primed: true,
            arguments: vec![],
        })
    }
    fn sig_pq() -> PrimedSignature {
        PrimedSignature::new(&[Predicate::new("p", 0), Predicate::new("q", 0)], PrimeStyle::Tick)
    }

    #[test]
    fn prime_is_atomwise() {
        let f = Formula::And(vec![p(), q()]);
        assert_eq!(
            prime(&f, &sig_pq()).unwrap(),
            Formula::And(vec![primed("p"), primed("q")])
        );
    }

    #[test]
    fn prime_is_transparent_to_quantifiers() {
        let z = Variable::program("Z");
        let sig = PrimedSignature::new(&[Predicate::new("p", 1)], PrimeStyle::Tick);
        let f = Formula::forall(
            vec![z.clone()],
            Formula::implies(
                Formula::equal(Term::var(&z), Term::Symbol("a".into())),
                Formula::atom("p", vec![Term::var(&z)]),
            ),
        );
        let g = prime(&f, &sig).unwrap();
        let Formula::ForAll(_, body) = g else { panic!() };
        let Formula::Implies(cmp, atom) = *body else { panic!() };
        assert!(matches!(*cmp, Formula::Comparison { .. }));
        assert!(matches!(*atom, Formula::Atom(ref a) if a.primed));
    }

    #[test]
    fn double_priming_is_rejected() {
        let err = prime(&primed("p"), &sig_pq()).unwrap_err();
        assert_eq!(err, HtMapError::AlreadyPrimed(Predicate::new("p", 0)));
        let err = prime(&Formula::prop("r"), &sig_pq()).unwrap_err();
        assert_eq!(err, HtMapError::UnknownPredicate(Predicate::new("r", 0)));
    }

    #[test]
    fn sigma_star_def_of_constraint() {
        let f = Formula::implies(Formula::And(vec![Formula::not(p()), q()]), Formula::Falsity);
        let expected = Formula::And(vec![
            Formula::implies(Formula::And(vec![Formula::not(primed("p")), q()]), Formula::Falsity),
            Formula::implies(
                Formula::And(vec![Formula::not(primed("p")), primed("q")]),
                Formula::Falsity,
            ),
        ]);
        assert_eq!(sigma_star_def(&f, &sig_pq()).unwrap(), expected);
    }

    #[test]
    fn sigma_star_def_of_choice() {
        let f = Formula::implies(Formula::Truth, Formula::Or(vec![p(), Formula::not(p())]));
        let expected = Formula::And(vec![
            Formula::implies(Formula::Truth, Formula::Or(vec![p(), Formula::not(primed("p"))])),
            Formula::implies(
                Formula::Truth,
                Formula::Or(vec![primed("p"), Formula::not(primed("p"))]),
            ),
        ]);
        assert_eq!(sigma_star_def(&f, &sig_pq()).unwrap(), expected);
        assert_eq!(sigma_star_def(&p(), &sig_pq()).unwrap(), p());
    }

    #[test]
    fn implemented_mapping_on_negated_body() {
        let program = parse_program("p(X) :- not q(X).").unwrap();
        let t = tau_star_program(&program);
        let sig = PrimedSignature::new(&t.signature, PrimeStyle::Tick);
        let out = sigma_star_impl(&t.formulas, &sig).unwrap();
        assert_eq!(out.len(), 2);
        // First copy: only q is primed.
        let atoms: Vec<_> = out[0].atoms().into_iter().map(|a| (a.predicate.as_str(), a.primed)).collect();
        assert_eq!(atoms, [("q", true), ("p", false)]);
        // Second copy: all primed, bound names disjoint from the first copy.
        assert!(out[1].atoms().iter().all(|a| a.primed));
        let first = out[0].bound_variable_names();
        let second = out[1].bound_variable_names();
        assert!(first.is_disjoint(&second), "{first:?} {second:?}");
        assert!(second.contains("U2"));
    }

    #[test]
    fn positive_formula_first_copy_is_unchanged() {
        let f = Formula::implies(q(), p());
        let out = sigma_star_impl(std::slice::from_ref(&f), &sig_pq()).unwrap();
        assert_eq!(out[0], f);
    }

    #[test]
    fn axioms() {
        let sig = [Predicate::new("q", 0), Predicate::new("p", 0)];
        assert_eq!(
            prime_axioms(&sig),
            vec![
                Formula::implies(p(), primed("p")),
                Formula::implies(q(), primed("q"))
            ]
        );
        assert!(prime_axioms(&[]).is_empty());
        let binary = prime_axioms(&[Predicate::new("p", 2)]);
        let Formula::ForAll(vars, _) = &binary[0] else { panic!() };
        assert_eq!(vars.len(), 2);
        assert!(binary[0].is_closed());
    }

    #[test]
    fn apply_if_needed_cases() {
        let colour = tau_star_program(&parse_program("colour(r;g;b).").unwrap());
        let sig = PrimedSignature::new(&colour.signature, PrimeStyle::Tick);
        let theory = apply_if_needed(&colour, &sig).unwrap();
        assert!(!theory.mapped);
        assert!(theory.axioms.is_empty());
        assert_eq!(theory.body, TheoryBody::Single(colour.formulas.clone()));

        let choice = tau_star_program(&parse_program("{p}. :- not p, q.").unwrap());
        let sig = PrimedSignature::new(&choice.signature, PrimeStyle::Tick);
        let theory = apply_if_needed(&choice, &sig).unwrap();
        assert!(theory.mapped);
        assert_eq!(theory.all_formulas().len(), 6);
    }
}
