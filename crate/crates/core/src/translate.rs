//! Translation of rules into closed first-order formulas.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{
    ArithOp, Atom, BodyLiteral, FoArithOp, Formula, Head, Predicate, Program, ProgramTerm,
    Relation, Rule, Sort, Term, Variable,
};

/// Which logic the formulas have to be read in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    Classical,
    HereAndThere,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationOutput {
    /// One closed formula per rule, in source order.
    pub formulas: Vec<Formula>,
    pub semantics: Semantics,
    pub signature: BTreeSet<Predicate>,
}

/// Hands out variable names `Z1, Z2, ...`, `I1, ...` etc. with one counter
/// per prefix. Names listed as reserved (the rule's own variables) are
/// skipped.
#[derive(Clone, Debug, Default)]
pub struct FreshNameSupply {
    counters: BTreeMap<&'static str, usize>,
    reserved: BTreeSet<String>,
}

impl FreshNameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_reserved(reserved: impl IntoIterator<Item = String>) -> Self {
        FreshNameSupply {
            counters: BTreeMap::new(),
            reserved: reserved.into_iter().collect(),
        }
    }

    pub fn fresh(&mut self, prefix: &'static str, sort: Sort) -> Variable {
        let counter = self.counters.entry(prefix).or_insert(0);
        loop {
            *counter += 1;
            let name = format!("{prefix}{counter}");
            if !self.reserved.contains(&name) {
                return Variable { name, sort };
            }
        }
    }

    fn fresh_program(&mut self, prefix: &'static str) -> Variable {
        self.fresh(prefix, Sort::Program)
    }

    fn fresh_integer(&mut self, prefix: &'static str) -> Variable {
        self.fresh(prefix, Sort::Integer)
    }
}

fn var(v: &Variable) -> Term {
    Term::var(v)
}

fn fo_op(op: ArithOp) -> Option<FoArithOp> {
    match op {
        ArithOp::Add => Some(FoArithOp::Add),
        ArithOp::Subtract => Some(FoArithOp::Subtract),
        ArithOp::Multiply => Some(FoArithOp::Multiply),
        ArithOp::Divide | ArithOp::Modulo => None,
    }
}

/// A formula stating that `z` is one of the values of `t`.
pub fn val(t: &ProgramTerm, z: &Variable, fresh: &mut FreshNameSupply) -> Formula {
    let zt = var(z);
    match t {
        ProgramTerm::Numeral(n) => Formula::equal(zt, Term::Integer(*n)),
        ProgramTerm::Symbol(s) => Formula::equal(zt, Term::Symbol(s.clone())),
        ProgramTerm::Variable(name) => Formula::equal(zt, Term::Variable(Variable::program(name.clone()))),
        ProgramTerm::Infimum => Formula::equal(zt, Term::Infimum),
        ProgramTerm::Supremum => Formula::equal(zt, Term::Supremum),
        ProgramTerm::BinaryArith { op, lhs, rhs } => match fo_op(*op) {
            Some(fo) => {
                let i = fresh.fresh_integer("I");
                let j = fresh.fresh_integer("J");
                // Z = I o J
                let body = vec![
                    Formula::equal(zt, Term::arithmetic(fo, var(&i), var(&j))),
                    val(lhs, &i, fresh),
                    val(rhs, &j, fresh),
                ];
                Formula::exists(vec![i, j], Formula::And(body))
            }
            None => {
                let i = fresh.fresh_integer("I");
                let j = fresh.fresh_integer("J");
                let q = fresh.fresh_integer("Q");
                let r = fresh.fresh_integer("R");
                let result = if *op == ArithOp::Divide { &q } else { &r };
                // I = J * Q + R
                let body = vec![
                    Formula::equal(
                        var(&i),
                        Term::arithmetic(
                            FoArithOp::Add,
                            Term::arithmetic(FoArithOp::Multiply, var(&j), var(&q)),
                            var(&r),
                        ),
                    ),
                    val(lhs, &i, fresh),
                    val(rhs, &j, fresh),
                    Formula::compare(Relation::NotEqual, var(&j), Term::Integer(0)),
                    Formula::compare(Relation::GreaterEqual, var(&r), Term::Integer(0)),
                    Formula::compare(Relation::Less, var(&r), var(&q)),
                    Formula::equal(zt, var(result)),
                ];
                Formula::exists(vec![i, j, q, r], Formula::And(body))
            }
        },
        ProgramTerm::Interval { lower, upper } => {
            let i = fresh.fresh_integer("I");
            let j = fresh.fresh_integer("J");
            let k = fresh.fresh_integer("K");
            let body = vec![
                val(lower, &i, fresh),
                val(upper, &j, fresh),
                Formula::compare(Relation::LessEqual, var(&i), var(&k)),
                Formula::compare(Relation::LessEqual, var(&k), var(&j)),
                Formula::equal(zt, var(&k)),
            ];
            Formula::exists(vec![i, j, k], Formula::And(body))
        }
        ProgramTerm::Tuple(elements) => {
            let vars: Vec<Variable> = elements.iter().map(|_| fresh.fresh_program("I")).collect();
            let mut body = vec![Formula::equal(zt, Term::Tuple(vars.iter().map(var).collect()))];
            for (element, v) in elements.iter().zip(&vars) {
                body.push(val(element, v, fresh));
            }
            Formula::exists(vars, Formula::And(body))
        }
        ProgramTerm::Pool(alternatives) => {
            let vars: Vec<Variable> = alternatives.iter().map(|_| fresh.fresh_program("I")).collect();
            let mut body: Vec<Formula> = alternatives
                .iter()
                .zip(&vars)
                .map(|(alternative, v)| val(alternative, v, fresh))
                .collect();
            body.push(Formula::disjunction(
                vars.iter().map(|v| Formula::equal(zt.clone(), var(v))).collect(),
            ));
            Formula::exists(vars, Formula::And(body))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Positive,
    Negated,
    DoublyNegated,
}

/// `∃Z1 ... Zk (val(t1, Z1) ∧ ... ∧ val(tk, Zk) ∧ L(Z1, ..., Zk))` for a
/// single argument tuple.
fn body_atom(
    predicate: &str,
    args: &[ProgramTerm],
    polarity: Polarity,
    fresh: &mut FreshNameSupply,
) -> Formula {
    let zs: Vec<Variable> = args.iter().map(|_| fresh.fresh_program("Z")).collect();
    let mut literal = Formula::atom(predicate, zs.iter().map(var).collect());
    if polarity != Polarity::Positive {
        literal = Formula::not(literal);
    }
    if polarity == Polarity::DoublyNegated {
        literal = Formula::not(literal);
    }
    if args.is_empty() {
        return literal;
    }
    let mut body: Vec<Formula> = args.iter().zip(&zs).map(|(t, z)| val(t, z, fresh)).collect();
    body.push(literal);
    Formula::exists(zs, Formula::And(body))
}

fn body_pooled(atom: &Atom, polarity: Polarity, fresh: &mut FreshNameSupply) -> Formula {
    let disjuncts = atom
        .alternatives()
        .into_iter()
        .map(|args| body_atom(&atom.predicate, args, polarity, fresh))
        .collect();
    Formula::disjunction(disjuncts)
}

/// Translation of one body literal.
pub fn tau_b(literal: &BodyLiteral, fresh: &mut FreshNameSupply) -> Formula {
    match literal {
        BodyLiteral::Positive(atom) => body_pooled(atom, Polarity::Positive, fresh),
        BodyLiteral::Negated(atom) => body_pooled(atom, Polarity::Negated, fresh),
        BodyLiteral::DoublyNegated(atom) => body_pooled(atom, Polarity::DoublyNegated, fresh),
        BodyLiteral::Comparison { relation, lhs, rhs } => {
            let z1 = fresh.fresh_program("Z");
            let z2 = fresh.fresh_program("Z");
            let body = vec![
                val(lhs, &z1, fresh),
                val(rhs, &z2, fresh),
                Formula::compare(*relation, var(&z1), var(&z2)),
            ];
            Formula::exists(vec![z1, z2], Formula::And(body))
        }
    }
}

fn head_atom(predicate: &str, args: &[ProgramTerm], choice: bool, fresh: &mut FreshNameSupply) -> Formula {
    let zs: Vec<Variable> = args.iter().map(|_| fresh.fresh_program("Z")).collect();
    let atom = Formula::atom(predicate, zs.iter().map(var).collect());
    let consequent = if choice {
        Formula::Or(vec![atom.clone(), Formula::not(atom)])
    } else {
        atom
    };
    if args.is_empty() {
        return consequent;
    }
    let conditions: Vec<Formula> = args.iter().zip(&zs).map(|(t, z)| val(t, z, fresh)).collect();
    Formula::forall(zs, Formula::implies(Formula::conjunction(conditions), consequent))
}

/// Translation of a rule head.
pub fn tau_h(head: &Head, fresh: &mut FreshNameSupply) -> Formula {
    let (atom, choice) = match head {
        Head::Basic(atom) => (atom, false),
        Head::Choice(atom) => (atom, true),
        Head::Empty => return Formula::Falsity,
    };
    let conjuncts = atom
        .alternatives()
        .into_iter()
        .map(|args| head_atom(&atom.predicate, args, choice, fresh))
        .collect();
    Formula::conjunction(conjuncts)
}

/// The closed formula for one rule. A bodyless rule keeps `⊤` as antecedent.
pub fn tau_star_rule(rule: &Rule) -> Formula {
    let mut fresh = FreshNameSupply::with_reserved(rule.variables());
    let body: Vec<Formula> = rule.body.iter().map(|l| tau_b(l, &mut fresh)).collect();
    let head = tau_h(&rule.head, &mut fresh);
    Formula::implies(Formula::conjunction(body), head).universal_closure()
}

pub fn tau_star_program(program: &Program) -> TranslationOutput {
    let semantics = if program.is_positive() {
        Semantics::Classical
    } else {
        Semantics::HereAndThere
    };
    TranslationOutput {
        formulas: program.rules().iter().map(tau_star_rule).collect(),
        semantics,
        signature: program.signature().clone(),
    }
}
