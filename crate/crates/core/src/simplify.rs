//! Syntactic clean-up of translated formulas.
//!
//! Every rule is an equivalence in the two-sorted logic, so the pass can be
//! applied before any output format.

use std::collections::BTreeMap;

use crate::ast::{Formula, Relation, Sort, Term, Variable};

/// A set of rewrite rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleSet(u8);

impl RuleSet {
    /// `∃V (V = t ∧ φ)` becomes `φ[V := t]`.
    pub const ELIMINATE_EXISTS: RuleSet = RuleSet(1);
    /// `∀V (V = t → φ)` becomes `φ[V := t]`.
    pub const ELIMINATE_FORALL: RuleSet = RuleSet(1 << 1);
    /// Neutral constants: `⊤ ∧ φ`, `⊥ ∨ φ` and `⊤ → φ` become `φ`.
    pub const NEUTRAL_CONSTANTS: RuleSet = RuleSet(1 << 2);
    /// Quantified variables without occurrences are dropped.
    pub const UNUSED_VARIABLES: RuleSet = RuleSet(1 << 3);
    /// Nested conjunctions and disjunctions are flattened.
    pub const FLATTEN: RuleSet = RuleSet(1 << 4);

    pub const NONE: RuleSet = RuleSet(0);
    pub const ALL: RuleSet = RuleSet(0b1_1111);

    pub fn contains(self, other: RuleSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn union(self, other: RuleSet) -> RuleSet {
        RuleSet(self.0 | other.0)
    }

    pub fn without(self, other: RuleSet) -> RuleSet {
        RuleSet(self.0 & !other.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimplifyConfig {
    pub rules: RuleSet,
    /// At least 1.
    pub max_passes: usize,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        SimplifyConfig {
            rules: RuleSet::ALL,
            max_passes: 8,
        }
    }
}

/// Applies the enabled rules bottom-up until nothing changes or the pass
/// limit is reached.
pub fn simplify(f: &Formula, cfg: &SimplifyConfig) -> Formula {
    let mut current = f.clone();
    for _ in 0..cfg.max_passes.max(1) {
        let next = pass(&current, cfg.rules);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

pub fn simplify_all(formulas: &[Formula], cfg: &SimplifyConfig) -> Vec<Formula> {
    formulas.iter().map(|f| simplify(f, cfg)).collect()
}

fn pass(f: &Formula, rules: RuleSet) -> Formula {
    let rebuilt = match f {
        Formula::Truth | Formula::Falsity | Formula::Atom(_) | Formula::Comparison { .. } => {
            return f.clone()
        }
        Formula::Not(g) => Formula::not(pass(g, rules)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| pass(g, rules)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| pass(g, rules)).collect()),
        Formula::Implies(a, b) => Formula::implies(pass(a, rules), pass(b, rules)),
        Formula::Iff(a, b) => Formula::iff(pass(a, rules), pass(b, rules)),
        Formula::ForAll(vars, body) => Formula::ForAll(vars.clone(), Box::new(pass(body, rules))),
        Formula::Exists(vars, body) => Formula::Exists(vars.clone(), Box::new(pass(body, rules))),
    };
    rewrite(rebuilt, rules)
}

fn rewrite(f: Formula, rules: RuleSet) -> Formula {
    match f {
        Formula::And(gs) => {
            let mut operands = if rules.contains(RuleSet::FLATTEN) {
                flatten(gs, true)
            } else {
                gs
            };
            if rules.contains(RuleSet::NEUTRAL_CONSTANTS) {
                operands.retain(|g| *g != Formula::Truth);
                if operands.is_empty() {
                    return Formula::Truth;
                }
            }
            if operands.len() == 1 && rules.contains(RuleSet::FLATTEN) {
                return operands.pop().unwrap();
            }
            Formula::And(operands)
        }
        Formula::Or(gs) => {
            let mut operands = if rules.contains(RuleSet::FLATTEN) {
                flatten(gs, false)
            } else {
                gs
            };
            if rules.contains(RuleSet::NEUTRAL_CONSTANTS) {
                operands.retain(|g| *g != Formula::Falsity);
                if operands.is_empty() {
                    return Formula::Falsity;
                }
            }
            if operands.len() == 1 && rules.contains(RuleSet::FLATTEN) {
                return operands.pop().unwrap();
            }
            Formula::Or(operands)
        }
        Formula::Implies(a, b) => {
            if rules.contains(RuleSet::NEUTRAL_CONSTANTS) && *a == Formula::Truth {
                *b
            } else {
                Formula::Implies(a, b)
            }
        }
        Formula::Exists(vars, body) => {
            let (vars, body) = if rules.contains(RuleSet::ELIMINATE_EXISTS) {
                eliminate_exists(vars, *body)
            } else {
                (vars, *body)
            };
            finish_quantifier(vars, body, rules, false)
        }
        Formula::ForAll(vars, body) => {
            let (vars, body) = if rules.contains(RuleSet::ELIMINATE_FORALL) {
                eliminate_forall(vars, *body)
            } else {
                (vars, *body)
            };
            finish_quantifier(vars, body, rules, true)
        }
        other => other,
    }
}

fn flatten(operands: Vec<Formula>, conjunction: bool) -> Vec<Formula> {
    let mut out = Vec::with_capacity(operands.len());
    for g in operands {
        match g {
            Formula::And(inner) if conjunction => out.extend(flatten(inner, true)),
            Formula::Or(inner) if !conjunction => out.extend(flatten(inner, false)),
            other => out.push(other),
        }
    }
    out
}

fn finish_quantifier(mut vars: Vec<Variable>, body: Formula, rules: RuleSet, universal: bool) -> Formula {
    if rules.contains(RuleSet::UNUSED_VARIABLES) {
        let free = body.free_variables();
        vars.retain(|v| free.iter().any(|w| w.name == v.name));
    }
    if vars.is_empty() {
        return body;
    }
    if universal {
        Formula::ForAll(vars, Box::new(body))
    } else {
        Formula::Exists(vars, Box::new(body))
    }
}

/// Whether `t` may replace `v` everywhere.
fn substitutable(v: &Variable, t: &Term) -> bool {
    if !t.is_atomic() || t.mentions(&v.name) {
        return false;
    }
    match v.sort {
        Sort::Program => true,
        Sort::Integer => match t {
            Term::Integer(_) => true,
            Term::Variable(w) => w.sort == Sort::Integer,
            _ => false,
        },
    }
}

/// Finds a conjunct `V = t` (or `t = V`) for one of `vars`.
fn find_definition(vars: &[Variable], conjuncts: &[Formula]) -> Option<(usize, usize, Term)> {
    for (vi, v) in vars.iter().enumerate() {
        for (ci, c) in conjuncts.iter().enumerate() {
            if let Formula::Comparison {
                relation: Relation::Equal,
                lhs,
                rhs,
            } = c
            {
                for (this, other) in [(lhs, rhs), (rhs, lhs)] {
                    if matches!(this, Term::Variable(w) if w.name == v.name) && substitutable(v, other) {
                        return Some((vi, ci, other.clone()));
                    }
                }
            }
        }
    }
    None
}

fn conjuncts_of(f: Formula) -> Vec<Formula> {
    match f {
        Formula::And(gs) => gs,
        other => vec![other],
    }
}

fn eliminate_exists(mut vars: Vec<Variable>, body: Formula) -> (Vec<Variable>, Formula) {
    let mut conjuncts = conjuncts_of(body);
    while let Some((vi, ci, t)) = find_definition(&vars, &conjuncts) {
        let v = vars.remove(vi);
        conjuncts.remove(ci);
        let map = BTreeMap::from([(v.name, t)]);
        conjuncts = conjuncts.iter().map(|c| c.substitute(&map)).collect();
    }
    (vars, Formula::conjunction(conjuncts))
}

fn eliminate_forall(mut vars: Vec<Variable>, body: Formula) -> (Vec<Variable>, Formula) {
    let Formula::Implies(antecedent, mut consequent) = body else {
        return (vars, body);
    };
    let mut conjuncts = conjuncts_of(*antecedent);
    while let Some((vi, ci, t)) = find_definition(&vars, &conjuncts) {
        let v = vars.remove(vi);
        conjuncts.remove(ci);
        let map = BTreeMap::from([(v.name, t)]);
        conjuncts = conjuncts.iter().map(|c| c.substitute(&map)).collect();
        *consequent = consequent.substitute(&map);
    }
    (vars, Formula::implies(Formula::conjunction(conjuncts), *consequent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_term};
    use crate::translate::{tau_b, tau_h, tau_star_rule, val, FreshNameSupply};

    fn cfg() -> SimplifyConfig {
        SimplifyConfig::default()
    }

    #[test]
    fn colour_pool_value() {
        let z = Variable::program("Z");
        let f = val(&parse_term("r;g;b").unwrap(), &z, &mut FreshNameSupply::new());
        let eq = |c: &str| Formula::equal(Term::var(&z), Term::Symbol(c.into()));
        assert_eq!(simplify(&f, &cfg()), Formula::Or(vec![eq("r"), eq("g"), eq("b")]));
    }

    #[test]
    fn pooled_body_atom() {
        let program = parse_program(":- q(1;2;3).").unwrap();
        let f = tau_b(&program.rules()[0].body[0], &mut FreshNameSupply::new());
        let q = |n: i64| Formula::atom("q", vec![Term::Integer(n)]);
        assert_eq!(simplify(&f, &cfg()), Formula::Or(vec![q(1), q(2), q(3)]));
    }

    #[test]
    fn pooled_head_atom() {
        let program = parse_program("p(X;Y).").unwrap();
        let f = tau_h(&program.rules()[0].head, &mut FreshNameSupply::new());
        let p = |x: &str| Formula::atom("p", vec![Term::Variable(Variable::program(x))]);
        assert_eq!(simplify(&f, &cfg()), Formula::And(vec![p("X"), p("Y")]));
    }

    #[test]
    fn integer_variables_take_only_integer_definitions() {
        // exists N (N = a and p(N)) stays: a is not an integer
        let n = Variable::integer("N");
        let f = Formula::exists(
            vec![n.clone()],
            Formula::And(vec![
                Formula::equal(Term::var(&n), Term::Symbol("a".into())),
                Formula::atom("p", vec![Term::var(&n)]),
            ]),
        );
        assert_eq!(simplify(&f, &cfg()), f);
    }

    #[test]
    fn arithmetic_is_not_duplicated() {
        let z = Variable::program("Z");
        let i = Variable::integer("I");
        let f = Formula::exists(
            vec![z.clone()],
            Formula::And(vec![
                Formula::equal(
                    Term::var(&z),
                    Term::arithmetic(crate::ast::FoArithOp::Add, Term::var(&i), Term::Integer(1)),
                ),
                Formula::atom("p", vec![Term::var(&z)]),
            ]),
        );
        assert_eq!(simplify(&f, &cfg()), f);
    }

    #[test]
    fn neutral_constants_and_unused_variables() {
        let p = Formula::prop("p");
        let f = Formula::And(vec![Formula::Truth, p.clone()]);
        assert_eq!(simplify(&f, &cfg()), p);
        let f = Formula::Or(vec![Formula::Falsity, p.clone()]);
        assert_eq!(simplify(&f, &cfg()), p);
        let f = Formula::implies(Formula::Truth, p.clone());
        assert_eq!(simplify(&f, &cfg()), p);
        let f = Formula::forall(vec![Variable::program("X")], p.clone());
        assert_eq!(simplify(&f, &cfg()), p);
    }

    #[test]
    fn disabled_rules_are_not_applied() {
        let f = Formula::implies(Formula::Truth, Formula::prop("p"));
        let config = SimplifyConfig {
            rules: RuleSet::ALL.without(RuleSet::NEUTRAL_CONSTANTS),
            max_passes: 8,
        };
        assert_eq!(simplify(&f, &config), f);
    }

    #[test]
    fn substitution_does_not_capture() {
        // exists Z (Z = Y and exists Y q(Z, Y))
        let z = Variable::program("Z");
        let y = Variable::program("Y");
        let f = Formula::exists(
            vec![z.clone()],
            Formula::And(vec![
                Formula::equal(Term::var(&z), Term::var(&y)),
                Formula::exists(vec![y.clone()], Formula::atom("q", vec![Term::var(&z), Term::var(&y)])),
            ]),
        );
        let g = simplify(&f, &cfg());
        let Formula::Exists(vars, body) = &g else { panic!("{g:?}") };
        assert_ne!(vars[0].name, "Y");
        assert_eq!(
            **body,
            Formula::atom("q", vec![Term::var(&y), Term::var(&vars[0])])
        );
    }

    #[test]
    fn pooled_head_rule_simplifies_fully() {
        let program = parse_program("p(X;Y) :- q(X,Y).").unwrap();
        let f = simplify(&tau_star_rule(&program.rules()[0]), &cfg());
        let (u1, u2) = (Variable::program("U1"), Variable::program("U2"));
        let expected = Formula::forall(
            vec![u1.clone(), u2.clone()],
            Formula::implies(
                Formula::atom("q", vec![Term::var(&u1), Term::var(&u2)]),
                Formula::And(vec![
                    Formula::atom("p", vec![Term::var(&u1)]),
                    Formula::atom("p", vec![Term::var(&u2)]),
                ]),
            ),
        );
        assert_eq!(f, expected);
        assert_eq!(simplify(&f, &cfg()), f);
    }
}
