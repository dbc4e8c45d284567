//! Instantiation of translated rules over finite sets of values.
//!
//! Quantifiers are expanded into conjunctions and disjunctions and
//! comparisons between values are folded to `⊤` or `⊥`, which leaves a
//! propositional formula the brute-force checks can read.
//!
//! A quantified variable that a top-level conjunct pins to a known value
//! (`V = t` with `t` already evaluable) is instantiated with that value only.
//! Every other variable ranges over a universe holding the values of all
//! subterms of the rule, which contains every value a `val` condition can
//! accept. Rule variables range over a caller supplied domain.

use std::collections::{BTreeMap, BTreeSet};

use super::{evaluate_ground_term, OracleError, Value};
use crate::ast::{
    ArithOp, BodyLiteral, Formula, Head, PredicateAtom, Program, ProgramTerm, Rule, Sort, Term,
    Variable,
};
use crate::translate::tau_star_rule;

/// Upper bound on the size of any value set.
pub const MAX_VALUES: usize = 10_000;

/// The quotient/remainder pairs accepted by the translation of `a / b` and
/// `a \ b`: `a = b*q + r`, `0 <= r < q`. When `b = -1` and `a < 0` every
/// `q >= -a` qualifies; the enumeration stops at `q = |a| + 1`.
pub fn division_solutions(a: i64, b: i64) -> Vec<(i64, i64)> {
    if b == 0 {
        return vec![];
    }
    let bound = a.unsigned_abs().saturating_add(1).min(i64::MAX as u64) as i64;
    let mut out = Vec::new();
    for q in 1..=bound {
        let Some(r) = b.checked_mul(q).and_then(|bq| a.checked_sub(bq)) else {
            continue;
        };
        if r >= 0 && r < q {
            out.push((q, r));
        }
    }
    out
}

fn show(t: &ProgramTerm) -> String {
    format!("{t:?}")
}

fn check_size(set: &BTreeSet<Value>, t: &ProgramTerm) -> Result<(), OracleError> {
    if set.len() > MAX_VALUES {
        return Err(OracleError::TooManyValues(show(t)));
    }
    Ok(())
}

fn integers(set: &BTreeSet<Value>) -> Vec<i64> {
    set.iter().filter_map(Value::as_integer).collect()
}

/// The set of values of a variable-free program term. With `extra`, the
/// quotients and remainders produced along the way are collected too.
fn values_collecting(t: &ProgramTerm, mut extra: Option<&mut BTreeSet<Value>>) -> Result<BTreeSet<Value>, OracleError> {
    let out: BTreeSet<Value> = match t {
        ProgramTerm::Numeral(n) => [Value::Integer(*n)].into(),
        ProgramTerm::Symbol(s) => [Value::Symbol(s.clone())].into(),
        ProgramTerm::Infimum => [Value::Infimum].into(),
        ProgramTerm::Supremum => [Value::Supremum].into(),
        ProgramTerm::Variable(name) => return Err(OracleError::NotGround(name.clone())),
        ProgramTerm::BinaryArith { op, lhs, rhs } => {
            let left = integers(&values_collecting(lhs, extra.as_deref_mut())?);
            let right = integers(&values_collecting(rhs, extra.as_deref_mut())?);
            let mut out = BTreeSet::new();
            for &a in &left {
                for &b in &right {
                    let overflow = || OracleError::Overflow(format!("{a} {} {b}", op.symbol()));
                    match op {
                        ArithOp::Add => out.insert(Value::Integer(a.checked_add(b).ok_or_else(overflow)?)),
                        ArithOp::Subtract => out.insert(Value::Integer(a.checked_sub(b).ok_or_else(overflow)?)),
                        ArithOp::Multiply => out.insert(Value::Integer(a.checked_mul(b).ok_or_else(overflow)?)),
                        ArithOp::Divide | ArithOp::Modulo => {
                            for (q, r) in division_solutions(a, b) {
                                if let Some(extra) = extra.as_deref_mut() {
                                    extra.insert(Value::Integer(q));
                                    extra.insert(Value::Integer(r));
                                }
                                out.insert(Value::Integer(if *op == ArithOp::Divide { q } else { r }));
                            }
                            true
                        }
                    };
                }
            }
            out
        }
        ProgramTerm::Interval { lower, upper } => {
            let lows = integers(&values_collecting(lower, extra.as_deref_mut())?);
            let highs = integers(&values_collecting(upper, extra.as_deref_mut())?);
            let mut out = BTreeSet::new();
            for &a in &lows {
                for &b in &highs {
                    if b >= a && (b as i128 - a as i128) >= MAX_VALUES as i128 {
                        return Err(OracleError::TooManyValues(show(t)));
                    }
                    out.extend((a..=b.max(a - 1)).map(Value::Integer));
                }
            }
            out
        }
        ProgramTerm::Tuple(elements) => {
            let mut rows: Vec<Vec<Value>> = vec![vec![]];
            for e in elements {
                let vs = values_collecting(e, extra.as_deref_mut())?;
                let mut next = Vec::new();
                for row in &rows {
                    for v in &vs {
                        let mut r = row.clone();
                        r.push(v.clone());
                        next.push(r);
                    }
                }
                if next.len() > MAX_VALUES {
                    return Err(OracleError::TooManyValues(show(t)));
                }
                rows = next;
            }
            rows.into_iter().map(Value::Tuple).collect()
        }
        ProgramTerm::Pool(alternatives) => {
            let mut out = BTreeSet::new();
            for a in alternatives {
                out.extend(values_collecting(a, extra.as_deref_mut())?);
            }
            out
        }
    };
    check_size(&out, t)?;
    Ok(out)
}

/// The set of values of a variable-free program term.
pub fn value_set(t: &ProgramTerm) -> Result<BTreeSet<Value>, OracleError> {
    values_collecting(t, None)
}

/// Values of every subterm of `t`, plus intermediate quotients and remainders.
fn subterm_values(t: &ProgramTerm, out: &mut BTreeSet<Value>) -> Result<(), OracleError> {
    let mut extra = BTreeSet::new();
    out.extend(values_collecting(t, Some(&mut extra))?);
    out.extend(extra);
    match t {
        ProgramTerm::BinaryArith { lhs, rhs, .. } => {
            subterm_values(lhs, out)?;
            subterm_values(rhs, out)
        }
        ProgramTerm::Interval { lower, upper } => {
            subterm_values(lower, out)?;
            subterm_values(upper, out)
        }
        ProgramTerm::Tuple(elements) | ProgramTerm::Pool(elements) => {
            elements.iter().try_for_each(|e| subterm_values(e, out))
        }
        _ => Ok(()),
    }
}

pub fn value_to_program_term(v: &Value) -> ProgramTerm {
    match v {
        Value::Infimum => ProgramTerm::Infimum,
        Value::Integer(n) => ProgramTerm::Numeral(*n),
        Value::Symbol(s) => ProgramTerm::Symbol(s.clone()),
        Value::Tuple(elements) => ProgramTerm::Tuple(elements.iter().map(value_to_program_term).collect()),
        Value::Supremum => ProgramTerm::Supremum,
    }
}

/// All instances of the rule obtained by replacing its variables with
/// values from `domain`.
pub fn rule_instances(rule: &Rule, domain: &[Value]) -> Vec<Rule> {
    let variables = rule.variables();
    let mut assignments: Vec<BTreeMap<String, ProgramTerm>> = vec![BTreeMap::new()];
    for name in &variables {
        let mut next = Vec::with_capacity(assignments.len() * domain.len());
        for assignment in &assignments {
            for v in domain {
                let mut a = assignment.clone();
                a.insert(name.clone(), value_to_program_term(v));
                next.push(a);
            }
        }
        assignments = next;
    }
    assignments.iter().map(|a| rule.substitute(a)).collect()
}

/// Values the quantifiers in the translation of `program` have to range
/// over when its rule variables take values from `domain`.
pub fn universe_of_program(program: &Program, domain: &[Value]) -> Result<BTreeSet<Value>, OracleError> {
    let mut out: BTreeSet<Value> = domain.iter().cloned().collect();
    for rule in program.rules() {
        for instance in rule_instances(rule, domain) {
            for t in instance.terms() {
                subterm_values(t, &mut out)?;
            }
        }
    }
    Ok(out)
}

fn evaluate(t: &Term, env: &BTreeMap<String, Value>) -> Result<Value, OracleError> {
    let bound: BTreeMap<String, Term> = env.iter().map(|(k, v)| (k.clone(), v.to_term())).collect();
    evaluate_ground_term(&t.substitute(&bound))
}

fn evaluable(t: &Term, env: &BTreeMap<String, Value>) -> bool {
    t.variables().iter().all(|v| env.contains_key(&v.name))
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(gs) => gs.iter().collect(),
        other => vec![other],
    }
}

/// A value fixed for `name` by a top-level equation in `guard`.
fn pinned(guard: &Formula, name: &str, env: &BTreeMap<String, Value>) -> Result<Option<Value>, OracleError> {
    for c in conjuncts(guard) {
        if let Formula::Comparison {
            relation: crate::ast::Relation::Equal,
            lhs,
            rhs,
        } = c
        {
            for (side, other) in [(lhs, rhs), (rhs, lhs)] {
                if matches!(side, Term::Variable(v) if v.name == name)
                    && !other.mentions(name)
                    && evaluable(other, env)
                {
                    return Ok(Some(evaluate(other, env)?));
                }
            }
        }
    }
    Ok(None)
}

fn candidates(
    variable: &Variable,
    guard: Option<&Formula>,
    env: &BTreeMap<String, Value>,
    universe: &BTreeSet<Value>,
) -> Result<Vec<Value>, OracleError> {
    let fits = |v: &Value| variable.sort == Sort::Program || v.as_integer().is_some();
    if let Some(guard) = guard {
        if let Some(v) = pinned(guard, &variable.name, env)? {
            return Ok(if fits(&v) { vec![v] } else { vec![] });
        }
    }
    Ok(universe.iter().filter(|v| fits(v)).cloned().collect())
}

fn fold_and(parts: Vec<Formula>) -> Formula {
    let mut kept = Vec::new();
    for p in parts {
        match p {
            Formula::Truth => {}
            Formula::Falsity => return Formula::Falsity,
            Formula::And(inner) => kept.extend(inner),
            other => kept.push(other),
        }
    }
    Formula::conjunction(kept)
}

fn fold_or(parts: Vec<Formula>) -> Formula {
    let mut kept = Vec::new();
    for p in parts {
        match p {
            Formula::Falsity => {}
            Formula::Truth => return Formula::Truth,
            Formula::Or(inner) => kept.extend(inner),
            other => kept.push(other),
        }
    }
    Formula::disjunction(kept)
}

fn fold_not(f: Formula) -> Formula {
    match f {
        Formula::Truth => Formula::Falsity,
        Formula::Falsity => Formula::Truth,
        other => Formula::not(other),
    }
}

fn fold_implies(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::Falsity, _) | (_, Formula::Truth) => Formula::Truth,
        (Formula::Truth, b) => b,
        (a, b) => Formula::implies(a, b),
    }
}

struct Expander<'a> {
    universe: &'a BTreeSet<Value>,
}

impl Expander<'_> {
    fn expand(&self, f: &Formula, env: &mut BTreeMap<String, Value>) -> Result<Formula, OracleError> {
        Ok(match f {
            Formula::Truth | Formula::Falsity => f.clone(),
            Formula::Atom(atom) => Formula::Atom(PredicateAtom {
                predicate: atom.predicate.clone(),
                primed: atom.primed,
                arguments: atom
                    .arguments
                    .iter()
                    .map(|t| evaluate(t, env).map(|v| v.to_term()))
                    .collect::<Result<_, _>>()?,
            }),
            Formula::Comparison { relation, lhs, rhs } => {
                let (l, r) = (evaluate(lhs, env)?, evaluate(rhs, env)?);
                if relation.holds(&l, &r) {
                    Formula::Truth
                } else {
                    Formula::Falsity
                }
            }
            Formula::Not(g) => fold_not(self.expand(g, env)?),
            Formula::And(gs) => fold_and(gs.iter().map(|g| self.expand(g, env)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => fold_or(gs.iter().map(|g| self.expand(g, env)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => fold_implies(self.expand(a, env)?, self.expand(b, env)?),
            Formula::Iff(a, b) => {
                let (a, b) = (self.expand(a, env)?, self.expand(b, env)?);
                fold_and(vec![fold_implies(a.clone(), b.clone()), fold_implies(b, a)])
            }
            Formula::Exists(vars, body) => self.quantifier(false, vars, body, Some(&**body), env)?,
            Formula::ForAll(vars, body) => {
                let guard = match &**body {
                    Formula::Implies(a, _) => Some(&**a),
                    _ => None,
                };
                self.quantifier(true, vars, body, guard, env)?
            }
        })
    }

    fn quantifier(
        &self,
        universal: bool,
        vars: &[Variable],
        body: &Formula,
        guard: Option<&Formula>,
        env: &mut BTreeMap<String, Value>,
    ) -> Result<Formula, OracleError> {
        let Some((first, rest)) = vars.split_first() else {
            return self.expand(body, env);
        };
        let shadowed = env.remove(&first.name);
        let mut parts = Vec::new();
        let mut outcome = Ok(());
        for v in candidates(first, guard, env, self.universe)? {
            env.insert(first.name.clone(), v);
            match self.quantifier(universal, rest, body, guard, env) {
                Ok(part) => parts.push(part),
                Err(e) => {
                    outcome = Err(e);
                    break;
                }
            }
        }
        env.remove(&first.name);
        if let Some(s) = shadowed {
            env.insert(first.name.clone(), s);
        }
        outcome?;
        Ok(if universal { fold_and(parts) } else { fold_or(parts) })
    }
}

/// Expands every quantifier of a closed formula over `universe`.
pub fn ground_formula(f: &Formula, universe: &BTreeSet<Value>) -> Result<Formula, OracleError> {
    Expander { universe }.expand(f, &mut BTreeMap::new())
}

/// The translation of `rule` with its variables instantiated over `domain`
/// and the remaining quantifiers expanded over `universe`.
pub fn ground_rule(rule: &Rule, domain: &[Value], universe: &BTreeSet<Value>) -> Result<Formula, OracleError> {
    let f = tau_star_rule(rule);
    let expander = Expander { universe };
    let mut env = BTreeMap::new();
    match (&f, rule.variables().is_empty()) {
        (Formula::ForAll(vars, body), false) => {
            let mut assignments: Vec<Vec<Value>> = vec![vec![]];
            for _ in vars {
                assignments = assignments
                    .iter()
                    .flat_map(|a| {
                        domain.iter().map(move |v| {
                            let mut a = a.clone();
                            a.push(v.clone());
                            a
                        })
                    })
                    .collect();
            }
            let mut parts = Vec::with_capacity(assignments.len());
            for assignment in assignments {
                for (var, value) in vars.iter().zip(assignment) {
                    env.insert(var.name.clone(), value);
                }
                parts.push(expander.expand(body, &mut env)?);
            }
            Ok(fold_and(parts))
        }
        _ => expander.expand(&f, &mut env),
    }
}

/// The conjunction of the grounded rule formulas of `program`.
pub fn ground_program_formula(program: &Program, domain: &[Value]) -> Result<Formula, OracleError> {
    let universe = universe_of_program(program, domain)?;
    let parts = program
        .rules()
        .iter()
        .map(|r| ground_rule(r, domain, &universe))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(fold_and(parts))
}

fn ground_atoms(predicate: &str, args: &[ProgramTerm]) -> Result<Vec<Formula>, OracleError> {
    let mut rows: Vec<Vec<Value>> = vec![vec![]];
    for t in args {
        let vs = value_set(t)?;
        rows = rows
            .iter()
            .flat_map(|row| {
                vs.iter().map(move |v| {
                    let mut r = row.clone();
                    r.push(v.clone());
                    r
                })
            })
            .collect();
    }
    Ok(rows
        .into_iter()
        .map(|r| super::GroundAtom::new(predicate, r).to_formula(false))
        .collect())
}

/// Reads a variable-free rule directly through the value sets of its
/// terms: a body atom holds when one of its instances does, a head stands
/// for all of its instances. This bypasses the translation and serves as
/// an independent reference for it.
pub fn instantiate_rule(rule: &Rule) -> Result<Formula, OracleError> {
    let mut body = Vec::new();
    for literal in &rule.body {
        let part = match literal {
            BodyLiteral::Comparison { relation, lhs, rhs } => {
                let (l, r) = (value_set(lhs)?, value_set(rhs)?);
                if l.iter().any(|a| r.iter().any(|b| relation.holds(a, b))) {
                    Formula::Truth
                } else {
                    Formula::Falsity
                }
            }
            BodyLiteral::Positive(atom) | BodyLiteral::Negated(atom) | BodyLiteral::DoublyNegated(atom) => {
                let wrap = |f: Formula| match literal {
                    BodyLiteral::Negated(_) => fold_not(f),
                    BodyLiteral::DoublyNegated(_) => fold_not(fold_not(f)),
                    _ => f,
                };
                let mut disjuncts = Vec::new();
                for args in atom.alternatives() {
                    disjuncts.extend(ground_atoms(&atom.predicate, args)?.into_iter().map(wrap));
                }
                fold_or(disjuncts)
            }
        };
        body.push(part);
    }
    let head = match &rule.head {
        Head::Empty => Formula::Falsity,
        Head::Basic(atom) | Head::Choice(atom) => {
            let choice = matches!(rule.head, Head::Choice(_));
            let mut conjuncts = Vec::new();
            for args in atom.alternatives() {
                for a in ground_atoms(&atom.predicate, args)? {
                    conjuncts.push(if choice {
                        Formula::Or(vec![a.clone(), Formula::not(a)])
                    } else {
                        a
                    });
                }
            }
            fold_and(conjuncts)
        }
    };
    Ok(fold_implies(fold_and(body), head))
}
