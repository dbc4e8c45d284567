//! The human-readable formula syntax.
//!
//! Bound variables are renamed on output: variables from a universal
//! closure become `U1, U2, ...`, integer variables `N1, ...` and all other
//! program variables `X1, ...`, numbered in order of appearance across one
//! rendering call. Conjunctions and disjunctions that do not fit in the
//! line are broken after each operator and aligned under their first
//! operand.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{name_prefix, FoArithOp, Formula, PredicateAtom, Sort, Term, Variable};
use crate::ht_map::{HtTheory, TheoryBody};

pub const LINE_WIDTH: usize = 80;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Naming {
    #[default]
    Renumber,
    /// Keep the names the formulas were built with.
    Raw,
}

#[derive(Clone, Debug)]
pub struct HumanRenderer {
    pub naming: Naming,
    pub width: usize,
}

impl Default for HumanRenderer {
    fn default() -> Self {
        HumanRenderer {
            naming: Naming::Renumber,
            width: LINE_WIDTH,
        }
    }
}

struct Renamer {
    counters: BTreeMap<&'static str, usize>,
    avoid: BTreeSet<String>,
}

impl Renamer {
    fn new<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Self {
        let avoid = formulas
            .into_iter()
            .flat_map(|f| f.free_variables())
            .map(|v| v.name)
            .collect();
        Renamer {
            counters: BTreeMap::new(),
            avoid,
        }
    }

    fn next(&mut self, v: &Variable) -> Variable {
        let class = if name_prefix(&v.name) == "U" {
            "U"
        } else if v.sort == Sort::Integer {
            "N"
        } else {
            "X"
        };
        let counter = self.counters.entry(class).or_insert(0);
        loop {
            *counter += 1;
            let name = format!("{class}{counter}");
            if !self.avoid.contains(&name) {
                return Variable { name, sort: v.sort };
            }
        }
    }

    fn term(t: &Term, env: &BTreeMap<String, Term>) -> Term {
        t.substitute(env)
    }

    fn formula(&mut self, f: &Formula, env: &BTreeMap<String, Term>) -> Formula {
        match f {
            Formula::Truth | Formula::Falsity => f.clone(),
            Formula::Atom(atom) => Formula::Atom(PredicateAtom {
                arguments: atom.arguments.iter().map(|t| Self::term(t, env)).collect(),
                ..atom.clone()
            }),
            Formula::Comparison { relation, lhs, rhs } => Formula::Comparison {
                relation: *relation,
                lhs: Self::term(lhs, env),
                rhs: Self::term(rhs, env),
            },
            Formula::Not(g) => Formula::Not(Box::new(self.formula(g, env))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| self.formula(g, env)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.formula(g, env)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(self.formula(a, env)), Box::new(self.formula(b, env)))
            }
            Formula::Iff(a, b) => Formula::Iff(Box::new(self.formula(a, env)), Box::new(self.formula(b, env))),
            Formula::ForAll(vars, body) | Formula::Exists(vars, body) => {
                let mut inner = env.clone();
                let renamed: Vec<Variable> = vars
                    .iter()
                    .map(|v| {
                        let fresh = self.next(v);
                        inner.insert(v.name.clone(), Term::var(&fresh));
                        fresh
                    })
                    .collect();
                let body = Box::new(self.formula(body, &inner));
                if matches!(f, Formula::ForAll(..)) {
                    Formula::ForAll(renamed, body)
                } else {
                    Formula::Exists(renamed, body)
                }
            }
        }
    }
}

fn precedence(op: FoArithOp) -> u8 {
    match op {
        FoArithOp::Add | FoArithOp::Subtract => 1,
        FoArithOp::Multiply => 2,
    }
}

fn write_term(out: &mut String, t: &Term, level: u8) {
    match t {
        Term::Variable(v) => out.push_str(&v.name),
        Term::Integer(n) => out.push_str(&n.to_string()),
        Term::Symbol(s) => out.push_str(s),
        Term::Infimum => out.push_str("#inf"),
        Term::Supremum => out.push_str("#sup"),
        Term::Arithmetic { op, lhs, rhs } => {
            let own = precedence(*op);
            if own < level {
                out.push('(');
            }
            write_term(out, lhs, own);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_term(out, rhs, own + 1);
            if own < level {
                out.push(')');
            }
        }
        Term::Tuple(elements) => {
            out.push('(');
            for (i, e) in elements.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(out, e, 0);
            }
            out.push(')');
        }
    }
}

pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t, 0);
    out
}

fn column(out: &str) -> usize {
    match out.rfind('\n') {
        Some(i) => out[i + 1..].chars().count(),
        None => out.chars().count(),
    }
}

impl HumanRenderer {
    pub fn raw() -> Self {
        HumanRenderer {
            naming: Naming::Raw,
            ..Self::default()
        }
    }

    fn flat(&self, f: &Formula) -> String {
        let mut out = String::new();
        HumanRenderer {
            naming: self.naming,
            width: usize::MAX,
        }
        .write(&mut out, f);
        out
    }

    fn write(&self, out: &mut String, f: &Formula) {
        match f {
            Formula::Truth => out.push_str("#true"),
            Formula::Falsity => out.push_str("#false"),
            Formula::Atom(atom) => {
                out.push_str(&atom.predicate);
                if atom.primed {
                    out.push('\'');
                }
                if !atom.arguments.is_empty() {
                    out.push('(');
                    for (i, t) in atom.arguments.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_term(out, t, 0);
                    }
                    out.push(')');
                }
            }
            Formula::Comparison { relation, lhs, rhs } => {
                out.push('(');
                write_term(out, lhs, 0);
                out.push(' ');
                out.push_str(relation.symbol());
                out.push(' ');
                write_term(out, rhs, 0);
                out.push(')');
            }
            Formula::Not(g) => {
                out.push_str("not ");
                self.write(out, g);
            }
            Formula::And(gs) => self.write_list(out, f, gs, "and"),
            Formula::Or(gs) => self.write_list(out, f, gs, "or"),
            Formula::Implies(a, b) => self.write_binary(out, a, "->", b),
            Formula::Iff(a, b) => self.write_binary(out, a, "<->", b),
            Formula::ForAll(vars, body) => self.write_quantifier(out, "forall", vars, body),
            Formula::Exists(vars, body) => self.write_quantifier(out, "exists", vars, body),
        }
    }

    fn write_binary(&self, out: &mut String, a: &Formula, op: &str, b: &Formula) {
        out.push('(');
        self.write(out, a);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        self.write(out, b);
        out.push(')');
    }

    fn write_quantifier(&self, out: &mut String, keyword: &str, vars: &[Variable], body: &Formula) {
        out.push_str(keyword);
        for v in vars {
            out.push(' ');
            out.push_str(&v.name);
        }
        out.push(' ');
        self.write(out, body);
    }

    fn write_list(&self, out: &mut String, whole: &Formula, operands: &[Formula], op: &str) {
        let start = column(out);
        let broken = self.width != usize::MAX
            && operands.len() > 1
            && start + self.flat(whole).chars().count() > self.width;
        out.push('(');
        for (i, g) in operands.iter().enumerate() {
            if i > 0 {
                out.push(' ');
                out.push_str(op);
                if broken {
                    out.push('\n');
                    out.push_str(&" ".repeat(start + 1));
                } else {
                    out.push(' ');
                }
            }
            self.write(out, g);
        }
        out.push(')');
    }

    fn prepare(&self, formulas: &[&Formula]) -> Vec<Formula> {
        match self.naming {
            Naming::Raw => formulas.iter().map(|f| (*f).clone()).collect(),
            Naming::Renumber => {
                let mut renamer = Renamer::new(formulas.iter().copied());
                formulas
                    .iter()
                    .map(|f| renamer.formula(f, &BTreeMap::new()))
                    .collect()
            }
        }
    }

    pub fn formula(&self, f: &Formula) -> String {
        let prepared = self.prepare(&[f]);
        let mut out = String::new();
        self.write(&mut out, &prepared[0]);
        out
    }

    /// One formula per line, numbered as a whole.
    pub fn formulas(&self, formulas: &[Formula]) -> String {
        let refs: Vec<&Formula> = formulas.iter().collect();
        let mut out = String::new();
        for f in self.prepare(&refs) {
            self.write(&mut out, &f);
            out.push('\n');
        }
        out
    }

    fn program_conjunction(formulas: &[Formula]) -> Formula {
        if formulas.is_empty() {
            Formula::Truth
        } else {
            Formula::And(formulas.to_vec())
        }
    }

    /// Axioms first, then either the program formulas or the equivalence
    /// of the two program conjunctions.
    pub fn theory(&self, theory: &HtTheory) -> String {
        match &theory.body {
            TheoryBody::Single(formulas) => {
                let all: Vec<Formula> = theory.axioms.iter().chain(formulas).cloned().collect();
                self.formulas(&all)
            }
            TheoryBody::Pair { left, right } => {
                let lhs = Self::program_conjunction(left);
                let rhs = Self::program_conjunction(right);
                let mut refs: Vec<&Formula> = theory.axioms.iter().collect();
                refs.push(&lhs);
                refs.push(&rhs);
                let mut prepared = self.prepare(&refs);
                let rhs = prepared.pop().expect("right side");
                let lhs = prepared.pop().expect("left side");
                let mut out = String::new();
                for axiom in &prepared {
                    self.write(&mut out, axiom);
                    out.push('\n');
                }
                out.push('(');
                self.write(&mut out, &lhs);
                out.push_str("\n<->\n ");
                self.write(&mut out, &rhs);
                out.push_str(")\n");
                out
            }
        }
    }
}

pub fn render_formula(f: &Formula) -> String {
    HumanRenderer::default().formula(f)
}

pub fn render_human(theory: &HtTheory) -> String {
    HumanRenderer::default().theory(theory)
}
