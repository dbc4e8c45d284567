//! Abstract syntax for programs and for the two-sorted first-order formulas
//! they are translated into.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Subtract,
    Multiply,
    Divide,
    Modulo,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Subtract => "-",
            ArithOp::Multiply => "*",
            ArithOp::Divide => "/",
            ArithOp::Modulo => "\\",
        }
    }
}

/// A term of the input language.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProgramTerm {
    Numeral(i64),
    Symbol(String),
    Variable(String),
    Infimum,
    Supremum,
    BinaryArith {
        op: ArithOp,
        lhs: Box<ProgramTerm>,
        rhs: Box<ProgramTerm>,
    },
    Interval {
        lower: Box<ProgramTerm>,
        upper: Box<ProgramTerm>,
    },
    /// Never of arity 1; arity 0 only appears as an empty atom argument list.
    Tuple(Vec<ProgramTerm>),
    /// Always at least two alternatives.
    Pool(Vec<ProgramTerm>),
}

impl ProgramTerm {
    pub fn binary(op: ArithOp, lhs: ProgramTerm, rhs: ProgramTerm) -> Self {
        ProgramTerm::BinaryArith {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn interval(lower: ProgramTerm, upper: ProgramTerm) -> Self {
        ProgramTerm::Interval {
            lower: Box::new(lower),
            upper: Box::new(upper),
        }
    }

    /// Builds a tuple, collapsing a one-element tuple to its element.
    pub fn tuple(mut elements: Vec<ProgramTerm>) -> Self {
        if elements.len() == 1 {
            elements.pop().unwrap()
        } else {
            ProgramTerm::Tuple(elements)
        }
    }

    /// Builds a pool, collapsing a one-alternative pool to its element.
    pub fn pool(mut alternatives: Vec<ProgramTerm>) -> Self {
        if alternatives.len() == 1 {
            alternatives.pop().unwrap()
        } else {
            ProgramTerm::Pool(alternatives)
        }
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            ProgramTerm::Variable(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            ProgramTerm::BinaryArith { lhs, rhs, .. } => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
            ProgramTerm::Interval { lower, upper } => {
                lower.collect_variables(out);
                upper.collect_variables(out);
            }
            ProgramTerm::Tuple(elements) | ProgramTerm::Pool(elements) => {
                for element in elements {
                    element.collect_variables(out);
                }
            }
            ProgramTerm::Numeral(_)
            | ProgramTerm::Symbol(_)
            | ProgramTerm::Infimum
            | ProgramTerm::Supremum => {}
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut vars = Vec::new();
        self.collect_variables(&mut vars);
        vars.is_empty()
    }

    /// Replaces variables by terms (program terms have no binders).
    pub fn substitute(&self, map: &BTreeMap<String, ProgramTerm>) -> ProgramTerm {
        match self {
            ProgramTerm::Variable(name) => map.get(name).cloned().unwrap_or_else(|| self.clone()),
            ProgramTerm::BinaryArith { op, lhs, rhs } => {
                ProgramTerm::binary(*op, lhs.substitute(map), rhs.substitute(map))
            }
            ProgramTerm::Interval { lower, upper } => {
                ProgramTerm::interval(lower.substitute(map), upper.substitute(map))
            }
            ProgramTerm::Tuple(elements) => {
                ProgramTerm::Tuple(elements.iter().map(|e| e.substitute(map)).collect())
            }
            ProgramTerm::Pool(elements) => {
                ProgramTerm::Pool(elements.iter().map(|e| e.substitute(map)).collect())
            }
            _ => self.clone(),
        }
    }
}

/// A predicate symbol together with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Predicate {
            name: name.into(),
            arity,
        }
    }
}

impl std::fmt::Display for Predicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AtomArguments {
    /// `p(t1, ..., tk)`, including the 0-ary `p`.
    Tuple(Vec<ProgramTerm>),
    /// `p(t1; ...; tk)` where every alternative is itself an argument tuple.
    Pool(Vec<Vec<ProgramTerm>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub arguments: AtomArguments,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, arguments: Vec<ProgramTerm>) -> Self {
        Atom {
            predicate: predicate.into(),
            arguments: AtomArguments::Tuple(arguments),
        }
    }

    pub fn propositional(predicate: impl Into<String>) -> Self {
        Atom::new(predicate, vec![])
    }

    pub fn pooled(predicate: impl Into<String>, alternatives: Vec<Vec<ProgramTerm>>) -> Self {
        Atom {
            predicate: predicate.into(),
            arguments: AtomArguments::Pool(alternatives),
        }
    }

    /// The argument tuples this atom stands for: one for an ordinary atom,
    /// one per alternative for a pooled atom.
    pub fn alternatives(&self) -> Vec<&[ProgramTerm]> {
        match &self.arguments {
            AtomArguments::Tuple(args) => vec![args.as_slice()],
            AtomArguments::Pool(alternatives) => alternatives.iter().map(Vec::as_slice).collect(),
        }
    }

    pub fn predicates(&self) -> Vec<Predicate> {
        self.alternatives()
            .into_iter()
            .map(|args| Predicate::new(self.predicate.clone(), args.len()))
            .collect()
    }

    pub fn is_pooled(&self) -> bool {
        matches!(self.arguments, AtomArguments::Pool(_))
    }

    fn collect_variables(&self, out: &mut Vec<String>) {
        for args in self.alternatives() {
            for arg in args {
                arg.collect_variables(out);
            }
        }
    }

    fn substitute(&self, map: &BTreeMap<String, ProgramTerm>) -> Atom {
        let sub = |args: &[ProgramTerm]| args.iter().map(|a| a.substitute(map)).collect();
        Atom {
            predicate: self.predicate.clone(),
            arguments: match &self.arguments {
                AtomArguments::Tuple(args) => AtomArguments::Tuple(sub(args)),
                AtomArguments::Pool(alts) => {
                    AtomArguments::Pool(alts.iter().map(|a| sub(a)).collect())
                }
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Equal,
    NotEqual,
    Less,
    Greater,
    LessEqual,
    GreaterEqual,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::NotEqual => "!=",
            Relation::Less => "<",
            Relation::Greater => ">",
            Relation::LessEqual => "<=",
            Relation::GreaterEqual => ">=",
        }
    }

    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Equal => lhs == rhs,
            Relation::NotEqual => lhs != rhs,
            Relation::Less => lhs < rhs,
            Relation::Greater => lhs > rhs,
            Relation::LessEqual => lhs <= rhs,
            Relation::GreaterEqual => lhs >= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BodyLiteral {
    Positive(Atom),
    Negated(Atom),
    DoublyNegated(Atom),
    Comparison {
        relation: Relation,
        lhs: ProgramTerm,
        rhs: ProgramTerm,
    },
}

impl BodyLiteral {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            BodyLiteral::Positive(a) | BodyLiteral::Negated(a) | BodyLiteral::DoublyNegated(a) => {
                Some(a)
            }
            BodyLiteral::Comparison { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    Basic(Atom),
    /// Simple choice `{ p(t) }` over exactly one atom.
    Choice(Atom),
    Empty,
}

impl Head {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Head::Basic(a) | Head::Choice(a) => Some(a),
            Head::Empty => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyLiteral>,
}

impl Rule {
    pub fn new(head: Head, body: Vec<BodyLiteral>) -> Self {
        Rule { head, body }
    }

    /// Variables of the rule in order of first occurrence (body first, then head).
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        for literal in &self.body {
            match literal {
                BodyLiteral::Comparison { lhs, rhs, .. } => {
                    lhs.collect_variables(&mut out);
                    rhs.collect_variables(&mut out);
                }
                _ => literal.atom().unwrap().collect_variables(&mut out),
            }
        }
        if let Some(atom) = self.head.atom() {
            atom.collect_variables(&mut out);
        }
        out
    }

    /// True when the rule uses negation or a choice head.
    pub fn is_positive(&self) -> bool {
        !matches!(self.head, Head::Choice(_))
            && self.body.iter().all(|l| {
                matches!(
                    l,
                    BodyLiteral::Positive(_) | BodyLiteral::Comparison { .. }
                )
            })
    }

    pub fn predicates(&self) -> Vec<Predicate> {
        let mut out = Vec::new();
        if let Some(atom) = self.head.atom() {
            out.extend(atom.predicates());
        }
        for literal in &self.body {
            if let Some(atom) = literal.atom() {
                out.extend(atom.predicates());
            }
        }
        out
    }

    pub fn substitute(&self, map: &BTreeMap<String, ProgramTerm>) -> Rule {
        let head = match &self.head {
            Head::Basic(a) => Head::Basic(a.substitute(map)),
            Head::Choice(a) => Head::Choice(a.substitute(map)),
            Head::Empty => Head::Empty,
        };
        let body = self
            .body
            .iter()
            .map(|l| match l {
                BodyLiteral::Positive(a) => BodyLiteral::Positive(a.substitute(map)),
                BodyLiteral::Negated(a) => BodyLiteral::Negated(a.substitute(map)),
                BodyLiteral::DoublyNegated(a) => BodyLiteral::DoublyNegated(a.substitute(map)),
                BodyLiteral::Comparison { relation, lhs, rhs } => BodyLiteral::Comparison {
                    relation: *relation,
                    lhs: lhs.substitute(map),
                    rhs: rhs.substitute(map),
                },
            })
            .collect();
        Rule { head, body }
    }

    /// Every program term occurring in the rule, outermost first.
    pub fn terms(&self) -> Vec<&ProgramTerm> {
        let mut out = Vec::new();
        if let Some(atom) = self.head.atom() {
            for args in atom.alternatives() {
                out.extend(args.iter());
            }
        }
        for literal in &self.body {
            match literal {
                BodyLiteral::Comparison { lhs, rhs, .. } => {
                    out.push(lhs);
                    out.push(rhs);
                }
                _ => {
                    for args in literal.atom().unwrap().alternatives() {
                        out.extend(args.iter());
                    }
                }
            }
        }
        out
    }
}

/// A program together with its predicate signature. The signature is derived
/// from the rules and cannot be set independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
    signature: BTreeSet<Predicate>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        let signature = rules.iter().flat_map(Rule::predicates).collect();
        Program { rules, signature }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn signature(&self) -> &BTreeSet<Predicate> {
        &self.signature
    }

    pub fn is_positive(&self) -> bool {
        self.rules.iter().all(Rule::is_positive)
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(|r| r.variables().is_empty())
    }
}

impl Default for Program {
    fn default() -> Self {
        Program::new(vec![])
    }
}

// ---------------------------------------------------------------------------
// First-order formulas

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    /// Ranges over all precomputed terms.
    Program,
    /// Ranges over the integers.
    Integer,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub sort: Sort,
}

impl Variable {
    pub fn program(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            sort: Sort::Program,
        }
    }

    pub fn integer(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            sort: Sort::Integer,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoArithOp {
    Add,
    Subtract,
    Multiply,
}

impl FoArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            FoArithOp::Add => "+",
            FoArithOp::Subtract => "-",
            FoArithOp::Multiply => "*",
        }
    }

    pub fn apply(self, lhs: i64, rhs: i64) -> Option<i64> {
        match self {
            FoArithOp::Add => lhs.checked_add(rhs),
            FoArithOp::Subtract => lhs.checked_sub(rhs),
            FoArithOp::Multiply => lhs.checked_mul(rhs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Variable(Variable),
    Integer(i64),
    Symbol(String),
    Infimum,
    Supremum,
    /// Operands are integer-valued.
    Arithmetic {
        op: FoArithOp,
        lhs: Box<Term>,
        rhs: Box<Term>,
    },
    Tuple(Vec<Term>),
}

impl Term {
    pub fn var(v: &Variable) -> Self {
        Term::Variable(v.clone())
    }

    pub fn arithmetic(op: FoArithOp, lhs: Term, rhs: Term) -> Self {
        Term::Arithmetic {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Whether the term denotes an integer in every interpretation.
    pub fn is_integer_valued(&self) -> bool {
        match self {
            Term::Variable(v) => v.sort == Sort::Integer,
            Term::Integer(_) | Term::Arithmetic { .. } => true,
            _ => false,
        }
    }

    /// Numerals, symbolic constants, variables, `#inf` and `#sup`.
    pub fn is_atomic(&self) -> bool {
        !matches!(self, Term::Arithmetic { .. } | Term::Tuple(_))
    }

    fn collect_variables(&self, out: &mut Vec<Variable>) {
        match self {
            Term::Variable(v) => {
                if !out.iter().any(|o| o.name == v.name) {
                    out.push(v.clone());
                }
            }
            Term::Arithmetic { lhs, rhs, .. } => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
            Term::Tuple(elements) => elements.iter().for_each(|e| e.collect_variables(out)),
            _ => {}
        }
    }

    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Variable(v) => v.name == name,
            Term::Arithmetic { lhs, rhs, .. } => lhs.mentions(name) || rhs.mentions(name),
            Term::Tuple(elements) => elements.iter().any(|e| e.mentions(name)),
            _ => false,
        }
    }

    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Variable(v) => map.get(&v.name).cloned().unwrap_or_else(|| self.clone()),
            Term::Arithmetic { op, lhs, rhs } => {
                Term::arithmetic(*op, lhs.substitute(map), rhs.substitute(map))
            }
            Term::Tuple(elements) => Term::Tuple(elements.iter().map(|e| e.substitute(map)).collect()),
            _ => self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateAtom {
    pub predicate: String,
    /// Set once the atom has been moved to the "there" copy of the signature.
    pub primed: bool,
    pub arguments: Vec<Term>,
}

impl PredicateAtom {
    pub fn new(predicate: impl Into<String>, arguments: Vec<Term>) -> Self {
        PredicateAtom {
            predicate: predicate.into(),
            primed: false,
            arguments,
        }
    }

    pub fn signature(&self) -> Predicate {
        Predicate::new(self.predicate.clone(), self.arguments.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Truth,
    Falsity,
    Atom(PredicateAtom),
    Comparison {
        relation: Relation,
        lhs: Term,
        rhs: Term,
    },
    Not(Box<Formula>),
    /// Non-empty.
    And(Vec<Formula>),
    /// Non-empty.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(Vec<Variable>, Box<Formula>),
    Exists(Vec<Variable>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula is not propositional: contains a quantifier")]
    Quantified,
    #[error("formula is not propositional: contains a comparison")]
    Comparison,
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, arguments: Vec<Term>) -> Self {
        Formula::Atom(PredicateAtom::new(predicate, arguments))
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Formula::atom(predicate, vec![])
    }

    pub fn compare(relation: Relation, lhs: Term, rhs: Term) -> Self {
        Formula::Comparison { relation, lhs, rhs }
    }

    pub fn equal(lhs: Term, rhs: Term) -> Self {
        Formula::compare(Relation::Equal, lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(antecedent: Formula, consequent: Formula) -> Self {
        Formula::Implies(Box::new(antecedent), Box::new(consequent))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// `⊤` for no operands, the operand itself for one, `And` otherwise.
    pub fn conjunction(mut operands: Vec<Formula>) -> Self {
        match operands.len() {
            0 => Formula::Truth,
            1 => operands.pop().unwrap(),
            _ => Formula::And(operands),
        }
    }

    /// `⊥` for no operands, the operand itself for one, `Or` otherwise.
    pub fn disjunction(mut operands: Vec<Formula>) -> Self {
        match operands.len() {
            0 => Formula::Falsity,
            1 => operands.pop().unwrap(),
            _ => Formula::Or(operands),
        }
    }

    /// Omits the quantifier for an empty variable list.
    pub fn forall(variables: Vec<Variable>, body: Formula) -> Self {
        if variables.is_empty() {
            body
        } else {
            Formula::ForAll(variables, Box::new(body))
        }
    }

    pub fn exists(variables: Vec<Variable>, body: Formula) -> Self {
        if variables.is_empty() {
            body
        } else {
            Formula::Exists(variables, Box::new(body))
        }
    }

    /// Variables with a free occurrence, in order of first occurrence.
    pub fn free_variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<Variable>) {
        let push_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<Variable>| {
            for v in t.variables() {
                if !bound.contains(&v.name) && !out.iter().any(|o| o.name == v.name) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Truth | Formula::Falsity => {}
            Formula::Atom(atom) => {
                for arg in &atom.arguments {
                    push_term(arg, bound, out);
                }
            }
            Formula::Comparison { lhs, rhs, .. } => {
                push_term(lhs, bound, out);
                push_term(rhs, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(vars, body) | Formula::Exists(vars, body) => {
                let depth = bound.len();
                bound.extend(vars.iter().map(|v| v.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Names of every variable occurring anywhere, bound or free.
    pub fn variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(atom) => {
                for arg in &atom.arguments {
                    out.extend(arg.variables().into_iter().map(|v| v.name));
                }
            }
            Formula::Comparison { lhs, rhs, .. } => {
                out.extend(lhs.variables().into_iter().map(|v| v.name));
                out.extend(rhs.variables().into_iter().map(|v| v.name));
            }
            Formula::ForAll(vars, _) | Formula::Exists(vars, _) => {
                out.extend(vars.iter().map(|v| v.name.clone()));
            }
            _ => {}
        });
        out
    }

    /// Names bound by some quantifier.
    pub fn bound_variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::ForAll(vars, _) | Formula::Exists(vars, _) = f {
                out.extend(vars.iter().map(|v| v.name.clone()));
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, visitor: &mut impl FnMut(&'a Formula)) {
        visitor(self);
        match self {
            Formula::Not(f) => f.visit(visitor),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.visit(visitor)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(visitor);
                b.visit(visitor);
            }
            Formula::ForAll(_, body) | Formula::Exists(_, body) => body.visit(visitor),
            _ => {}
        }
    }

    /// All predicate atoms, in traversal order.
    pub fn atoms(&self) -> Vec<&PredicateAtom> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(atom) = f {
                out.push(atom);
            }
        });
        out
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Truth | Formula::Falsity => self.clone(),
            Formula::Atom(atom) => Formula::Atom(PredicateAtom {
                predicate: atom.predicate.clone(),
                primed: atom.primed,
                arguments: atom.arguments.iter().map(|t| t.substitute(map)).collect(),
            }),
            Formula::Comparison { relation, lhs, rhs } => Formula::Comparison {
                relation: *relation,
                lhs: lhs.substitute(map),
                rhs: rhs.substitute(map),
            },
            Formula::Not(f) => Formula::not(f.substitute(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(map), b.substitute(map)),
            Formula::ForAll(vars, body) | Formula::Exists(vars, body) => {
                let (vars, body) = substitute_under_binder(vars, body, map);
                if matches!(self, Formula::ForAll(..)) {
                    Formula::ForAll(vars, Box::new(body))
                } else {
                    Formula::Exists(vars, Box::new(body))
                }
            }
        }
    }

    /// Maps predicate atoms, leaving everything else in place.
    pub fn map_atoms<E>(
        &self,
        f: &mut impl FnMut(&PredicateAtom) -> Result<Formula, E>,
    ) -> Result<Formula, E> {
        Ok(match self {
            Formula::Atom(atom) => f(atom)?,
            Formula::Truth | Formula::Falsity | Formula::Comparison { .. } => self.clone(),
            Formula::Not(g) => Formula::not(g.map_atoms(f)?),
            Formula::And(gs) => {
                Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect::<Result<_, _>>()?)
            }
            Formula::Or(gs) => {
                Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect::<Result<_, _>>()?)
            }
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f)?, b.map_atoms(f)?),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f)?, b.map_atoms(f)?),
            Formula::ForAll(vars, body) => Formula::ForAll(vars.clone(), Box::new(body.map_atoms(f)?)),
            Formula::Exists(vars, body) => Formula::Exists(vars.clone(), Box::new(body.map_atoms(f)?)),
        })
    }

    /// Universally quantifies the free variables in first-occurrence order,
    /// renaming them to `U1`, `U2`, ... (skipping names already bound in the
    /// formula). Closed formulas are returned unchanged.
    pub fn universal_closure(&self) -> Formula {
        let free = self.free_variables();
        if free.is_empty() {
            return self.clone();
        }
        let taken = self.bound_variable_names();
        let mut counter = 0;
        let mut map = BTreeMap::new();
        let mut quantified = Vec::with_capacity(free.len());
        for var in free {
            let name = loop {
                counter += 1;
                let candidate = format!("U{counter}");
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            let renamed = Variable {
                name,
                sort: var.sort,
            };
            map.insert(var.name.clone(), Term::Variable(renamed.clone()));
            quantified.push(renamed);
        }
        Formula::ForAll(quantified, Box::new(self.substitute(&map)))
    }

    /// Number of occurrences of ¬, ∧, ∨ and →; an n-ary conjunction or
    /// disjunction counts as n − 1 binary ones and ↔ counts once.
    pub fn logical_complexity(&self) -> Result<usize, FormulaError> {
        Ok(match self {
            Formula::Truth | Formula::Falsity | Formula::Atom(_) => 0,
            Formula::Comparison { .. } => return Err(FormulaError::Comparison),
            Formula::ForAll(..) | Formula::Exists(..) => return Err(FormulaError::Quantified),
            Formula::Not(f) => 1 + f.logical_complexity()?,
            Formula::And(fs) | Formula::Or(fs) => {
                let mut total = fs.len().saturating_sub(1);
                for f in fs {
                    total += f.logical_complexity()?;
                }
                total
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.logical_complexity()? + b.logical_complexity()?
            }
        })
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Not(f) => vec![f],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
            Formula::ForAll(_, f) | Formula::Exists(_, f) => vec![f],
            _ => vec![],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }
}

fn substitute_under_binder(
    vars: &[Variable],
    body: &Formula,
    map: &BTreeMap<String, Term>,
) -> (Vec<Variable>, Formula) {
    let body_free: BTreeSet<String> = body.free_variables().into_iter().map(|v| v.name).collect();
    let mut inner: BTreeMap<String, Term> = map
        .iter()
        .filter(|(k, _)| !vars.iter().any(|v| &v.name == *k) && body_free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (vars.to_vec(), body.clone());
    }
    let incoming: BTreeSet<String> = inner
        .values()
        .flat_map(|t| t.variables().into_iter().map(|v| v.name))
        .collect();
    let mut avoid: BTreeSet<String> = body.variable_names();
    avoid.extend(incoming.iter().cloned());
    avoid.extend(vars.iter().map(|v| v.name.clone()));
    let mut new_vars = Vec::with_capacity(vars.len());
    for var in vars {
        if incoming.contains(&var.name) {
            let fresh = fresh_name_like(&var.name, &avoid);
            avoid.insert(fresh.clone());
            let renamed = Variable {
                name: fresh,
                sort: var.sort,
            };
            inner.insert(var.name.clone(), Term::Variable(renamed.clone()));
            new_vars.push(renamed);
        } else {
            new_vars.push(var.clone());
        }
    }
    (new_vars, body.substitute(&inner))
}

/// Splits a variable name into its alphabetic prefix and numeric suffix.
pub fn name_prefix(name: &str) -> &str {
    name.trim_end_matches(|c: char| c.is_ascii_digit())
}

/// A name with the same prefix as `name` that is not in `avoid`.
pub fn fresh_name_like(name: &str, avoid: &BTreeSet<String>) -> String {
    let prefix = name_prefix(name);
    let prefix = if prefix.is_empty() { "V" } else { prefix };
    (1..)
        .map(|n| format!("{prefix}{n}"))
        .find(|candidate| !avoid.contains(candidate))
        .unwrap()
}
