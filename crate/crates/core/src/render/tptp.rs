//! Output in the typed first-order form of TPTP with integer arithmetic.
//!
//! Program terms live in one sort `object`. Integers are injected with
//! `f__integer__`, symbolic constants become `f__symbolic__<name>`, tuples
//! of arity k are built with `f__tuple_k__` and `#inf`/`#sup` are the
//! constants `c__infimum__`/`c__supremum__`. Axioms make these constructors
//! injective and pairwise distinct and describe the order between them
//! through `p__less__` and `p__less_equal__`. The order among tuples is
//! left open.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ast::{FoArithOp, Formula, Predicate, Relation, Sort, Term, Variable};
use crate::ht_map::{HtTheory, TheoryBody, PRIME_TEXT_SUFFIX};

pub const OBJECT: &str = "object";
pub const INTEGER: &str = "f__integer__";
pub const INFIMUM: &str = "c__infimum__";
pub const SUPREMUM: &str = "c__supremum__";
pub const LESS: &str = "p__less__";
pub const LESS_EQUAL: &str = "p__less_equal__";

fn symbolic(name: &str) -> String {
    format!("f__symbolic__{name}")
}

fn tuple(arity: usize) -> String {
    format!("f__tuple_{arity}__")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Type,
    Axiom,
    Conjecture,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Type => "type",
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedFormula {
    pub name: String,
    pub role: Role,
    pub text: String,
}

impl fmt::Display for AnnotatedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tff({}, {}, {}).", self.name, self.role, self.text)
    }
}

/// How predicates of the input were named in the output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    predicates: BTreeMap<Predicate, String>,
}

impl SymbolTable {
    /// Predicate names are kept unless they clash with a name of the
    /// encoding or the same name is used with several arities.
    fn build(signature: &BTreeSet<Predicate>) -> Self {
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for p in signature {
            *arities.entry(p.name.as_str()).or_default() += 1;
        }
        let reserved = |name: &str| {
            name == OBJECT || name.starts_with("f__") || name.starts_with("c__") || name.starts_with("p__less")
        };
        let mut taken: BTreeSet<String> = signature.iter().map(|p| p.name.clone()).collect();
        let mut predicates = BTreeMap::new();
        for p in signature {
            let mut name = p.name.clone();
            if arities[p.name.as_str()] > 1 {
                name = format!("{}__{}", p.name, p.arity);
            }
            if reserved(&name) {
                name = format!("{name}__user__");
            }
            if name != p.name {
                while taken.contains(&name) {
                    name.push('_');
                }
                taken.insert(name.clone());
            }
            predicates.insert(p.clone(), name);
        }
        SymbolTable { predicates }
    }

    pub fn name(&self, predicate: &Predicate) -> Option<&str> {
        self.predicates.get(predicate).map(String::as_str)
    }

    /// Entries whose output name differs from the input name.
    pub fn renamed(&self) -> impl Iterator<Item = (&Predicate, &str)> {
        self.predicates
            .iter()
            .filter(|(p, n)| p.name != **n)
            .map(|(p, n)| (p, n.as_str()))
    }

    fn primed_name(&self, predicate: &Predicate) -> String {
        format!("{}{PRIME_TEXT_SUFFIX}", self.predicates[predicate])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TptpProblem {
    pub types: Vec<AnnotatedFormula>,
    pub axioms: Vec<AnnotatedFormula>,
    /// Program formulas, present for a single program.
    pub formulas: Vec<AnnotatedFormula>,
    /// Present for two programs.
    pub conjecture: Option<AnnotatedFormula>,
    pub symbols: SymbolTable,
}

impl TptpProblem {
    pub fn all(&self) -> impl Iterator<Item = &AnnotatedFormula> {
        self.types
            .iter()
            .chain(&self.axioms)
            .chain(&self.formulas)
            .chain(&self.conjecture)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for a in self.all() {
            out.push_str(&a.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Default)]
struct Usage {
    symbols: BTreeSet<String>,
    tuple_arities: BTreeSet<usize>,
}

impl Usage {
    fn term(&mut self, t: &Term) {
        match t {
            Term::Symbol(s) => {
                self.symbols.insert(s.clone());
            }
            Term::Tuple(elements) => {
                self.tuple_arities.insert(elements.len());
                elements.iter().for_each(|e| self.term(e));
            }
            Term::Arithmetic { lhs, rhs, .. } => {
                self.term(lhs);
                self.term(rhs);
            }
            _ => {}
        }
    }

    fn formula(&mut self, f: &Formula) {
        f.visit(&mut |g| match g {
            Formula::Atom(atom) => atom.arguments.iter().for_each(|t| self.term(t)),
            Formula::Comparison { lhs, rhs, .. } => {
                self.term(lhs);
                self.term(rhs);
            }
            _ => {}
        });
    }
}

struct Writer<'a> {
    symbols: &'a SymbolTable,
}

impl Writer<'_> {
    fn int_term(&self, t: &Term) -> String {
        match t {
            Term::Integer(n) => n.to_string(),
            Term::Variable(v) => v.name.clone(),
            Term::Arithmetic { op, lhs, rhs } => {
                let f = match op {
                    FoArithOp::Add => "$sum",
                    FoArithOp::Subtract => "$difference",
                    FoArithOp::Multiply => "$product",
                };
                format!("{f}({}, {})", self.int_term(lhs), self.int_term(rhs))
            }
            other => self.object_term(other),
        }
    }

    fn object_term(&self, t: &Term) -> String {
        if t.is_integer_valued() {
            return format!("{INTEGER}({})", self.int_term(t));
        }
        match t {
            Term::Variable(v) => v.name.clone(),
            Term::Symbol(s) => symbolic(s),
            Term::Infimum => INFIMUM.to_string(),
            Term::Supremum => SUPREMUM.to_string(),
            Term::Tuple(elements) => {
                let args: Vec<String> = elements.iter().map(|e| self.object_term(e)).collect();
                format!("{}({})", tuple(elements.len()), args.join(", "))
            }
            Term::Integer(_) | Term::Arithmetic { .. } => unreachable!("integer-valued"),
        }
    }

    fn comparison(&self, relation: Relation, lhs: &Term, rhs: &Term, top: bool) -> String {
        let integers = lhs.is_integer_valued() && rhs.is_integer_valued();
        let (l, r) = if integers {
            (self.int_term(lhs), self.int_term(rhs))
        } else {
            (self.object_term(lhs), self.object_term(rhs))
        };
        let (less, less_equal) = if integers { ("$less", "$lesseq") } else { (LESS, LESS_EQUAL) };
        let infix = |op: &str| {
            if top {
                format!("{l} {op} {r}")
            } else {
                format!("({l} {op} {r})")
            }
        };
        match relation {
            Relation::Equal => infix("="),
            Relation::NotEqual => infix("!="),
            Relation::Less => format!("{less}({l}, {r})"),
            Relation::Greater => format!("{less}({r}, {l})"),
            Relation::LessEqual => format!("{less_equal}({l}, {r})"),
            Relation::GreaterEqual => format!("{less_equal}({r}, {l})"),
        }
    }

    fn wrap(s: String, top: bool) -> String {
        if top {
            s
        } else {
            format!("({s})")
        }
    }

    fn formula(&self, f: &Formula, top: bool) -> String {
        match f {
            Formula::Truth => "$true".into(),
            Formula::Falsity => "$false".into(),
            Formula::Atom(atom) => {
                let predicate = atom.signature();
                let name = if atom.primed {
                    self.symbols.primed_name(&predicate)
                } else {
                    self.symbols.predicates[&predicate].clone()
                };
                if atom.arguments.is_empty() {
                    name
                } else {
                    let args: Vec<String> = atom.arguments.iter().map(|t| self.object_term(t)).collect();
                    format!("{name}({})", args.join(", "))
                }
            }
            Formula::Comparison { relation, lhs, rhs } => self.comparison(*relation, lhs, rhs, top),
            Formula::Not(g) => format!("(~{})", self.formula(g, false)),
            Formula::And(gs) | Formula::Or(gs) => match gs.len() {
                0 => if matches!(f, Formula::And(_)) { "$true" } else { "$false" }.into(),
                1 => self.formula(&gs[0], top),
                _ => {
                    let op = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                    let parts: Vec<String> = gs.iter().map(|g| self.formula(g, false)).collect();
                    Self::wrap(parts.join(op), top)
                }
            },
            Formula::Implies(a, b) => Self::wrap(
                format!("{} => {}", self.formula(a, false), self.formula(b, false)),
                top,
            ),
            Formula::Iff(a, b) => Self::wrap(
                format!("{} <=> {}", self.formula(a, false), self.formula(b, false)),
                top,
            ),
            Formula::ForAll(vars, body) => Self::wrap(self.quantifier("!", vars, body), top),
            Formula::Exists(vars, body) => Self::wrap(self.quantifier("?", vars, body), top),
        }
    }

    fn quantifier(&self, symbol: &str, vars: &[Variable], body: &Formula) -> String {
        let typed: Vec<String> = vars
            .iter()
            .map(|v| {
                let sort = match v.sort {
                    Sort::Program => OBJECT,
                    Sort::Integer => "$int",
                };
                format!("{}: {sort}", v.name)
            })
            .collect();
        format!("{symbol} [{}] : {}", typed.join(", "), self.formula(body, false))
    }
}

/// A formula in TPTP syntax; predicates keep their names.
pub fn render_tptp_formula(f: &Formula) -> String {
    let mut signature = BTreeSet::new();
    for atom in f.atoms() {
        signature.insert(atom.signature());
    }
    let symbols = SymbolTable::build(&signature);
    Writer { symbols: &symbols }.formula(f, true)
}

fn vars(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn typed(names: &[String], sort: &str) -> String {
    names.iter().map(|n| format!("{n}: {sort}")).collect::<Vec<_>>().join(", ")
}

fn product_type(arity: usize, result: &str) -> String {
    match arity {
        0 => result.to_string(),
        1 => format!("{OBJECT} > {result}"),
        _ => format!("({}) > {result}", vec![OBJECT; arity].join(" * ")),
    }
}

fn standard_axioms(usage: &Usage) -> Vec<String> {
    let mut out = vec![
        format!("! [N1: $int, N2: $int] : (({INTEGER}(N1) = {INTEGER}(N2)) => (N1 = N2))"),
        format!("{INFIMUM} != {SUPREMUM}"),
        format!("! [N1: $int] : (({INTEGER}(N1) != {INFIMUM}) & ({INTEGER}(N1) != {SUPREMUM}))"),
    ];
    let symbols: Vec<String> = usage.symbols.iter().map(|s| symbolic(s)).collect();
    for c in &symbols {
        out.push(format!("! [N1: $int] : ({INTEGER}(N1) != {c})"));
        out.push(format!("({c} != {INFIMUM}) & ({c} != {SUPREMUM})"));
    }
    for (i, c) in symbols.iter().enumerate() {
        for d in &symbols[i + 1..] {
            out.push(format!("{c} != {d}"));
        }
    }
    out.extend([
        format!("! [N1: $int, N2: $int] : ({LESS}({INTEGER}(N1), {INTEGER}(N2)) <=> $less(N1, N2))"),
        format!("! [X1: {OBJECT}] : (~{LESS}(X1, X1))"),
        format!(
            "! [X1: {OBJECT}, X2: {OBJECT}, X3: {OBJECT}] : (({LESS}(X1, X2) & {LESS}(X2, X3)) => {LESS}(X1, X3))"
        ),
        format!("! [X1: {OBJECT}] : ((X1 != {INFIMUM}) => {LESS}({INFIMUM}, X1))"),
        format!("! [X1: {OBJECT}] : ((X1 != {SUPREMUM}) => {LESS}(X1, {SUPREMUM}))"),
    ]);
    for c in &symbols {
        out.push(format!("! [N1: $int] : {LESS}({INTEGER}(N1), {c})"));
    }
    // symbols are sorted, so consecutive pairs give the alphabetical order
    for (i, c) in symbols.iter().enumerate() {
        for d in &symbols[i + 1..] {
            out.push(format!("{LESS}({c}, {d})"));
        }
    }
    out.push(format!(
        "! [X1: {OBJECT}, X2: {OBJECT}] : ({LESS_EQUAL}(X1, X2) <=> ({LESS}(X1, X2) | (X1 = X2)))"
    ));
    let arities: Vec<usize> = usage.tuple_arities.iter().copied().collect();
    for &k in &arities {
        let f = tuple(k);
        let xs = vars("X", k);
        let ys = vars("Y", k);
        let fx = format!("{f}({})", xs.join(", "));
        let fy = format!("{f}({})", ys.join(", "));
        let equal: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("({x} = {y})")).collect();
        let equal = if equal.len() == 1 {
            equal[0].clone()
        } else {
            format!("({})", equal.join(" & "))
        };
        out.push(format!(
            "! [{}, {}] : (({fx} = {fy}) => {equal})",
            typed(&xs, OBJECT),
            typed(&ys, OBJECT)
        ));
        out.push(format!(
            "! [{}, N1: $int] : (({fx} != {INTEGER}(N1)) & ({fx} != {INFIMUM}) & ({fx} != {SUPREMUM}))",
            typed(&xs, OBJECT)
        ));
        for c in &symbols {
            out.push(format!("! [{}] : ({fx} != {c})", typed(&xs, OBJECT)));
        }
        out.push(format!("! [{}, N1: $int] : {LESS}({INTEGER}(N1), {fx})", typed(&xs, OBJECT)));
        for c in &symbols {
            out.push(format!("! [{}] : {LESS}({c}, {fx})", typed(&xs, OBJECT)));
        }
        out.push(format!("! [{}] : {LESS}({fx}, {SUPREMUM})", typed(&xs, OBJECT)));
    }
    for (i, &k) in arities.iter().enumerate() {
        for &l in &arities[i + 1..] {
            let xs = vars("X", k);
            let ys = vars("Y", l);
            out.push(format!(
                "! [{}, {}] : ({}({}) != {}({}))",
                typed(&xs, OBJECT),
                typed(&ys, OBJECT),
                tuple(k),
                xs.join(", "),
                tuple(l),
                ys.join(", ")
            ));
        }
    }
    out
}

/// Builds the problem for a theory: declarations, the standard axioms and
/// prime axioms, then either the program formulas as axioms or the
/// equivalence of two programs as the conjecture `se`.
pub fn render_tptp(theory: &HtTheory) -> TptpProblem {
    let mut signature = theory.signature.clone();
    let mut usage = Usage::default();
    for f in theory.all_formulas() {
        usage.formula(f);
        for atom in f.atoms() {
            signature.insert(atom.signature());
        }
    }
    let symbols = SymbolTable::build(&signature);
    let writer = Writer { symbols: &symbols };

    let mut types = Vec::new();
    let mut declare = |name: String, ty: String| {
        types.push(AnnotatedFormula {
            name: format!("t_{name}"),
            role: Role::Type,
            text: format!("{name}: {ty}"),
        })
    };
    declare(OBJECT.into(), "$tType".into());
    declare(INTEGER.into(), format!("$int > {OBJECT}"));
    declare(INFIMUM.into(), OBJECT.into());
    declare(SUPREMUM.into(), OBJECT.into());
    declare(LESS.into(), product_type(2, "$o"));
    declare(LESS_EQUAL.into(), product_type(2, "$o"));
    for s in &usage.symbols {
        declare(symbolic(s), OBJECT.into());
    }
    for &k in &usage.tuple_arities {
        declare(tuple(k), product_type(k, OBJECT));
    }
    for p in &signature {
        declare(symbols.predicates[p].clone(), product_type(p.arity, "$o"));
        if theory.mapped {
            declare(symbols.primed_name(p), product_type(p.arity, "$o"));
        }
    }

    let mut axiom_texts = standard_axioms(&usage);
    axiom_texts.extend(theory.axioms.iter().map(|a| writer.formula(a, true)));
    let axioms = axiom_texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| AnnotatedFormula {
            name: format!("a_{}", i + 1),
            role: Role::Axiom,
            text,
        })
        .collect();

    let (formulas, conjecture) = match &theory.body {
        TheoryBody::Single(fs) => (
            fs.iter()
                .enumerate()
                .map(|(i, f)| AnnotatedFormula {
                    name: format!("f_{}", i + 1),
                    role: Role::Axiom,
                    text: writer.formula(f, true),
                })
                .collect(),
            None,
        ),
        TheoryBody::Pair { .. } => {
            let conjecture = theory.conjecture().expect("pair theory");
            (
                vec![],
                Some(AnnotatedFormula {
                    name: "se".into(),
                    role: Role::Conjecture,
                    text: writer.formula(&conjecture, true),
                }),
            )
        }
    };
    TptpProblem {
        types,
        axioms,
        formulas,
        conjecture,
        symbols,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ht_map::{apply_if_needed, pair_theory, PrimeStyle, PrimedSignature};
    use crate::parser::parse_program;
    use crate::translate::tau_star_program;

    fn problem(source: &str) -> TptpProblem {
        let t = tau_star_program(&parse_program(source).unwrap());
        let sig = PrimedSignature::new(&t.signature, PrimeStyle::Tick);
        render_tptp(&apply_if_needed(&t, &sig).unwrap())
    }

    #[test]
    fn choice_and_constraint_formulas() {
        let p = problem("{p}. :- not p, q.");
        let texts: Vec<&str> = p.formulas.iter().map(|f| f.text.as_str()).collect();
        assert_eq!(
            texts,
            [
                "$true => (p | (~p__prime__))",
                "$true => (p__prime__ | (~p__prime__))",
                "((~p__prime__) & q) => $false",
                "((~p__prime__) & q__prime__) => $false",
            ]
        );
        let axioms: Vec<&str> = p.axioms.iter().map(|a| a.text.as_str()).collect();
        assert!(axioms.contains(&"p => p__prime__"));
        assert!(axioms.contains(&"q => q__prime__"));
        assert!(p.types.iter().any(|t| t.to_string() == "tff(t_p, type, p: $o)."));
        assert!(p.conjecture.is_none());
    }

    #[test]
    fn empty_theory_has_declarations_only() {
        let p = problem("");
        assert!(p.formulas.is_empty());
        assert!(p.conjecture.is_none());
        assert!(!p.types.is_empty());
    }

    #[test]
    fn integers_are_injected() {
        let p = problem("p(1..3).");
        let text = &p.formulas[0].text;
        assert!(text.contains("$lesseq(I1, K1)"), "{text}");
        assert!(text.contains(&format!("(Z1 = {INTEGER}(K1))")), "{text}");
        assert!(text.contains("! [Z1: object] :"), "{text}");
        assert!(text.contains("? [I1: $int, J1: $int, K1: $int] :"), "{text}");
    }

    #[test]
    fn object_comparisons_use_the_order_predicate() {
        let p = problem("p :- a < X, q(X).");
        assert!(p.formulas[0].text.contains(&format!("{LESS}(")), "{}", p.formulas[0].text);
        assert!(p.types.iter().any(|t| t.text == format!("{}: {OBJECT}", symbolic("a"))));
    }

    #[test]
    fn two_programs_give_a_conjecture() {
        let a = tau_star_program(&parse_program("p :- not q.").unwrap());
        let b = tau_star_program(&parse_program("p :- not q, not r.").unwrap());
        let p = render_tptp(&pair_theory(&a, &b).unwrap());
        let se = p.conjecture.unwrap();
        assert_eq!(se.name, "se");
        assert!(se.text.contains(" <=> "));
        assert!(p.types.iter().any(|t| t.name == "t_r__prime__"));
    }

    #[test]
    fn clashing_predicates_are_renamed() {
        let p = problem("object(1). p(1). p(1,2). f__integer__.");
        let renamed: BTreeMap<String, String> = p
            .symbols
            .renamed()
            .map(|(pred, name)| (pred.to_string(), name.to_string()))
            .collect();
        assert_eq!(renamed["object/1"], "object__user__");
        assert_eq!(renamed["p/1"], "p__1");
        assert_eq!(renamed["p/2"], "p__2");
        assert_eq!(renamed["f__integer__/0"], "f__integer____user__");
    }
}
