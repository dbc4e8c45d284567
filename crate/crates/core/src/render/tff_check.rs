//! A small checker for the TFF fragment this crate emits.
//!
//! Besides the grammar (annotated formulas, type declarations, connectives
//! with their non-associativity rules, typed quantifiers) it checks that
//! every symbol is declared once before use, that variables are bound and
//! that argument sorts match the declarations.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TffError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TffSummary {
    pub types: usize,
    pub axioms: usize,
    pub conjectures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    Int(String),
    Punct(&'static str),
}

const PUNCTUATION: [&str; 21] = [
    "<=>", "<~>", "=>", "<=", "~|", "~&", "!=", "(", ")", "[", "]", ",", ".", ":", ">", "*", "!", "?", "~", "&",
    "|",
];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, TffError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'%' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let word_end = |start: usize| {
            let mut j = start;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            j
        };
        if c.is_ascii_lowercase() || c.is_ascii_uppercase() || c == b'$' {
            let start = if c == b'$' { i + 1 } else { i };
            let end = word_end(start);
            if end == start {
                return Err(TffError {
                    line,
                    message: "`$` without a name".into(),
                });
            }
            let word = text[i..end].to_string();
            out.push((
                match c {
                    b'$' => Tok::Dollar(word),
                    _ if c.is_ascii_lowercase() => Tok::Lower(word),
                    _ => Tok::Upper(word),
                },
                line,
            ));
            i = end;
            continue;
        }
        if c.is_ascii_digit() || (c == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            out.push((Tok::Int(text[i..j].to_string()), line));
            i = j;
            continue;
        }
        if c == b'=' {
            // `=` alone; `=>` is in the table
            if bytes.get(i + 1) == Some(&b'>') {
                out.push((Tok::Punct("=>"), line));
                i += 2;
            } else {
                out.push((Tok::Punct("="), line));
                i += 1;
            }
            continue;
        }
        match PUNCTUATION.iter().find(|p| text[i..].starts_with(**p)) {
            Some(p) => {
                out.push((Tok::Punct(p), line));
                i += p.len();
            }
            None => {
                return Err(TffError {
                    line,
                    message: format!("unexpected character `{}`", c as char),
                })
            }
        }
    }
    Ok(out)
}

/// A type: argument sorts and result sort.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Signature {
    args: Vec<String>,
    result: String,
}

struct Checker {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    sorts: BTreeSet<String>,
    symbols: BTreeMap<String, Signature>,
    names: BTreeSet<String>,
    scopes: Vec<BTreeMap<String, String>>,
}

type CResult<T> = Result<T, TffError>;

const NON_ASSOCIATIVE: [&str; 6] = ["<=>", "=>", "<=", "<~>", "~|", "~&"];

impl Checker {
    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map_or(1, |(_, l)| *l)
    }

    fn fail<T>(&self, message: impl Into<String>) -> CResult<T> {
        Err(TffError {
            line: self.line(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn next(&mut self) -> CResult<Tok> {
        match self.tokens.get(self.pos) {
            Some((t, _)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.fail("unexpected end of input"),
        }
    }

    fn expect(&mut self, p: &str) -> CResult<()> {
        if self.is(p) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{p}`, found {:?}", self.peek()))
        }
    }

    fn lower(&mut self) -> CResult<String> {
        match self.next()? {
            Tok::Lower(w) => Ok(w),
            other => {
                self.pos -= 1;
                self.fail(format!("expected a name, found {other:?}"))
            }
        }
    }

    fn annotated(&mut self, summary: &mut TffSummary) -> CResult<()> {
        let keyword = self.lower()?;
        if keyword != "tff" {
            return self.fail(format!("expected `tff`, found `{keyword}`"));
        }
        self.expect("(")?;
        let name = match self.next()? {
            Tok::Lower(w) | Tok::Int(w) => w,
            _ => return self.fail("expected a formula name"),
        };
        if !self.names.insert(name.clone()) {
            return self.fail(format!("formula name `{name}` used twice"));
        }
        self.expect(",")?;
        let role = self.lower()?;
        self.expect(",")?;
        match role.as_str() {
            "type" => {
                self.declaration()?;
                summary.types += 1;
            }
            "axiom" | "hypothesis" | "definition" | "lemma" | "theorem" | "conjecture" | "negated_conjecture" => {
                self.formula()?;
                if role == "conjecture" {
                    summary.conjectures += 1;
                    if summary.conjectures > 1 {
                        return self.fail("more than one conjecture");
                    }
                } else {
                    summary.axioms += 1;
                }
            }
            other => return self.fail(format!("unknown role `{other}`")),
        }
        self.expect(")")?;
        self.expect(".")
    }

    fn atomic_sort(&mut self) -> CResult<String> {
        match self.next()? {
            Tok::Lower(w) if self.sorts.contains(&w) => Ok(w),
            Tok::Lower(w) => self.fail(format!("undeclared sort `{w}`")),
            Tok::Dollar(w) if ["$int", "$o", "$i", "$rat", "$real"].contains(&w.as_str()) => Ok(w),
            other => self.fail(format!("expected a sort, found {other:?}")),
        }
    }

    fn declaration(&mut self) -> CResult<()> {
        if self.is("(") {
            self.pos += 1;
            self.declaration()?;
            return self.expect(")");
        }
        let name = self.lower()?;
        self.expect(":")?;
        if matches!(self.peek(), Some(Tok::Dollar(w)) if w == "$tType") {
            self.pos += 1;
            if !self.sorts.insert(name.clone()) || self.symbols.contains_key(&name) {
                return self.fail(format!("`{name}` declared twice"));
            }
            return Ok(());
        }
        let args = if self.is("(") {
            self.pos += 1;
            let mut args = vec![self.atomic_sort()?];
            while self.is("*") {
                self.pos += 1;
                args.push(self.atomic_sort()?);
            }
            self.expect(")")?;
            if args.len() < 2 {
                return self.fail("a product type needs at least two sorts");
            }
            self.expect(">")?;
            args
        } else {
            let first = self.atomic_sort()?;
            if self.is(">") {
                self.pos += 1;
                vec![first]
            } else {
                if self.symbols.contains_key(&name) || self.sorts.contains(&name) {
                    return self.fail(format!("`{name}` declared twice"));
                }
                self.symbols.insert(name, Signature { args: vec![], result: first });
                return Ok(());
            }
        };
        if args.iter().any(|a| a == "$o") {
            return self.fail("`$o` cannot be an argument sort");
        }
        let result = self.atomic_sort()?;
        if self.symbols.contains_key(&name) || self.sorts.contains(&name) {
            return self.fail(format!("`{name}` declared twice"));
        }
        self.symbols.insert(name, Signature { args, result });
        Ok(())
    }

    fn formula(&mut self) -> CResult<()> {
        self.unitary()?;
        let op = match self.peek() {
            Some(Tok::Punct(p)) if NON_ASSOCIATIVE.contains(p) || *p == "&" || *p == "|" => *p,
            _ => return Ok(()),
        };
        self.pos += 1;
        self.unitary()?;
        if NON_ASSOCIATIVE.contains(&op) {
            if matches!(self.peek(), Some(Tok::Punct(p)) if NON_ASSOCIATIVE.contains(p) || *p == "&" || *p == "|") {
                return self.fail(format!("`{op}` is not associative; parenthesize"));
            }
            return Ok(());
        }
        loop {
            match self.peek() {
                Some(Tok::Punct(p)) if *p == op => {
                    self.pos += 1;
                    self.unitary()?;
                }
                Some(Tok::Punct(p)) if NON_ASSOCIATIVE.contains(p) || *p == "&" || *p == "|" => {
                    return self.fail(format!("`{p}` after `{op}` needs parentheses"));
                }
                _ => return Ok(()),
            }
        }
    }

    fn unitary(&mut self) -> CResult<()> {
        if self.is("(") {
            self.pos += 1;
            self.formula()?;
            return self.expect(")");
        }
        if self.is("~") {
            self.pos += 1;
            return self.unitary();
        }
        if self.is("!") || self.is("?") {
            self.pos += 1;
            self.expect("[")?;
            let mut scope = BTreeMap::new();
            loop {
                let name = match self.next()? {
                    Tok::Upper(w) => w,
                    _ => return self.fail("expected a variable"),
                };
                self.expect(":")?;
                let sort = self.atomic_sort()?;
                if sort == "$o" {
                    return self.fail("variables cannot range over `$o`");
                }
                if scope.insert(name.clone(), sort).is_some() {
                    return self.fail(format!("variable `{name}` bound twice in one quantifier"));
                }
                if self.is(",") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.expect("]")?;
            self.expect(":")?;
            self.scopes.push(scope);
            let result = self.unitary();
            self.scopes.pop();
            return result;
        }
        self.atomic()
    }

    fn atomic(&mut self) -> CResult<()> {
        if let Some(Tok::Dollar(w)) = self.peek() {
            if w == "$true" || w == "$false" {
                self.pos += 1;
                return Ok(());
            }
        }
        let lhs = self.term()?;
        if self.is("=") || self.is("!=") {
            self.pos += 1;
            let rhs = self.term()?;
            if lhs == "$o" || lhs != rhs {
                return self.fail(format!("equality between `{lhs}` and `{rhs}`"));
            }
            return Ok(());
        }
        if lhs != "$o" {
            return self.fail(format!("term of sort `{lhs}` used as a formula"));
        }
        Ok(())
    }

    fn arguments(&mut self) -> CResult<Vec<String>> {
        if !self.is("(") {
            return Ok(vec![]);
        }
        self.pos += 1;
        let mut sorts = vec![self.term()?];
        while self.is(",") {
            self.pos += 1;
            sorts.push(self.term()?);
        }
        self.expect(")")?;
        Ok(sorts)
    }

    /// Parses a term or predicate application and returns its sort.
    fn term(&mut self) -> CResult<String> {
        match self.next()? {
            Tok::Int(_) => Ok("$int".into()),
            Tok::Upper(v) => match self.scopes.iter().rev().find_map(|s| s.get(&v)) {
                Some(sort) => Ok(sort.clone()),
                None => self.fail(format!("unbound variable `{v}`")),
            },
            Tok::Dollar(f) => {
                let args = self.arguments()?;
                let (arity, result) = match f.as_str() {
                    "$sum" | "$difference" | "$product" => (2, "$int"),
                    "$uminus" => (1, "$int"),
                    "$less" | "$lesseq" | "$greater" | "$greatereq" => (2, "$o"),
                    _ => return self.fail(format!("unsupported `{f}`")),
                };
                if args.len() != arity || args.iter().any(|a| a != "$int") {
                    return self.fail(format!("`{f}` expects {arity} integer arguments"));
                }
                Ok(result.into())
            }
            Tok::Lower(f) => {
                let Some(signature) = self.symbols.get(&f).cloned() else {
                    return self.fail(format!("undeclared symbol `{f}`"));
                };
                let args = self.arguments()?;
                if args != signature.args {
                    return self.fail(format!(
                        "`{f}` applied to ({}) but declared for ({})",
                        args.join(", "),
                        signature.args.join(", ")
                    ));
                }
                Ok(signature.result)
            }
            other => {
                self.pos -= 1;
                self.fail(format!("expected a term, found {other:?}"))
            }
        }
    }
}

/// Checks a whole problem.
pub fn check_tff(text: &str) -> Result<TffSummary, TffError> {
    let mut checker = Checker {
        tokens: lex(text)?,
        pos: 0,
        sorts: BTreeSet::new(),
        symbols: BTreeMap::new(),
        names: BTreeSet::new(),
        scopes: Vec::new(),
    };
    let mut summary = TffSummary::default();
    while checker.pos < checker.tokens.len() {
        checker.annotated(&mut summary)?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "tff(t_object, type, object: $tType).\n\
                          tff(t_f, type, f: $int > object).\n\
                          tff(t_p, type, p: (object * object) > $o).\n\
                          tff(t_q, type, q: $o).\n";

    fn check(body: &str) -> Result<TffSummary, TffError> {
        check_tff(&format!("{HEADER}{body}"))
    }

    #[test]
    fn accepts_well_formed_problems() {
        let s = check(
            "tff(a_1, axiom, ! [X: object, N: $int] : (p(X, f(N)) => (q | (~q)))).\n\
             tff(a_2, axiom, ((~q) & q) => $false).\n\
             tff(se, conjecture, ? [N: $int] : ($less(N, $sum(N, 1)) <=> (f(N) != f(-1)))).",
        )
        .unwrap();
        assert_eq!(s, TffSummary { types: 4, axioms: 2, conjectures: 1 });
    }

    #[test]
    fn rejects_mixed_connectives() {
        assert!(check("tff(a, axiom, q & q | q).").is_err());
        assert!(check("tff(a, axiom, q => q => q).").is_err());
        assert!(check("tff(a, axiom, q & q & q).").is_ok());
    }

    #[test]
    fn rejects_sort_errors() {
        let e = check("tff(a, axiom, ! [N: $int] : p(N, N)).").unwrap_err();
        assert!(e.message.contains("declared for"), "{e}");
        assert!(check("tff(a, axiom, ! [X: object] : (X = 1)).").is_err());
        assert!(check("tff(a, axiom, f(1)).").is_err());
    }

    #[test]
    fn rejects_undeclared_and_unbound_names() {
        assert!(check("tff(a, axiom, r).").is_err());
        assert!(check("tff(a, axiom, p(X, X)).").is_err());
        assert!(check("tff(t_q2, type, q: $o).").is_err());
        assert!(check("tff(a, axiom, q).\ntff(a, axiom, q).").is_err());
    }

    #[test]
    fn reports_lines() {
        let e = check("tff(a, axiom, q).\ntff(b, axiom, q &).").unwrap_err();
        assert_eq!(e.line, 6);
    }
}
