//! Parser for the mini-gringo input dialect, plus a reader for the
//! human-readable formula format produced by [`crate::render::human`].

use std::fmt;

use thiserror::Error;

use crate::ast::{
    ArithOp, Atom, AtomArguments, BodyLiteral, FoArithOp, Formula, Head, PredicateAtom, Program,
    ProgramTerm, Relation, Rule, Term, Variable,
};

/// Byte range plus 1-based line and column of its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// Short descriptions of what would have been accepted instead.
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

/// Something suspicious that was accepted anyway.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Number(i64),
    Hash(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Dot,
    DotDot,
    If,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Rel(Relation),
    Arrow,
    DoubleArrow,
    Tick,
    Bar,
    Colon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Hash(s) => format!("`#{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semicolon => "`;`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::If => "`:-`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Rel(r) => format!("`{}`", r.symbol()),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::Tick => "`'`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    let mut line = 1;
    let mut line_start = 0;

    let span_at = |begin: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        begin,
        end,
        line,
        column: text[line_start..begin].chars().count() + 1,
    };

    while pos < bytes.len() {
        let c = bytes[pos];
        if c == b'\n' {
            pos += 1;
            line += 1;
            line_start = pos;
            continue;
        }
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if c == b'%' {
            if bytes.get(pos + 1) == Some(&b'*') {
                let start = pos;
                let (start_line, start_line_start) = (line, line_start);
                pos += 2;
                loop {
                    if pos + 1 >= bytes.len() {
                        return Err(ParseError {
                            span: span_at(start, bytes.len(), start_line, start_line_start),
                            message: "unterminated block comment".into(),
                            expected: vec!["`*%`".into()],
                        });
                    }
                    if bytes[pos] == b'*' && bytes[pos + 1] == b'%' {
                        pos += 2;
                        break;
                    }
                    if bytes[pos] == b'\n' {
                        line += 1;
                        line_start = pos + 1;
                    }
                    pos += 1;
                }
            } else {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            continue;
        }

        let start = pos;
        let err = |message: String, end: usize| ParseError {
            span: span_at(start, end, line, line_start),
            message,
            expected: vec![],
        };
        let rest = &text[pos..];
        let (tok, len) = if c.is_ascii_lowercase() || c.is_ascii_uppercase() {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                .count();
            let word = rest[..len].to_string();
            if c.is_ascii_lowercase() {
                (Tok::Ident(word), len)
            } else {
                (Tok::Var(word), len)
            }
        } else if c == b'_' {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                .count();
            return Err(err(
                format!(
                    "identifiers starting with `_` (including anonymous variables) are not supported: `{}`",
                    &rest[..len]
                ),
                start + len,
            ));
        } else if c.is_ascii_digit() {
            let len = rest.bytes().take_while(u8::is_ascii_digit).count();
            let value = rest[..len]
                .parse::<i64>()
                .map_err(|_| err(format!("numeral `{}` is out of range", &rest[..len]), start + len))?;
            (Tok::Number(value), len)
        } else if c == b'#' {
            let len = rest[1..]
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                .count();
            (Tok::Hash(rest[1..1 + len].to_string()), len + 1)
        } else if rest.starts_with("<->") {
            (Tok::DoubleArrow, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with(":-") {
            (Tok::If, 2)
        } else if rest.starts_with("..") {
            (Tok::DotDot, 2)
        } else if rest.starts_with("!=") || rest.starts_with("<>") {
            (Tok::Rel(Relation::NotEqual), 2)
        } else if rest.starts_with("<=") {
            (Tok::Rel(Relation::LessEqual), 2)
        } else if rest.starts_with(">=") {
            (Tok::Rel(Relation::GreaterEqual), 2)
        } else if rest.starts_with("==") {
            (Tok::Rel(Relation::Equal), 2)
        } else {
            let tok = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b',' => Tok::Comma,
                b';' => Tok::Semicolon,
                b'.' => Tok::Dot,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'\\' => Tok::Backslash,
                b'=' => Tok::Rel(Relation::Equal),
                b'<' => Tok::Rel(Relation::Less),
                b'>' => Tok::Rel(Relation::Greater),
                b'\'' => Tok::Tick,
                b'|' => Tok::Bar,
                b':' => Tok::Colon,
                b'"' => return Err(err("strings are not supported".into(), start + 1)),
                _ => {
                    let ch = rest.chars().next().unwrap();
                    return Err(err(format!("unexpected character `{ch}`"), start + ch.len_utf8()));
                }
            };
            (tok, 1)
        };
        pos += len;
        tokens.push(Token {
            tok,
            span: span_at(start, pos, line, line_start),
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: span_at(bytes.len(), bytes.len(), line, line_start),
    });
    Ok(tokens)
}

const PRIME_SUFFIX: &str = "__prime__";

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    warnings: Vec<Warning>,
}

type PResult<T> = Result<T, ParseError>;

impl Cursor {
    fn new(text: &str) -> PResult<Self> {
        Ok(Cursor {
            tokens: lex(text)?,
            pos: 0,
            warnings: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let index = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[index].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError {
            span: self.span(),
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let message = match self.peek() {
            Tok::Eof => "unexpected end of input".to_string(),
            tok => format!("unexpected {}", tok.describe()),
        };
        self.error(message, expected)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn is_not_keyword(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == "not")
    }

    // -- program ----------------------------------------------------------

    fn program(&mut self) -> PResult<Program> {
        let mut rules = Vec::new();
        while *self.peek() != Tok::Eof {
            rules.push(self.rule()?);
        }
        Ok(Program::new(rules))
    }

    fn rule(&mut self) -> PResult<Rule> {
        let head = match self.peek() {
            Tok::If => Head::Empty,
            Tok::LBrace => self.choice_head()?,
            Tok::Ident(_) | Tok::Var(_) => {
                if self.is_not_keyword() {
                    return Err(self.error("`not` is not allowed in rule heads", &["head atom"]));
                }
                let atom = self.atom()?;
                match self.peek() {
                    Tok::Semicolon | Tok::Bar => {
                        return Err(self.error(
                            "disjunctive heads are not supported",
                            &["`.`", "`:-`"],
                        ))
                    }
                    Tok::LBrace => {
                        return Err(self.error(
                            "choice rules with bounds are not supported",
                            &["`.`", "`:-`"],
                        ))
                    }
                    _ => Head::Basic(atom),
                }
            }
            Tok::Number(_) => {
                if matches!(self.peek_at(1), Tok::LBrace) {
                    return Err(self.error("choice rules with bounds are not supported", &[]));
                }
                return Err(self.unexpected(&["rule head", "`:-`"]));
            }
            Tok::Hash(name) => {
                return Err(self.error(format!("directive or aggregate `#{name}` is not supported"), &[]))
            }
            Tok::Minus => return Err(self.error("classical negation is not supported", &[])),
            _ => return Err(self.unexpected(&["rule head", "`:-`"])),
        };
        let mut body = Vec::new();
        if self.eat(&Tok::If) {
            loop {
                body.push(self.body_literal()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        match self.peek() {
            Tok::Dot => {
                self.advance();
            }
            Tok::Eof => {
                return Err(self.error("unterminated rule", &["`.`"]));
            }
            Tok::Semicolon => {
                return Err(self.error("body literals must be separated by `,`", &["`,`", "`.`"]))
            }
            Tok::Colon => return Err(self.error("conditional literals are not supported", &[])),
            _ => return Err(self.unexpected(&["`,`", "`.`"])),
        }
        Ok(Rule::new(head, body))
    }

    fn choice_head(&mut self) -> PResult<Head> {
        self.expect(Tok::LBrace, "`{`")?;
        if *self.peek() == Tok::RBrace {
            return Err(self.error("a choice head must contain exactly one atom", &["atom"]));
        }
        let atom = self.atom()?;
        match self.peek() {
            Tok::RBrace => {
                self.advance();
            }
            Tok::Semicolon | Tok::Comma => {
                return Err(self.error(
                    "a choice head must contain exactly one atom; `{}` with more than one atom is not supported",
                    &["`}`"],
                ))
            }
            Tok::Colon => return Err(self.error("conditional literals are not supported", &[])),
            _ => return Err(self.unexpected(&["`}`"])),
        }
        if matches!(self.peek(), Tok::Rel(_) | Tok::Number(_)) {
            return Err(self.error("choice rules with bounds are not supported", &["`.`", "`:-`"]));
        }
        Ok(Head::Choice(atom))
    }

    fn body_literal(&mut self) -> PResult<BodyLiteral> {
        if self.is_not_keyword() {
            self.advance();
            if self.is_not_keyword() {
                self.advance();
                self.reject_negated_comparison()?;
                return Ok(BodyLiteral::DoublyNegated(self.atom()?));
            }
            self.reject_negated_comparison()?;
            return Ok(BodyLiteral::Negated(self.atom()?));
        }
        if let Tok::Hash(name) = self.peek() {
            if !matches!(name.as_str(), "inf" | "infimum" | "sup" | "supremum") {
                return Err(self.error(format!("aggregate or directive `#{name}` is not supported"), &[]));
            }
        }
        if *self.peek() == Tok::Minus && matches!(self.peek_at(1), Tok::Ident(_)) {
            let after = self.peek_at(2);
            if !matches!(
                after,
                Tok::Rel(_) | Tok::Plus | Tok::Minus | Tok::Star | Tok::Slash | Tok::Backslash | Tok::DotDot
            ) {
                return Err(self.error("classical negation is not supported", &[]));
            }
        }
        if self.starts_atom() {
            return Ok(BodyLiteral::Positive(self.atom()?));
        }
        let lhs = self.term_interval()?;
        let relation = match self.peek() {
            Tok::Rel(r) => *r,
            Tok::LBrace => return Err(self.error("aggregates are not supported", &[])),
            _ => return Err(self.unexpected(&["comparison operator"])),
        };
        self.advance();
        let rhs = self.term_interval()?;
        Ok(BodyLiteral::Comparison { relation, lhs, rhs })
    }

    fn reject_negated_comparison(&self) -> PResult<()> {
        if self.starts_atom() {
            Ok(())
        } else {
            Err(self.unexpected(&["atom after `not`"]))
        }
    }

    /// An identifier not followed by an operator, or a capitalized name
    /// applied to arguments, begins an atom.
    fn starts_atom(&self) -> bool {
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(name), next) => {
                name != "not"
                    && !matches!(
                        next,
                        Tok::Rel(_)
                            | Tok::Plus
                            | Tok::Minus
                            | Tok::Star
                            | Tok::Slash
                            | Tok::Backslash
                            | Tok::DotDot
                    )
            }
            (Tok::Var(_), Tok::LParen) => true,
            _ => false,
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        let token = self.advance();
        let name = match token.tok {
            Tok::Ident(name) => name,
            Tok::Var(name) if *self.peek() == Tok::LParen => {
                let mut chars = name.chars();
                let lowered: String = chars
                    .next()
                    .map(|c| c.to_ascii_lowercase())
                    .into_iter()
                    .chain(chars)
                    .collect();
                self.warnings.push(Warning {
                    span: token.span,
                    message: format!(
                        "predicate name `{name}` starts with an uppercase letter; read as `{lowered}`"
                    ),
                });
                lowered
            }
            _ => {
                return Err(ParseError {
                    span: token.span,
                    message: format!("unexpected {}", token.tok.describe()),
                    expected: vec!["atom".into()],
                })
            }
        };
        if name.ends_with(PRIME_SUFFIX) {
            return Err(ParseError {
                span: token.span,
                message: format!("predicate names ending in `{PRIME_SUFFIX}` are reserved"),
                expected: vec![],
            });
        }
        if !self.eat(&Tok::LParen) {
            return Ok(Atom::propositional(name));
        }
        if self.eat(&Tok::RParen) {
            return Ok(Atom::propositional(name));
        }
        let mut alternatives = vec![self.argument_tuple()?];
        while self.eat(&Tok::Semicolon) {
            alternatives.push(self.argument_tuple()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(if alternatives.len() == 1 {
            Atom {
                predicate: name,
                arguments: AtomArguments::Tuple(alternatives.pop().unwrap()),
            }
        } else {
            Atom::pooled(name, alternatives)
        })
    }

    fn argument_tuple(&mut self) -> PResult<Vec<ProgramTerm>> {
        let mut args = vec![self.term_interval()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term_interval()?);
        }
        Ok(args)
    }

    // -- terms ------------------------------------------------------------
    // pool `;` < tuple `,` < interval `..` < additive < multiplicative < unary

    fn term_pool(&mut self) -> PResult<ProgramTerm> {
        let mut alternatives = vec![self.term_tuple()?];
        while self.eat(&Tok::Semicolon) {
            alternatives.push(self.term_tuple()?);
        }
        Ok(ProgramTerm::pool(alternatives))
    }

    fn term_tuple(&mut self) -> PResult<ProgramTerm> {
        let mut elements = vec![self.term_interval()?];
        while self.eat(&Tok::Comma) {
            elements.push(self.term_interval()?);
        }
        Ok(ProgramTerm::tuple(elements))
    }

    fn term_interval(&mut self) -> PResult<ProgramTerm> {
        let lower = self.term_additive()?;
        if self.eat(&Tok::DotDot) {
            let upper = self.term_additive()?;
            if *self.peek() == Tok::DotDot {
                return Err(self.error("intervals do not chain; add parentheses", &[]));
            }
            return Ok(ProgramTerm::interval(lower, upper));
        }
        Ok(lower)
    }

    fn term_additive(&mut self) -> PResult<ProgramTerm> {
        let mut lhs = self.term_multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Subtract,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term_multiplicative()?;
            lhs = ProgramTerm::binary(op, lhs, rhs);
        }
    }

    fn term_multiplicative(&mut self) -> PResult<ProgramTerm> {
        let mut lhs = self.term_unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Multiply,
                Tok::Slash => ArithOp::Divide,
                Tok::Backslash => ArithOp::Modulo,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term_unary()?;
            lhs = ProgramTerm::binary(op, lhs, rhs);
        }
    }

    fn term_unary(&mut self) -> PResult<ProgramTerm> {
        if self.eat(&Tok::Minus) {
            if let Tok::Number(n) = *self.peek() {
                self.advance();
                return Ok(ProgramTerm::Numeral(-n));
            }
            let operand = self.term_unary()?;
            return Ok(ProgramTerm::binary(
                ArithOp::Subtract,
                ProgramTerm::Numeral(0),
                operand,
            ));
        }
        self.term_primary()
    }

    fn term_primary(&mut self) -> PResult<ProgramTerm> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(n) => {
                self.advance();
                Ok(ProgramTerm::Numeral(n))
            }
            Tok::Var(name) => {
                self.advance();
                if *self.peek() == Tok::LParen {
                    return Err(self.error("function terms are not supported", &[]));
                }
                Ok(ProgramTerm::Variable(name))
            }
            Tok::Ident(name) => {
                if name == "not" {
                    return Err(self.unexpected(&["term"]));
                }
                self.advance();
                if *self.peek() == Tok::LParen {
                    return Err(ParseError {
                        span,
                        message: format!("function terms are not supported: `{name}(...)`"),
                        expected: vec![],
                    });
                }
                Ok(ProgramTerm::Symbol(name))
            }
            Tok::Hash(name) => match name.as_str() {
                "inf" | "infimum" => {
                    self.advance();
                    Ok(ProgramTerm::Infimum)
                }
                "sup" | "supremum" => {
                    self.advance();
                    Ok(ProgramTerm::Supremum)
                }
                _ => Err(self.error(format!("`#{name}` is not supported in terms"), &["term"])),
            },
            Tok::LParen => {
                self.advance();
                if *self.peek() == Tok::RParen {
                    return Err(self.error("empty tuples are only allowed as atom arguments", &["term"]));
                }
                let inner = self.term_pool()?;
                if *self.peek() == Tok::Comma && matches!(self.peek_at(1), Tok::RParen) {
                    return Err(self.error("one-element tuples are not supported", &["term"]));
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Bar => Err(self.error("absolute value terms are not supported", &[])),
            _ => Err(self.unexpected(&["term"])),
        }
    }
}

/// Parses a whole program. Warnings are discarded; see
/// [`parse_program_with_warnings`].
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_with_warnings(text).map(|(program, _)| program)
}

pub fn parse_program_with_warnings(text: &str) -> Result<(Program, Vec<Warning>), ParseError> {
    let mut cursor = Cursor::new(text)?;
    let program = cursor.program()?;
    Ok((program, cursor.warnings))
}

/// Parses a single program term (pools and tuples allowed at top level).
pub fn parse_term(text: &str) -> Result<ProgramTerm, ParseError> {
    let mut cursor = Cursor::new(text)?;
    let term = cursor.term_pool()?;
    if *cursor.peek() != Tok::Eof {
        return Err(cursor.unexpected(&["end of input"]));
    }
    Ok(term)
}

// ---------------------------------------------------------------------------
// Human-readable formula format

/// Reads a formula in the human-readable format. Variables whose names start
/// with `N` are integer-sorted, all others program-sorted, which is the
/// convention the human renderer follows for bound variables.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut cursor = Cursor::new(text)?;
    let formula = cursor.formula_iff()?;
    if *cursor.peek() != Tok::Eof {
        return Err(cursor.unexpected(&["end of input"]));
    }
    Ok(formula)
}

fn formula_variable(name: String) -> Variable {
    if name.starts_with('N') {
        Variable::integer(name)
    } else {
        Variable::program(name)
    }
}

impl Cursor {
    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn formula_iff(&mut self) -> PResult<Formula> {
        let lhs = self.formula_implies()?;
        if self.eat(&Tok::DoubleArrow) {
            let rhs = self.formula_implies()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn formula_implies(&mut self) -> PResult<Formula> {
        let lhs = self.formula_or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula_implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> PResult<Formula> {
        let mut operands = vec![self.formula_and()?];
        while self.is_word("or") {
            self.advance();
            operands.push(self.formula_and()?);
        }
        Ok(if operands.len() == 1 {
            operands.pop().unwrap()
        } else {
            Formula::Or(operands)
        })
    }

    fn formula_and(&mut self) -> PResult<Formula> {
        let mut operands = vec![self.formula_unary()?];
        while self.is_word("and") {
            self.advance();
            operands.push(self.formula_unary()?);
        }
        Ok(if operands.len() == 1 {
            operands.pop().unwrap()
        } else {
            Formula::And(operands)
        })
    }

    fn formula_unary(&mut self) -> PResult<Formula> {
        if self.is_word("not") {
            self.advance();
            return Ok(Formula::not(self.formula_unary()?));
        }
        if self.is_word("forall") || self.is_word("exists") {
            let universal = self.is_word("forall");
            self.advance();
            let mut vars = Vec::new();
            while let Tok::Var(name) = self.peek().clone() {
                self.advance();
                vars.push(formula_variable(name));
            }
            if vars.is_empty() {
                return Err(self.unexpected(&["variable"]));
            }
            let body = Box::new(self.formula_unary()?);
            return Ok(if universal {
                Formula::ForAll(vars, body)
            } else {
                Formula::Exists(vars, body)
            });
        }
        match self.peek().clone() {
            Tok::Hash(name) if name == "true" => {
                self.advance();
                Ok(Formula::Truth)
            }
            Tok::Hash(name) if name == "false" => {
                self.advance();
                Ok(Formula::Falsity)
            }
            Tok::LParen => {
                // Either a parenthesized formula or a comparison.
                let save = self.pos;
                self.advance();
                if let Ok(lhs) = self.fo_term() {
                    if let Tok::Rel(relation) = *self.peek() {
                        self.advance();
                        let rhs = self.fo_term()?;
                        self.expect(Tok::RParen, "`)`")?;
                        return Ok(Formula::compare(relation, lhs, rhs));
                    }
                }
                self.pos = save;
                self.advance();
                let inner = self.formula_iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.advance();
                let primed = self.eat(&Tok::Tick);
                let mut arguments = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        arguments.push(self.fo_term()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                }
                Ok(Formula::Atom(PredicateAtom {
                    predicate: name,
                    primed,
                    arguments,
                }))
            }
            _ => Err(self.unexpected(&["formula"])),
        }
    }

    fn fo_term(&mut self) -> PResult<Term> {
        let mut lhs = self.fo_term_product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => FoArithOp::Add,
                Tok::Minus => FoArithOp::Subtract,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.fo_term_product()?;
            lhs = Term::arithmetic(op, lhs, rhs);
        }
    }

    fn fo_term_product(&mut self) -> PResult<Term> {
        let mut lhs = self.fo_term_primary()?;
        while self.eat(&Tok::Star) {
            let rhs = self.fo_term_primary()?;
            lhs = Term::arithmetic(FoArithOp::Multiply, lhs, rhs);
        }
        Ok(lhs)
    }

    fn fo_term_primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Number(n) => {
                self.advance();
                Ok(Term::Integer(n))
            }
            Tok::Minus => {
                self.advance();
                match self.peek().clone() {
                    Tok::Number(n) => {
                        self.advance();
                        Ok(Term::Integer(-n))
                    }
                    _ => Err(self.unexpected(&["numeral"])),
                }
            }
            Tok::Var(name) => {
                self.advance();
                Ok(Term::Variable(formula_variable(name)))
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Term::Symbol(name))
            }
            Tok::Hash(name) if name == "inf" => {
                self.advance();
                Ok(Term::Infimum)
            }
            Tok::Hash(name) if name == "sup" => {
                self.advance();
                Ok(Term::Supremum)
            }
            Tok::LParen => {
                self.advance();
                let first = self.fo_term()?;
                if self.eat(&Tok::Comma) {
                    let mut elements = vec![first];
                    loop {
                        elements.push(self.fo_term()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Term::Tuple(elements));
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(first)
            }
            _ => Err(self.unexpected(&["term"])),
        }
    }
}
