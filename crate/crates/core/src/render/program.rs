//! Prints programs back in source syntax, with just the parentheses the
//! parser needs to rebuild the same tree.

use std::fmt::Write;

use crate::ast::{Atom, AtomArguments, BodyLiteral, Head, Program, ProgramTerm, Rule};

// pool < tuple < interval < additive < multiplicative < primary
fn level(t: &ProgramTerm) -> u8 {
    match t {
        ProgramTerm::Pool(_) => 0,
        ProgramTerm::Tuple(_) => 1,
        ProgramTerm::Interval { .. } => 2,
        ProgramTerm::BinaryArith { op, .. } => match op {
            crate::ast::ArithOp::Add | crate::ast::ArithOp::Subtract => 3,
            _ => 4,
        },
        _ => 5,
    }
}

fn write_term(out: &mut String, t: &ProgramTerm, min: u8) {
    let own = level(t);
    let paren = own < min;
    if paren {
        out.push('(');
    }
    match t {
        ProgramTerm::Numeral(n) => {
            let _ = write!(out, "{n}");
        }
        ProgramTerm::Symbol(s) | ProgramTerm::Variable(s) => out.push_str(s),
        ProgramTerm::Infimum => out.push_str("#inf"),
        ProgramTerm::Supremum => out.push_str("#sup"),
        ProgramTerm::BinaryArith { op, lhs, rhs } => {
            write_term(out, lhs, own);
            out.push_str(op.symbol());
            write_term(out, rhs, own + 1);
        }
        ProgramTerm::Interval { lower, upper } => {
            write_term(out, lower, 3);
            out.push_str("..");
            write_term(out, upper, 3);
        }
        ProgramTerm::Tuple(elements) => {
            // a tuple that is not nested in a pool or tuple still needs its
            // own parentheses
            if !paren {
                out.push('(');
            }
            for (i, e) in elements.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(out, e, 2);
            }
            if !paren {
                out.push(')');
            }
        }
        ProgramTerm::Pool(alternatives) => {
            for (i, a) in alternatives.iter().enumerate() {
                if i > 0 {
                    out.push(';');
                }
                write_term(out, a, 1);
            }
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn render_program_term(t: &ProgramTerm) -> String {
    let mut out = String::new();
    write_term(&mut out, t, 0);
    out
}

fn write_arguments(out: &mut String, args: &[ProgramTerm]) {
    for (i, t) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_term(out, t, 2);
    }
}

fn write_atom(out: &mut String, atom: &Atom) {
    out.push_str(&atom.predicate);
    match &atom.arguments {
        AtomArguments::Tuple(args) if args.is_empty() => {}
        AtomArguments::Tuple(args) => {
            out.push('(');
            write_arguments(out, args);
            out.push(')');
        }
        AtomArguments::Pool(alternatives) => {
            out.push('(');
            for (i, args) in alternatives.iter().enumerate() {
                if i > 0 {
                    out.push(';');
                }
                write_arguments(out, args);
            }
            out.push(')');
        }
    }
}

pub fn render_rule(rule: &Rule) -> String {
    let mut out = String::new();
    match &rule.head {
        Head::Basic(atom) => write_atom(&mut out, atom),
        Head::Choice(atom) => {
            out.push_str("{ ");
            write_atom(&mut out, atom);
            out.push_str(" }");
        }
        Head::Empty => {}
    }
    if !rule.body.is_empty() {
        out.push_str(if matches!(rule.head, Head::Empty) { ":- " } else { " :- " });
        for (i, literal) in rule.body.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            match literal {
                BodyLiteral::Positive(a) => write_atom(&mut out, a),
                BodyLiteral::Negated(a) => {
                    out.push_str("not ");
                    write_atom(&mut out, a);
                }
                BodyLiteral::DoublyNegated(a) => {
                    out.push_str("not not ");
                    write_atom(&mut out, a);
                }
                BodyLiteral::Comparison { relation, lhs, rhs } => {
                    write_term(&mut out, lhs, 2);
                    let _ = write!(out, " {} ", relation.symbol());
                    write_term(&mut out, rhs, 2);
                }
            }
        }
    } else if matches!(rule.head, Head::Empty) {
        out.push_str(":-");
    }
    out.push('.');
    out
}

/// One rule per line.
pub fn render_program(program: &Program) -> String {
    program
        .rules()
        .iter()
        .map(|r| render_rule(r) + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_term};

    #[test]
    fn terms_round_trip() {
        for source in [
            "1..3",
            "a;b;c",
            "(1,2)",
            "(1;2),a",
            "(1+2)*3",
            "1-(2-3)",
            "(1..2)..3",
            "X\\2+-4",
            "((a,b),c)",
            "(a;b)..c",
            "#inf;#sup",
        ] {
            let t = parse_term(source).unwrap();
            let printed = render_program_term(&t);
            assert_eq!(parse_term(&printed).unwrap(), t, "{source} printed as {printed}");
        }
    }

    #[test]
    fn rules_round_trip() {
        let source = "colour(r;g;b).\n{ p(X) } :- q(X), not r(X), not not s.\n:- p(1,2;3,4), X != Y.\np((a;b)).\nq :- 1 < 2.\n";
        let program = parse_program(source).unwrap();
        let printed = render_program(&program);
        assert_eq!(parse_program(&printed).unwrap(), program);
        assert!(printed.starts_with("colour(r;g;b).\n{ p(X) } :- q(X), not r(X), not not s.\n"));
    }
}
