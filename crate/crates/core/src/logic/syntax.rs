use super::{Formula, Term};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("unexpected token `{token}` at offset {offset}")]
    UnexpectedToken { token: String, offset: usize },
    #[error("unterminated quoted symbol starting at offset {0}")]
    UnterminatedQuote(usize),
    #[error("predicate `{pred}` applied to {arity} arguments; only unary predicates are supported")]
    NonUnaryPredicate { pred: String, arity: usize },
    #[error("variable `?{0}` is not bound by an enclosing forall")]
    UnboundVariable(String),
    #[error("`{keyword}` expects {expected} operand(s), got {got}")]
    Arity {
        keyword: &'static str,
        expected: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Bare(String),
    Quoted(String),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (off, c) = bytes[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Tok::Open, off));
                i += 1;
            }
            ')' => {
                out.push((Tok::Close, off));
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                let mut closed = false;
                while i < bytes.len() {
                    let (_, c) = bytes[i];
                    match c {
                        '\\' if i + 1 < bytes.len() => {
                            s.push(bytes[i + 1].1);
                            i += 2;
                        }
                        '"' => {
                            closed = true;
                            i += 1;
                            break;
                        }
                        c => {
                            s.push(c);
                            i += 1;
                        }
                    }
                }
                if !closed {
                    return Err(ParseError::UnterminatedQuote(off));
                }
                out.push((Tok::Quoted(s), off));
            }
            _ => {
                let mut s = String::new();
                while i < bytes.len() {
                    let c = bytes[i].1;
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' {
                        break;
                    }
                    s.push(c);
                    i += 1;
                }
                out.push((Tok::Bare(s), off));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or(ParseError::UnexpectedEof)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            (Tok::Close, _) => Ok(()),
            (t, offset) => Err(unexpected(&t, offset)),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.next()? {
            (Tok::Open, _) => {}
            (t, offset) => return Err(unexpected(&t, offset)),
        }
        let (head, offset) = self.next()?;
        match head {
            Tok::Bare(ref kw) if kw == "forall" => {
                let (var_tok, voff) = self.next()?;
                let var = match var_tok {
                    Tok::Bare(ref v) if v.starts_with('?') && v.len() > 1 => v[1..].to_string(),
                    t => return Err(unexpected(&t, voff)),
                };
                self.bound.push(var.clone());
                let body = self.formula()?;
                self.bound.pop();
                self.expect_close()?;
                Ok(Formula::forall(var, body))
            }
            Tok::Bare(ref kw) if kw == "not" => {
                let args = self.operands("not", 1)?;
                let [a]: [Formula; 1] = args.try_into().expect("arity checked");
                Ok(Formula::not(a))
            }
            Tok::Bare(ref kw) if kw == "and" || kw == "or" || kw == "->" => {
                let keyword = match kw.as_str() {
                    "and" => "and",
                    "or" => "or",
                    _ => "->",
                };
                let args = self.operands(keyword, 2)?;
                let [a, b]: [Formula; 2] = args.try_into().expect("arity checked");
                Ok(match keyword {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                })
            }
            Tok::Bare(pred) | Tok::Quoted(pred) => {
                let mut terms = Vec::new();
                loop {
                    match self.next()? {
                        (Tok::Close, _) => break,
                        (Tok::Bare(t), _) => terms.push(self.term(t, false)?),
                        (Tok::Quoted(t), _) => terms.push(self.term(t, true)?),
                        (t, offset) => return Err(unexpected(&t, offset)),
                    }
                }
                if terms.len() != 1 {
                    return Err(ParseError::NonUnaryPredicate {
                        pred,
                        arity: terms.len(),
                    });
                }
                Ok(Formula::atom(pred, terms.pop().expect("one term")))
            }
            t => Err(unexpected(&t, offset)),
        }
    }

    fn operands(&mut self, keyword: &'static str, expected: usize) -> Result<Vec<Formula>, ParseError> {
        let mut args = Vec::new();
        loop {
            match self.toks.get(self.pos) {
                Some((Tok::Close, _)) => {
                    self.pos += 1;
                    break;
                }
                Some(_) => args.push(self.formula()?),
                None => return Err(ParseError::UnexpectedEof),
            }
        }
        if args.len() != expected {
            return Err(ParseError::Arity {
                keyword,
                expected,
                got: args.len(),
            });
        }
        Ok(args)
    }

    fn term(&self, raw: String, quoted: bool) -> Result<Term, ParseError> {
        if !quoted && raw.starts_with('?') && raw.len() > 1 {
            let v = raw[1..].to_string();
            if !self.bound.contains(&v) {
                return Err(ParseError::UnboundVariable(v));
            }
            Ok(Term::Var(v))
        } else {
            Ok(Term::Const(raw))
        }
    }
}

fn unexpected(t: &Tok, offset: usize) -> ParseError {
    let token = match t {
        Tok::Open => "(".to_string(),
        Tok::Close => ")".to_string(),
        Tok::Bare(s) => s.clone(),
        Tok::Quoted(s) => format!("\"{s}\""),
    };
    ParseError::UnexpectedToken { token, offset }
}

pub(super) fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        bound: Vec::new(),
    };
    let f = p.formula()?;
    if let Some((t, offset)) = p.toks.get(p.pos) {
        return Err(unexpected(t, *offset));
    }
    Ok(f)
}

const KEYWORDS: [&str; 5] = ["forall", "not", "and", "or", "->"];

fn write_symbol(s: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let needs_quotes = s.is_empty()
        || s.starts_with('?')
        || KEYWORDS.contains(&s)
        || s.chars().any(|c| c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == '\\');
    if needs_quotes {
        f.write_str("\"")?;
        for c in s.chars() {
            if c == '"' || c == '\\' {
                f.write_str("\\")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("\"")
    } else {
        f.write_str(s)
    }
}

pub(super) fn write_formula(formula: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match formula {
        Formula::Atom { pred, term } => {
            f.write_str("(")?;
            write_symbol(pred, f)?;
            f.write_str(" ")?;
            match term {
                Term::Var(v) => write!(f, "?{v}")?,
                Term::Const(c) => write_symbol(c, f)?,
            }
            f.write_str(")")
        }
        Formula::Not(a) => write!(f, "(not {a})"),
        Formula::And(a, b) => write!(f, "(and {a} {b})"),
        Formula::Or(a, b) => write!(f, "(or {a} {b})"),
        Formula::Implies(a, b) => write!(f, "(-> {a} {b})"),
        Formula::Forall { var, body } => write!(f, "(forall ?{var} {body})"),
    }
}
