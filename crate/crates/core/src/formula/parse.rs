//! Recursive-descent parser for terms and formulas.
//!
//! Grammar, loosest binding first: `|`, `&`, `!`, comparisons (chains such
//! as `-1 < x < 1` expand to conjunctions), `+ -`, `*`, unary `-`, `^`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::ast::{sort_vars, Atom, CmpOp, Formula, QfFormula, Term};
use crate::algebra::Rational;
use crate::enclose::parse_rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::UnknownIdentifier { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Cmp(CmpOp),
    And,
    Or,
    Not,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(q) => format!("number {q}"),
        Tok::End => "end of input".into(),
        Tok::Cmp(op) => format!("`{op}`"),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|p| p.1);
        let mut step = 1;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '&' | '∧' => {
                if next == Some('&') {
                    step = 2;
                }
                Tok::And
            }
            '|' | '∨' => {
                if next == Some('|') {
                    step = 2;
                }
                Tok::Or
            }
            '¬' => Tok::Not,
            '!' if next == Some('=') => {
                step = 2;
                Tok::Cmp(CmpOp::Ne)
            }
            '!' => Tok::Not,
            '=' => {
                if next == Some('=') {
                    step = 2;
                }
                Tok::Cmp(CmpOp::Eq)
            }
            '<' if next == Some('=') => {
                step = 2;
                Tok::Cmp(CmpOp::Le)
            }
            '<' => Tok::Cmp(CmpOp::Lt),
            '>' if next == Some('=') => {
                step = 2;
                Tok::Cmp(CmpOp::Ge)
            }
            '>' => Tok::Cmp(CmpOp::Gt),
            '≠' => Tok::Cmp(CmpOp::Ne),
            '≤' => Tok::Cmp(CmpOp::Le),
            '≥' => Tok::Cmp(CmpOp::Ge),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || matches!(chars[j].1, '.' | '/')) {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |p| p.0);
                let lit = &text[pos..end];
                let q = parse_number(lit).ok_or_else(|| ParseError::Syntax {
                    pos,
                    msg: format!("malformed number `{lit}`"),
                })?;
                step = j - i;
                Tok::Num(q)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |p| p.0);
                step = j - i;
                Tok::Ident(text[pos..end].to_string())
            }
            c => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, pos));
        i += step;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Integers, `num/den` and finite decimals.
fn parse_number(lit: &str) -> Option<Rational> {
    if lit.contains(['e', 'E', '*']) {
        return None;
    }
    if let Some((n, d)) = lit.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    parse_rational(lit)
}

fn is_var_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    declared: Option<&'a [String]>,
    seen: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg: format!("expected {what}, found {}", describe(self.peek())),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(Formula::or(parts))
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary_formula()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary_formula()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary_formula(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(self.unary_formula()?.negate());
        }
        if *self.peek() == Tok::LParen {
            // either a parenthesized formula or the start of a term
            let save = (self.at, self.seen.len());
            self.bump();
            if let Ok(f) = self.formula() {
                if *self.peek() == Tok::RParen {
                    self.bump();
                    let continues = matches!(self.peek(), Tok::Plus | Tok::Minus | Tok::Star | Tok::Caret | Tok::Cmp(_));
                    if !continues {
                        return Ok(f);
                    }
                }
            }
            self.at = save.0;
            self.seen.truncate(save.1);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.term()?;
        let mut atoms = Vec::new();
        while let Tok::Cmp(op) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            atoms.push(Formula::Atom(Atom::new(lhs, op, rhs.clone())));
            lhs = rhs;
        }
        if atoms.is_empty() {
            return Err(self.unexpected("a comparison operator"));
        }
        Ok(Formula::and(atoms))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Term::add(acc, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = Term::sub(acc, self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.negation()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Term::mul(acc, self.negation()?);
        }
        Ok(acc)
    }

    fn negation(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Term::neg(self.negation()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Term, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Num(q) if q.is_integer() => {
                let k: u32 = q.to_integer().try_into().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "exponent must be a small non-negative integer".into(),
                })?;
                Ok(Term::pow(base, k))
            }
            _ => Err(ParseError::Syntax {
                pos,
                msg: "exponent must be a non-negative integer literal".into(),
            }),
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(q) => {
                self.bump();
                Ok(Term::Const(q))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    if name != "E" && name != "texp" {
                        return Err(ParseError::UnknownIdentifier { pos, name });
                    }
                    self.bump();
                    let t = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Term::texp(t));
                }
                if !is_var_name(&name) {
                    return Err(ParseError::UnknownIdentifier { pos, name });
                }
                if let Some(d) = self.declared {
                    if !d.contains(&name) {
                        return Err(ParseError::UnknownIdentifier { pos, name });
                    }
                }
                self.seen.push(name.clone());
                Ok(Term::Var(name))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() != Tok::End {
            return Err(self.unexpected("end of input"));
        }
        Ok(())
    }
}

fn parser<'a>(text: &str, declared: Option<&'a [String]>) -> Result<Parser<'a>, ParseError> {
    Ok(Parser {
        toks: lex(text)?,
        at: 0,
        declared,
        seen: Vec::new(),
    })
}

/// Parses a formula; its variables are the identifiers that occur, in
/// canonical order.
pub fn parse_formula(text: &str) -> Result<QfFormula, ParseError> {
    let mut p = parser(text, None)?;
    let body = p.formula()?;
    p.finish()?;
    let mut vars = std::mem::take(&mut p.seen);
    sort_vars(&mut vars);
    Ok(QfFormula { vars, body })
}

/// Parses a formula over a declared variable list.
pub fn parse_formula_with_vars(text: &str, vars: &[String]) -> Result<QfFormula, ParseError> {
    let mut p = parser(text, Some(vars))?;
    let body = p.formula()?;
    p.finish()?;
    Ok(QfFormula {
        vars: vars.to_vec(),
        body,
    })
}

/// Parses a single term, optionally restricted to declared variables.
pub fn parse_term(text: &str, declared: Option<&[String]>) -> Result<Term, ParseError> {
    let mut p = parser(text, declared)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}
