use std::fmt;

use num_traits::{Signed, Zero};

use crate::algebra::{fmt_rational, Rational};

/// Terms over `{rational constants, variables, +, -, *, ^, texp}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Rational),
    Var(String),
    Texp(Box<Term>),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Term,
    pub op: CmpOp,
    pub rhs: Term,
}

/// Quantifier-free formula in negation-normal form: negations are pushed
/// into the comparison operators, so there is no `Not` node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

/// A formula together with its ordered variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QfFormula {
    pub vars: Vec<String>,
    pub body: Formula,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn int(v: i64) -> Term {
        Term::Const(Rational::from_integer(v.into()))
    }

    pub fn texp(t: Term) -> Term {
        Term::Texp(Box::new(t))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Term) -> Term {
        match a {
            Term::Const(q) => Term::Const(-q),
            a => Term::Neg(Box::new(a)),
        }
    }

    pub fn pow(a: Term, k: u32) -> Term {
        Term::Pow(Box::new(a), k)
    }

    /// Applies `f` bottom-up.
    pub fn map(&self, f: &mut impl FnMut(Term) -> Term) -> Term {
        let t = match self {
            Term::Const(_) | Term::Var(_) => self.clone(),
            Term::Texp(a) => Term::Texp(Box::new(a.map(f))),
            Term::Neg(a) => Term::Neg(Box::new(a.map(f))),
            Term::Add(a, b) => Term::Add(Box::new(a.map(f)), Box::new(b.map(f))),
            Term::Sub(a, b) => Term::Sub(Box::new(a.map(f)), Box::new(b.map(f))),
            Term::Mul(a, b) => Term::Mul(Box::new(a.map(f)), Box::new(b.map(f))),
            Term::Pow(a, k) => Term::Pow(Box::new(a.map(f)), *k),
        };
        f(t)
    }

    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Const(_) | Term::Var(_) => {}
            Term::Texp(a) | Term::Neg(a) | Term::Pow(a, _) => a.visit(f),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    fn level(&self) -> u8 {
        match self {
            Term::Add(..) | Term::Sub(..) => 1,
            Term::Mul(..) => 2,
            Term::Neg(_) => 3,
            Term::Const(q) if q.is_negative() => 3,
            Term::Pow(..) => 4,
            Term::Const(_) | Term::Var(_) | Term::Texp(_) => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Term::Const(q) => {
                if q.is_negative() {
                    write!(f, "-{}", fmt_rational(&-q))
                } else {
                    write!(f, "{}", fmt_rational(q))
                }
            }
            Term::Var(v) => write!(f, "{v}"),
            Term::Texp(a) => {
                write!(f, "E(")?;
                a.write_at(f, 0)?;
                write!(f, ")")
            }
            Term::Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, 3)
            }
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.write_at(f, 1)?;
                write!(f, "{}", if matches!(self, Term::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 2)
            }
            Term::Mul(a, b) => {
                a.write_at(f, 2)?;
                write!(f, " * ")?;
                b.write_at(f, 3)
            }
            Term::Pow(a, k) => {
                a.write_at(f, 5)?;
                write!(f, "^{k}")
            }
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Term::Const(q) if q.is_zero())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// Truth of `v ▷ 0` for a sign `v ∈ {-1, 0, 1}`.
    pub fn holds_for_sign(self, v: i32) -> bool {
        match self {
            CmpOp::Eq => v == 0,
            CmpOp::Ne => v != 0,
            CmpOp::Lt => v < 0,
            CmpOp::Le => v <= 0,
            CmpOp::Gt => v > 0,
            CmpOp::Ge => v >= 0,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Atom {
    pub fn new(lhs: Term, op: CmpOp, rhs: Term) -> Atom {
        Atom { lhs, op, rhs }
    }

    pub fn negate(&self) -> Atom {
        Atom {
            op: self.op.negate(),
            ..self.clone()
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(Term) -> Term) -> Atom {
        Atom {
            lhs: self.lhs.map(f),
            op: self.op,
            rhs: self.rhs.map(f),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

impl Formula {
    pub fn atom(lhs: Term, op: CmpOp, rhs: Term) -> Formula {
        Formula::Atom(Atom::new(lhs, op, rhs))
    }

    /// Conjunction with nested conjunctions flattened.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::And(v) => out.extend(v),
                p => out.push(p),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::And(out)
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::Or(v) => out.extend(v),
                p => out.push(p),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::Or(out)
        }
    }

    /// Negation, pushed to the atoms.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.negate()),
            Formula::And(v) => Formula::or(v.iter().map(Formula::negate).collect()),
            Formula::Or(v) => Formula::and(v.iter().map(Formula::negate).collect()),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::And(v) | Formula::Or(v) => v.iter().for_each(|f| f.collect_atoms(out)),
        }
    }

    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(a) => f(a),
            Formula::And(v) => Formula::and(v.iter().map(|x| x.map_atoms(f)).collect()),
            Formula::Or(v) => Formula::or(v.iter().map(|x| x.map_atoms(f)).collect()),
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(Term) -> Term) -> Formula {
        self.map_atoms(&mut |a| Formula::Atom(a.map_terms(f)))
    }

    /// Disjunctive normal form as a list of atom conjunctions.
    pub fn dnf(&self) -> Vec<Vec<Atom>> {
        match self {
            Formula::Atom(a) => vec![vec![a.clone()]],
            Formula::Or(v) => v.iter().flat_map(Formula::dnf).collect(),
            Formula::And(v) => {
                let mut acc: Vec<Vec<Atom>> = vec![vec![]];
                for part in v {
                    let cases = part.dnf();
                    let mut next = Vec::with_capacity(acc.len() * cases.len());
                    for a in &acc {
                        for c in &cases {
                            let mut merged = a.clone();
                            merged.extend(c.iter().cloned());
                            next.push(merged);
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    pub fn is_conjunctive(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::And(v) => v.iter().all(|f| matches!(f, Formula::Atom(_))),
            Formula::Or(_) => false,
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Or(_) => 1,
            Formula::And(_) => 2,
            Formula::Atom(_) => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::And(v) | Formula::Or(v) => {
                let (sep, child) = if matches!(self, Formula::And(_)) { (" & ", 3) } else { (" | ", 2) };
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    x.write_at(f, child)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl fmt::Display for QfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

/// Variable order: alphabetic prefix, then numeric suffix by value.
pub fn var_order(a: &str, b: &str) -> std::cmp::Ordering {
    fn split(s: &str) -> (&str, Option<u128>) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (p, d) = s.split_at(cut);
        (p, d.parse().ok())
    }
    let (pa, na) = split(a);
    let (pb, nb) = split(b);
    pa.cmp(pb).then(na.cmp(&nb)).then(a.cmp(b))
}

pub fn sort_vars(vars: &mut Vec<String>) {
    vars.sort_by(|a, b| var_order(a, b));
    vars.dedup();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_parenthesizes_by_precedence() {
        let x = Term::var("x");
        let y = Term::var("y");
        let t = Term::mul(Term::add(x.clone(), y.clone()), Term::int(2));
        assert_eq!(t.to_string(), "(x + y) * 2");
        let t = Term::sub(x.clone(), Term::sub(y.clone(), Term::int(1)));
        assert_eq!(t.to_string(), "x - (y - 1)");
        let t = Term::pow(Term::int(-2), 2);
        assert_eq!(t.to_string(), "(-2)^2");
        let t = Term::neg(Term::pow(x.clone(), 2));
        assert_eq!(t.to_string(), "-x^2");
        let t = Term::texp(Term::texp(x));
        assert_eq!(t.to_string(), "E(E(x))");
    }

    #[test]
    fn negation_normal_form() {
        let a = Formula::atom(Term::var("x"), CmpOp::Lt, Term::int(1));
        let b = Formula::atom(Term::var("y"), CmpOp::Eq, Term::int(0));
        let f = Formula::and(vec![a, b]).negate();
        assert_eq!(f.to_string(), "x >= 1 | y != 0");
    }

    #[test]
    fn dnf_expands_products() {
        let at = |v: &str| Formula::atom(Term::var(v), CmpOp::Gt, Term::int(0));
        let f = Formula::and(vec![Formula::or(vec![at("a"), at("b")]), Formula::or(vec![at("c"), at("d")])]);
        assert_eq!(f.dnf().len(), 4);
        assert_eq!(f.to_string(), "(a > 0 | b > 0) & (c > 0 | d > 0)");
    }

    #[test]
    fn natural_variable_order() {
        let mut v: Vec<String> = ["x10", "x2", "y", "x1", "u1"].iter().map(|s| s.to_string()).collect();
        sort_vars(&mut v);
        assert_eq!(v, ["u1", "x1", "x2", "x10", "y"]);
    }
}
