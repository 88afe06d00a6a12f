//! Three-valued interval evaluation of terms and formulas over boxes.

use super::ast::{Atom, CmpOp, Formula, Term};
use crate::enclose::{texp_enclosure, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn and(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }
}

/// Enclosure of a term with `vars[i] ∈ vals[i]`, texp in restricted form.
pub fn eval_term(t: &Term, vars: &[String], vals: &[Interval], prec: u32) -> Interval {
    match t {
        Term::Const(q) => Interval::from_rational(q, prec),
        Term::Var(v) => {
            let i = vars.iter().position(|x| x == v).expect("variable bound by caller");
            vals[i].clone()
        }
        Term::Texp(a) => texp_enclosure(&eval_term(a, vars, vals, prec), prec),
        Term::Neg(a) => eval_term(a, vars, vals, prec).neg(),
        Term::Add(a, b) => eval_term(a, vars, vals, prec).add(&eval_term(b, vars, vals, prec), prec),
        Term::Sub(a, b) => eval_term(a, vars, vals, prec).sub(&eval_term(b, vars, vals, prec), prec),
        Term::Mul(a, b) => eval_term(a, vars, vals, prec).mul(&eval_term(b, vars, vals, prec), prec),
        Term::Pow(a, k) => eval_term(a, vars, vals, prec).powi(*k, prec),
    }
}

/// Truth of `v ▷ 0` for every `v` in the interval.
pub fn compare_zero(v: &Interval, op: CmpOp) -> Truth {
    let pos = v.lo().is_positive();
    let neg = v.hi().is_negative();
    let nonneg = !v.lo().is_negative();
    let nonpos = !v.hi().is_positive();
    let zero = nonneg && nonpos;
    let decide = |t: bool, f: bool| match (t, f) {
        (true, _) => Truth::True,
        (_, true) => Truth::False,
        _ => Truth::Unknown,
    };
    match op {
        CmpOp::Eq => decide(zero, pos || neg),
        CmpOp::Ne => decide(pos || neg, zero),
        CmpOp::Gt => decide(pos, nonpos),
        CmpOp::Ge => decide(nonneg, neg),
        CmpOp::Lt => decide(neg, nonneg),
        CmpOp::Le => decide(nonpos, pos),
    }
}

pub fn eval_atom(a: &Atom, vars: &[String], vals: &[Interval], prec: u32) -> Truth {
    let d = eval_term(&a.lhs, vars, vals, prec).sub(&eval_term(&a.rhs, vars, vals, prec), prec);
    compare_zero(&d, a.op)
}

pub fn eval_formula(f: &Formula, vars: &[String], vals: &[Interval], prec: u32) -> Truth {
    match f {
        Formula::Atom(a) => eval_atom(a, vars, vals, prec),
        Formula::And(v) => {
            let mut acc = Truth::True;
            for x in v {
                acc = acc.and(eval_formula(x, vars, vals, prec));
                if acc == Truth::False {
                    break;
                }
            }
            acc
        }
        Formula::Or(v) => {
            let mut acc = Truth::False;
            for x in v {
                acc = acc.or(eval_formula(x, vars, vals, prec));
                if acc == Truth::True {
                    break;
                }
            }
            acc
        }
    }
}
