//! Reference computations that share no code with the library: exact
//! rational Sturm sequences, a fixed-point exponential, and a rational
//! interval evaluator for formulas.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use kkit::algebra::ExpPolynomial;
use kkit::formula::{Atom, CmpOp, Formula, Term};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn dec(s: &str) -> Q {
    kkit::enclose::parse_rational(s).expect("decimal literal")
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

// ---------------------------------------------------------------- exp

/// `exp(x)` to within `2^-(bits - 16)` relative, by halving the argument
/// until it is below 1/2, summing the series in fixed point and squaring
/// back.
pub fn exp_q(x: &Q, bits: u32) -> Q {
    let guard = bits + 64;
    let scale = BigInt::one() << guard;
    let mut s = 0u32;
    let half = q(1, 2);
    while x.abs() / Q::from_integer(BigInt::one() << s) >= half {
        s += 1;
    }
    let xr = x / Q::from_integer(BigInt::one() << s);
    let fx = (xr * Q::from_integer(scale.clone())).round().to_integer();
    let mut sum = scale.clone();
    let mut term = scale.clone();
    let mut k = 1u32;
    loop {
        term = &term * &fx / (&scale * BigInt::from(k));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..s {
        sum = &sum * &sum >> guard;
    }
    Q::new(sum, scale)
}

/// Rounds to a multiple of `2^-bits` to keep Newton iterates small.
fn trim(x: &Q, bits: u32) -> Q {
    let s = Q::from_integer(BigInt::one() << bits);
    Q::new((x * &s).round().to_integer(), s.to_integer())
}

/// `ln(a)` for `a > 0` by Newton on `exp(y) - a`.
pub fn ln_q(a: &Q, bits: u32) -> Q {
    let mut y = Q::zero();
    for _ in 0..200 {
        let e = exp_q(&y, bits);
        let next = trim(&(&y - Q::one() + a / e), bits);
        if next == y {
            break;
        }
        y = next;
    }
    y
}

/// The omega constant, `w · exp(w) = 1`.
pub fn omega_q(bits: u32) -> Q {
    let mut w = q(1, 2);
    for _ in 0..200 {
        let e = exp_q(&w, bits);
        let f = &w * &e - Q::one();
        let df = &e * (&w + Q::one());
        let next = trim(&(&w - f / df), bits);
        if next == w {
            break;
        }
        w = next;
    }
    w
}

/// Value of a texp-polynomial at a rational point, read off its monomial
/// list with the fixed-point exponential.
pub fn eval_poly_q(p: &ExpPolynomial, x: &[Q]) -> Q {
    let one = Q::one();
    let ys: Vec<Q> = (0..p.shape().ell())
        .map(|i| if x[i].abs() < one { exp_q(&x[i], 256) } else { Q::zero() })
        .collect();
    p.terms()
        .iter()
        .map(|m| {
            let mut v = m.coeff.clone();
            for (xi, &a) in x.iter().zip(&m.xpow) {
                v *= num_traits::pow(xi.clone(), a as usize);
            }
            for (yi, &b) in ys.iter().zip(&m.ypow) {
                v *= num_traits::pow(yi.clone(), b as usize);
            }
            v
        })
        .sum()
}

/// Solves `a · x = b` over the rationals; `None` if singular.
pub fn solve_q(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
                let t = &f * &b[c];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Newton's method in exact arithmetic, iterates rounded to `2^-200`,
/// with a central-difference Jacobian of step `2^-100`.
pub fn newton_q(eqs: &[ExpPolynomial], x0: &[Q], iters: usize) -> Option<Vec<Q>> {
    let n = x0.len();
    let h = Q::new(BigInt::one(), BigInt::one() << 100);
    let mut x = x0.to_vec();
    for _ in 0..iters {
        let f: Vec<Q> = eqs.iter().map(|p| eval_poly_q(p, &x)).collect();
        let mut jac = vec![vec![Q::zero(); n]; n];
        for j in 0..n {
            let mut up = x.clone();
            let mut down = x.clone();
            up[j] += &h;
            down[j] -= &h;
            for (i, p) in eqs.iter().enumerate() {
                jac[i][j] = (eval_poly_q(p, &up) - eval_poly_q(p, &down)) / (qi(2) * &h);
            }
        }
        let step = solve_q(jac, f)?;
        x = x.iter().zip(&step).map(|(a, s)| trim(&(a - s), 200)).collect();
    }
    Some(x)
}

// -------------------------------------------------------------- Sturm

/// Dense polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly(pub Vec<Q>);

impl UPoly {
    pub fn from_ints(c: &[i64]) -> UPoly {
        let mut p = UPoly(c.iter().map(|&v| qi(v)).collect());
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UPoly {
        let mut p = UPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * qi(i as i64)).collect());
        p.trim();
        p
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        let mut r = self.0.clone();
        let lead = d.0.last().unwrap().clone();
        while r.len() >= d.0.len() && !r.is_empty() {
            let f = r.last().unwrap() / &lead;
            let shift = r.len() - d.0.len();
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        UPoly(r)
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn gcd_degree(&self, o: &UPoly) -> usize {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.degree()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd_degree(&self.derivative()) == 0
    }

    pub fn sturm(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }
}

fn variations(seq: &[UPoly], x: &Q) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| p.eval(x))
        .filter(|v| !v.is_zero())
        .map(|v| if v.is_positive() { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots in the closed interval `[a, b]`.
pub fn sturm_count(p: &UPoly, a: &Q, b: &Q) -> usize {
    let seq = p.sturm();
    let n = variations(&seq, a) - variations(&seq, b);
    n + usize::from(p.eval(a).is_zero())
}

// ------------------------------------------------------ formula oracle

/// Closed rational interval.
#[derive(Clone, Debug)]
pub struct QI {
    pub lo: Q,
    pub hi: Q,
}

impl QI {
    pub fn point(x: Q) -> QI {
        QI { lo: x.clone(), hi: x }
    }

    fn add(&self, o: &QI) -> QI {
        QI {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn neg(&self) -> QI {
        QI {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    fn mul(&self, o: &QI) -> QI {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        QI {
            lo: p.iter().min().unwrap().clone(),
            hi: p.iter().max().unwrap().clone(),
        }
    }
}

const ORACLE_BITS: u32 = 200;

/// `exp(x)` as an interval of width `2^-170` around the fixed-point value.
fn exp_qi(x: &Q) -> QI {
    if x.is_zero() {
        return QI::point(Q::one());
    }
    let v = exp_q(x, ORACLE_BITS);
    let eps = Q::new(BigInt::one(), BigInt::one() << 170);
    QI { lo: &v - &eps, hi: v + eps }
}

/// `texp` over an interval argument.
pub fn texp_qi(a: &QI) -> QI {
    let one = Q::one();
    if a.hi <= -one.clone() || a.lo >= one {
        return QI::point(Q::zero());
    }
    let lo = exp_qi(&a.lo);
    let hi = exp_qi(&a.hi);
    if a.lo > -one.clone() && a.hi < one {
        return QI { lo: lo.lo, hi: hi.hi };
    }
    // straddles ±1: the value is 0 or anywhere up to e
    QI {
        lo: Q::zero(),
        hi: if a.hi >= one { qi(3) } else { hi.hi },
    }
}

pub fn eval_term(t: &Term, env: &dyn Fn(&str) -> QI) -> QI {
    match t {
        Term::Const(c) => QI::point(c.clone()),
        Term::Var(v) => env(v),
        Term::Texp(inner) => texp_qi(&eval_term(inner, env)),
        Term::Neg(a) => eval_term(a, env).neg(),
        Term::Add(a, b) => eval_term(a, env).add(&eval_term(b, env)),
        Term::Sub(a, b) => eval_term(a, env).add(&eval_term(b, env).neg()),
        Term::Mul(a, b) => eval_term(a, env).mul(&eval_term(b, env)),
        Term::Pow(a, k) => {
            let base = eval_term(a, env);
            (0..*k).fold(QI::point(Q::one()), |acc, _| acc.mul(&base))
        }
    }
}

/// Sign of `lhs - rhs`. An enclosure narrower than `2^-150` that still
/// contains 0 is read as an exact zero; wider ones are undecided.
pub fn atom_sign(a: &Atom, env: &dyn Fn(&str) -> QI) -> Option<i32> {
    let v = eval_term(&a.lhs, env).add(&eval_term(&a.rhs, env).neg());
    if v.lo.is_positive() {
        Some(1)
    } else if v.hi.is_negative() {
        Some(-1)
    } else {
        let tiny = Q::new(BigInt::one(), BigInt::one() << 150);
        (&v.hi - &v.lo < tiny).then_some(0)
    }
}

pub fn op_holds(op: CmpOp, s: i32) -> bool {
    match op {
        CmpOp::Eq => s == 0,
        CmpOp::Ne => s != 0,
        CmpOp::Lt => s < 0,
        CmpOp::Le => s <= 0,
        CmpOp::Gt => s > 0,
        CmpOp::Ge => s >= 0,
    }
}

/// Truth of `f`, or `None` if some atom it depends on is undecided.
pub fn oracle_truth(f: &Formula, env: &dyn Fn(&str) -> QI) -> Option<bool> {
    match f {
        Formula::Atom(a) => atom_sign(a, env).map(|s| op_holds(a.op, s)),
        Formula::And(v) => {
            let mut out = Some(true);
            for g in v {
                match oracle_truth(g, env) {
                    Some(false) => return Some(false),
                    None => out = None,
                    Some(true) => {}
                }
            }
            out
        }
        Formula::Or(v) => {
            let mut out = Some(false);
            for g in v {
                match oracle_truth(g, env) {
                    Some(true) => return Some(true),
                    None => out = None,
                    Some(false) => {}
                }
            }
            out
        }
    }
}

/// Truth at a rational point; panics if the oracle cannot decide.
pub fn oracle_holds(f: &Formula, env: &dyn Fn(&str) -> Q) -> bool {
    oracle_truth(f, &|v| QI::point(env(v))).expect("oracle left an atom undecided")
}
