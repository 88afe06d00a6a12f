//! Exact texp-polynomials `p(x₁..xₙ, texp(x₁)..texp(x_ℓ))` over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;
use crate::enclose::{exp_on_closed_unit, texp_enclosure, Interval, IntervalBox};

pub type Rational = BigRational;

/// `(ℓ, n)`: `n` variables, the first `ℓ` of which carry a texp factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    ell: usize,
    n: usize,
}

impl Shape {
    pub fn new(ell: usize, n: usize) -> Result<Shape, AlgebraError> {
        if n == 0 {
            return Err(AlgebraError::EmptySystem);
        }
        if ell > n {
            return Err(AlgebraError::InvalidShape { ell, n });
        }
        Ok(Shape { ell, n })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ell, self.n)
    }
}

/// `coeff · x^xpow · texp(x)^ypow`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpMonomial {
    pub coeff: Rational,
    pub xpow: Vec<u32>,
    pub ypow: Vec<u32>,
}

impl ExpMonomial {
    pub fn degree(&self) -> u32 {
        self.xpow.iter().chain(&self.ypow).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }
}

/// Graded-lexicographic key over the concatenated exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct GrLex {
    degree: u32,
    exps: Vec<u32>,
}

impl GrLex {
    fn new(xpow: &[u32], ypow: &[u32]) -> GrLex {
        let exps: Vec<u32> = xpow.iter().chain(ypow).copied().collect();
        GrLex {
            degree: exps.iter().sum(),
            exps,
        }
    }
}

/// Canonical texp-polynomial: monomials stored in decreasing graded-lex
/// order with non-zero coefficients and no repeated exponent pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpPolynomial {
    shape: Shape,
    terms: Vec<ExpMonomial>,
}

/// Collects monomials and produces the canonical form.
struct Accumulator {
    shape: Shape,
    map: BTreeMap<GrLex, Rational>,
}

impl Accumulator {
    fn new(shape: Shape) -> Self {
        Accumulator {
            shape,
            map: BTreeMap::new(),
        }
    }

    fn push(&mut self, coeff: Rational, xpow: &[u32], ypow: &[u32]) {
        if coeff.is_zero() {
            return;
        }
        let key = GrLex::new(xpow, ypow);
        let slot = self.map.entry(key).or_insert_with(Rational::zero);
        *slot += coeff;
    }

    fn finish(self) -> ExpPolynomial {
        let n = self.shape.n;
        let terms = self
            .map
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, coeff)| ExpMonomial {
                coeff,
                xpow: k.exps[..n].to_vec(),
                ypow: k.exps[n..].to_vec(),
            })
            .collect();
        ExpPolynomial {
            shape: self.shape,
            terms,
        }
    }
}

impl ExpPolynomial {
    pub fn zero(shape: Shape) -> Self {
        ExpPolynomial { shape, terms: vec![] }
    }

    pub fn constant(shape: Shape, c: Rational) -> Self {
        let mut acc = Accumulator::new(shape);
        acc.push(c, &vec![0; shape.n], &vec![0; shape.ell]);
        acc.finish()
    }

    pub fn from_int(shape: Shape, c: i64) -> Self {
        Self::constant(shape, Rational::from_integer(BigInt::from(c)))
    }

    /// The variable `x_i` (0-based).
    pub fn var(shape: Shape, i: usize) -> Result<Self, AlgebraError> {
        if i >= shape.n {
            return Err(AlgebraError::IndexOutOfRange { index: i, n: shape.n });
        }
        let mut xpow = vec![0; shape.n];
        xpow[i] = 1;
        Ok(Self::monomial(shape, Rational::one(), xpow, vec![0; shape.ell]))
    }

    /// The factor `texp(x_i)` (0-based, `i < ℓ`).
    pub fn texp_var(shape: Shape, i: usize) -> Result<Self, AlgebraError> {
        if i >= shape.ell {
            return Err(AlgebraError::NotRestricted { index: i, ell: shape.ell });
        }
        let mut ypow = vec![0; shape.ell];
        ypow[i] = 1;
        Ok(Self::monomial(shape, Rational::one(), vec![0; shape.n], ypow))
    }

    pub fn monomial(shape: Shape, coeff: Rational, xpow: Vec<u32>, ypow: Vec<u32>) -> Self {
        assert_eq!(xpow.len(), shape.n);
        assert_eq!(ypow.len(), shape.ell);
        let mut acc = Accumulator::new(shape);
        acc.push(coeff, &xpow, &ypow);
        acc.finish()
    }

    /// Builds the canonical form from arbitrary (possibly repeated) terms.
    pub fn from_terms(shape: Shape, terms: impl IntoIterator<Item = ExpMonomial>) -> Result<Self, AlgebraError> {
        let mut acc = Accumulator::new(shape);
        for t in terms {
            if t.xpow.len() != shape.n || t.ypow.len() != shape.ell {
                return Err(AlgebraError::ShapeMismatch {
                    expected: shape,
                    found: format!("monomial with {} x- and {} y-exponents", t.xpow.len(), t.ypow.len()),
                });
            }
            acc.push(t.coeff, &t.xpow, &t.ypow);
        }
        Ok(acc.finish())
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> &[ExpMonomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(ExpMonomial::is_constant)
    }

    /// Constant value when the polynomial has no variables.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [t] if t.is_constant() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(ExpMonomial::degree).max().unwrap_or(0)
    }

    /// True if no texp factor occurs.
    pub fn is_pure_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.ypow.iter().all(|&e| e == 0))
    }

    fn check_shape(&self, o: &ExpPolynomial) {
        assert_eq!(self.shape, o.shape, "texp-polynomials of different shapes");
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.shape);
        }
        ExpPolynomial {
            shape: self.shape,
            terms: self
                .terms
                .iter()
                .map(|t| ExpMonomial {
                    coeff: &t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::from_int(self.shape, 1);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal derivative with respect to `x_i`, using `∂texp(x)/∂x = texp(x)`.
    pub fn partial(&self, i: usize) -> Result<Self, AlgebraError> {
        let shape = self.shape;
        if i >= shape.n {
            return Err(AlgebraError::IndexOutOfRange { index: i, n: shape.n });
        }
        let mut acc = Accumulator::new(shape);
        for t in &self.terms {
            let a = t.xpow[i];
            if a > 0 {
                let mut xpow = t.xpow.clone();
                xpow[i] -= 1;
                acc.push(&t.coeff * BigInt::from(a), &xpow, &t.ypow);
            }
            if i < shape.ell && t.ypow[i] > 0 {
                acc.push(&t.coeff * BigInt::from(t.ypow[i]), &t.xpow, &t.ypow);
            }
        }
        Ok(acc.finish())
    }

    /// Re-expresses the polynomial in a larger shape, mapping old variable
    /// `i` to new variable `map[i]`. Restricted variables must stay
    /// restricted.
    pub fn remap(&self, shape: Shape, map: &[usize]) -> Result<Self, AlgebraError> {
        assert_eq!(map.len(), self.shape.n);
        for (i, &j) in map.iter().enumerate() {
            if j >= shape.n {
                return Err(AlgebraError::IndexOutOfRange { index: j, n: shape.n });
            }
            if i < self.shape.ell && j >= shape.ell {
                return Err(AlgebraError::NotRestricted { index: j, ell: shape.ell });
            }
        }
        let mut acc = Accumulator::new(shape);
        for t in &self.terms {
            let mut xpow = vec![0; shape.n];
            let mut ypow = vec![0; shape.ell];
            for (i, &j) in map.iter().enumerate() {
                xpow[j] += t.xpow[i];
                if i < self.shape.ell {
                    ypow[j] += t.ypow[i];
                }
            }
            acc.push(t.coeff.clone(), &xpow, &ypow);
        }
        Ok(acc.finish())
    }

    /// Embeds into a shape with more (trailing) variables.
    pub fn embed(&self, shape: Shape) -> Result<Self, AlgebraError> {
        if shape.n < self.shape.n || shape.ell < self.shape.ell {
            return Err(AlgebraError::ShapeMismatch {
                expected: shape,
                found: self.shape.to_string(),
            });
        }
        let map: Vec<usize> = (0..self.shape.n).collect();
        self.remap(shape, &map)
    }

    /// Replaces every `texp(x_j)^b` by `x_v^b`.
    pub fn replace_texp_by_var(&self, j: usize, v: usize) -> Result<Self, AlgebraError> {
        let shape = self.shape;
        if j >= shape.ell {
            return Err(AlgebraError::NotRestricted { index: j, ell: shape.ell });
        }
        if v >= shape.n {
            return Err(AlgebraError::IndexOutOfRange { index: v, n: shape.n });
        }
        let mut acc = Accumulator::new(shape);
        for t in &self.terms {
            let mut xpow = t.xpow.clone();
            let mut ypow = t.ypow.clone();
            xpow[v] += ypow[j];
            ypow[j] = 0;
            acc.push(t.coeff.clone(), &xpow, &ypow);
        }
        Ok(acc.finish())
    }

    /// Substitutes `texp(x_j) := 0` for every listed `j`.
    pub fn kill_texp(&self, js: &[usize]) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| js.iter().all(|&j| t.ypow[j] == 0))
            .cloned();
        Self::from_terms(self.shape, terms).expect("same shape")
    }

    fn check_box(&self, b: &IntervalBox) -> Result<(), AlgebraError> {
        if b.dim() != self.shape.n {
            return Err(AlgebraError::ShapeMismatch {
                expected: self.shape,
                found: format!("box of dimension {}", b.dim()),
            });
        }
        Ok(())
    }

    /// Interval enclosure of `F_p` over the box at `prec` bits, with the
    /// restricted-exponential semantics for the first `ℓ` coordinates.
    pub fn evaluate(&self, b: &IntervalBox, prec: u32) -> Result<Interval, AlgebraError> {
        self.check_box(b)?;
        let ys: Vec<Interval> = (0..self.shape.ell)
            .map(|i| texp_enclosure(b.coord(i), prec))
            .collect();
        Ok(self.eval_with(b.coords(), &ys, prec))
    }

    /// Enclosure of `F_p` over `b ∩ U_{ℓ,n}`; `None` if that set is empty.
    pub fn evaluate_on_domain(&self, b: &IntervalBox, prec: u32) -> Result<Option<Interval>, AlgebraError> {
        self.check_box(b)?;
        match domain_texp(b, self.shape.ell, prec) {
            Some(ys) => Ok(Some(self.eval_with(b.coords(), &ys, prec))),
            None => Ok(None),
        }
    }

    /// Evaluation with precomputed texp enclosures.
    pub(crate) fn eval_with(&self, xs: &[Interval], ys: &[Interval], prec: u32) -> Interval {
        let mut cache = PowerCache::new(xs, ys, prec);
        let mut sum = Interval::zero();
        for t in &self.terms {
            let mut v = Interval::from_rational(&t.coeff, prec);
            for (i, &a) in t.xpow.iter().enumerate() {
                if a > 0 {
                    v = v.mul(cache.x(i, a), prec);
                }
            }
            for (i, &b) in t.ypow.iter().enumerate() {
                if b > 0 {
                    v = v.mul(cache.y(i, b), prec);
                }
            }
            sum = sum.add(&v, prec);
        }
        sum
    }

    /// Floating-point evaluation with the restricted semantics.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let ys: Vec<f64> = (0..self.shape.ell)
            .map(|i| if x[i] > -1.0 && x[i] < 1.0 { x[i].exp() } else { 0.0 })
            .collect();
        self.eval_f64_with(x, &ys)
    }

    /// Floating-point evaluation of the smooth extension `texp(x) := e^x`.
    pub fn eval_f64_smooth(&self, x: &[f64]) -> f64 {
        let ys: Vec<f64> = (0..self.shape.ell).map(|i| x[i].exp()).collect();
        self.eval_f64_with(x, &ys)
    }

    fn eval_f64_with(&self, x: &[f64], ys: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coeff.to_f64().unwrap_or(f64::NAN);
                for (i, &a) in t.xpow.iter().enumerate() {
                    v *= x[i].powi(a as i32);
                }
                for (i, &b) in t.ypow.iter().enumerate() {
                    v *= ys[i].powi(b as i32);
                }
                v
            })
            .sum()
    }

    /// Exact value at a rational point, available when every texp factor
    /// that occurs is rational there (argument `0` or outside `(-1, 1)`).
    pub fn eval_rational(&self, x: &[Rational]) -> Option<Rational> {
        assert_eq!(x.len(), self.shape.n);
        let one = Rational::one();
        let mut sum = Rational::zero();
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for (i, &a) in t.xpow.iter().enumerate() {
                if a > 0 {
                    v *= num_traits::pow(x[i].clone(), a as usize);
                }
            }
            for (i, &b) in t.ypow.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                if x[i].abs() >= one {
                    v = Rational::zero();
                } else if !x[i].is_zero() {
                    return None;
                }
            }
            sum += v;
        }
        Some(sum)
    }

    /// Variables that actually occur (as `x_i` or inside `texp(x_i)`).
    pub fn occurring_vars(&self) -> Vec<bool> {
        let mut occ = vec![false; self.shape.n];
        for t in &self.terms {
            for (i, &a) in t.xpow.iter().enumerate() {
                occ[i] |= a > 0;
            }
            for (i, &b) in t.ypow.iter().enumerate() {
                occ[i] |= b > 0;
            }
        }
        occ
    }
}

/// texp enclosures on `b ∩ U_{ℓ,n}` using the continuous extension.
pub(crate) fn domain_texp(b: &IntervalBox, ell: usize, prec: u32) -> Option<Vec<Interval>> {
    (0..ell).map(|i| exp_on_closed_unit(b.coord(i), prec)).collect()
}

struct PowerCache<'a> {
    xs: &'a [Interval],
    ys: &'a [Interval],
    prec: u32,
    xp: Vec<Vec<Option<Interval>>>,
    yp: Vec<Vec<Option<Interval>>>,
}

impl<'a> PowerCache<'a> {
    fn new(xs: &'a [Interval], ys: &'a [Interval], prec: u32) -> Self {
        PowerCache {
            xs,
            ys,
            prec,
            xp: vec![vec![]; xs.len()],
            yp: vec![vec![]; ys.len()],
        }
    }

    fn get(slot: &mut Vec<Option<Interval>>, base: &Interval, k: u32, prec: u32) -> Interval {
        let k = k as usize;
        if slot.len() <= k {
            slot.resize(k + 1, None);
        }
        slot[k].get_or_insert_with(|| base.powi(k as u32, prec)).clone()
    }

    fn x(&mut self, i: usize, k: u32) -> &Interval {
        let v = Self::get(&mut self.xp[i], &self.xs[i], k, self.prec);
        self.xp[i][k as usize] = Some(v);
        self.xp[i][k as usize].as_ref().unwrap()
    }

    fn y(&mut self, i: usize, k: u32) -> &Interval {
        let v = Self::get(&mut self.yp[i], &self.ys[i], k, self.prec);
        self.yp[i][k as usize] = Some(v);
        self.yp[i][k as usize].as_ref().unwrap()
    }
}

impl<'a> Add<&'a ExpPolynomial> for &'a ExpPolynomial {
    type Output = ExpPolynomial;
    fn add(self, o: &ExpPolynomial) -> ExpPolynomial {
        self.check_shape(o);
        let mut acc = Accumulator::new(self.shape);
        for t in self.terms.iter().chain(&o.terms) {
            acc.push(t.coeff.clone(), &t.xpow, &t.ypow);
        }
        acc.finish()
    }
}

impl<'a> Sub<&'a ExpPolynomial> for &'a ExpPolynomial {
    type Output = ExpPolynomial;
    fn sub(self, o: &ExpPolynomial) -> ExpPolynomial {
        self + &(-o)
    }
}

impl Neg for &ExpPolynomial {
    type Output = ExpPolynomial;
    fn neg(self) -> ExpPolynomial {
        self.scale(&-Rational::one())
    }
}

impl<'a> Mul<&'a ExpPolynomial> for &'a ExpPolynomial {
    type Output = ExpPolynomial;
    fn mul(self, o: &ExpPolynomial) -> ExpPolynomial {
        self.check_shape(o);
        let mut acc = Accumulator::new(self.shape);
        let mut xpow = vec![0; self.shape.n];
        let mut ypow = vec![0; self.shape.ell];
        for a in &self.terms {
            for b in &o.terms {
                for i in 0..xpow.len() {
                    xpow[i] = a.xpow[i] + b.xpow[i];
                }
                for i in 0..ypow.len() {
                    ypow[i] = a.ypow[i] + b.ypow[i];
                }
                acc.push(&a.coeff * &b.coeff, &xpow, &ypow);
            }
        }
        acc.finish()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExpPolynomial> for ExpPolynomial {
            type Output = ExpPolynomial;
            fn $m(self, o: ExpPolynomial) -> ExpPolynomial {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ExpPolynomial {
    type Output = ExpPolynomial;
    fn neg(self) -> ExpPolynomial {
        -&self
    }
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExpPolynomial {
    /// Canonical text: `c * x1^a1 * ... * E(x1)^b1 * ...`, terms in
    /// decreasing graded-lex order, unit coefficients omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &a) in t.xpow.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, a)),
                }
            }
            for (i, &b) in t.ypow.iter().enumerate() {
                match b {
                    0 => {}
                    1 => factors.push(format!("E(x{})", i + 1)),
                    _ => factors.push(format!("E(x{})^{}", i + 1, b)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join(" * "))?;
            } else {
                write!(f, "{} * {}", fmt_rational(&mag), factors.join(" * "))?;
            }
        }
        Ok(())
    }
}
