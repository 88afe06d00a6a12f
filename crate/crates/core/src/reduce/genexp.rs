//! Generalized exponential polynomials `Σ c·X^a·Exp(λ·X + s)` with
//! rational `λ` and `s`, evaluated through the finite extension `Exp`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{fmt_rational, ExpPolynomial, KhovanskiiSystem, Rational, Shape};
use crate::certify::{IMatrix, SquareSystem};
use crate::enclose::{exp_fin_enclosure, Dyadic, Interval, IntervalBox};

/// Arguments beyond this magnitude are refused during evaluation.
const MAX_EXP_ARGUMENT: i64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenExpMonomial {
    pub coeff: Rational,
    pub xpow: Vec<u32>,
    pub lambda: Vec<Rational>,
    pub shift: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    xpow: Vec<u32>,
    lambda: Vec<Rational>,
    shift: Rational,
}

/// Canonical: keys in decreasing order, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenExpPolynomial {
    n: usize,
    terms: Vec<GenExpMonomial>,
}

impl GenExpPolynomial {
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = GenExpMonomial>) -> Self {
        let mut map: BTreeMap<Key, Rational> = BTreeMap::new();
        for t in terms {
            assert_eq!(t.xpow.len(), n);
            assert_eq!(t.lambda.len(), n);
            if t.coeff.is_zero() {
                continue;
            }
            let key = Key {
                xpow: t.xpow,
                lambda: t.lambda,
                shift: t.shift,
            };
            *map.entry(key).or_insert_with(Rational::zero) += t.coeff;
        }
        let terms = map
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, coeff)| GenExpMonomial {
                coeff,
                xpow: k.xpow,
                lambda: k.lambda,
                shift: k.shift,
            })
            .collect();
        GenExpPolynomial { n, terms }
    }

    pub fn zero(n: usize) -> Self {
        GenExpPolynomial { n, terms: Vec::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::from_terms(n, [Self::unit(n, c)])
    }

    /// `c·X_j`.
    pub fn var(n: usize, j: usize, c: Rational) -> Self {
        let mut t = Self::unit(n, c);
        t.xpow[j] = 1;
        Self::from_terms(n, [t])
    }

    /// `Exp(λ·X + s)`.
    pub fn exp_linear(lambda: Vec<Rational>, shift: Rational) -> Self {
        let n = lambda.len();
        Self::from_terms(
            n,
            [GenExpMonomial {
                coeff: Rational::one(),
                xpow: vec![0; n],
                lambda,
                shift,
            }],
        )
    }

    fn unit(n: usize, coeff: Rational) -> GenExpMonomial {
        GenExpMonomial {
            coeff,
            xpow: vec![0; n],
            lambda: vec![Rational::zero(); n],
            shift: Rational::zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Self::from_terms(self.n, self.terms.iter().chain(&o.terms).cloned())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let mut out = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                out.push(GenExpMonomial {
                    coeff: &a.coeff * &b.coeff,
                    xpow: a.xpow.iter().zip(&b.xpow).map(|(x, y)| x + y).collect(),
                    lambda: a.lambda.iter().zip(&b.lambda).map(|(x, y)| x + y).collect(),
                    shift: &a.shift + &b.shift,
                });
            }
        }
        Self::from_terms(self.n, out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.n, Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn terms(&self) -> &[GenExpMonomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies by `Exp(μ·X)`.
    pub fn mul_exp(&self, mu: &[Rational]) -> Self {
        let terms = self.terms.iter().map(|t| GenExpMonomial {
            lambda: t.lambda.iter().zip(mu).map(|(a, b)| a + b).collect(),
            ..t.clone()
        });
        Self::from_terms(self.n, terms)
    }

    /// `∂/∂X_j`, using `∂Exp(λ·X + s)/∂X_j = λ_j·Exp(λ·X + s)`.
    pub fn partial(&self, j: usize) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            let a = t.xpow[j];
            if a > 0 {
                let mut xpow = t.xpow.clone();
                xpow[j] -= 1;
                out.push(GenExpMonomial {
                    coeff: &t.coeff * Rational::from_integer(a.into()),
                    xpow,
                    ..t.clone()
                });
            }
            if !t.lambda[j].is_zero() {
                out.push(GenExpMonomial {
                    coeff: &t.coeff * &t.lambda[j],
                    ..t.clone()
                });
            }
        }
        Self::from_terms(self.n, out)
    }

    /// Enclosure over a box; `None` if an exponential argument is too
    /// large to be evaluated.
    pub fn evaluate(&self, b: &IntervalBox, prec: u32) -> Option<Interval> {
        assert_eq!(b.dim(), self.n);
        let limit = Dyadic::from_i64(MAX_EXP_ARGUMENT);
        let mut sum = Interval::zero();
        for t in &self.terms {
            let mut v = Interval::from_rational(&t.coeff, prec);
            for (i, &a) in t.xpow.iter().enumerate() {
                if a > 0 {
                    v = v.mul(&b.coord(i).powi(a, prec), prec);
                }
            }
            if t.lambda.iter().any(|l| !l.is_zero()) || !t.shift.is_zero() {
                let mut arg = Interval::from_rational(&t.shift, prec);
                for (i, l) in t.lambda.iter().enumerate() {
                    if !l.is_zero() {
                        arg = arg.add(&b.coord(i).mul_rational(l, prec), prec);
                    }
                }
                if arg.mag() > limit {
                    return None;
                }
                v = v.mul(&exp_fin_enclosure(&arg, prec), prec);
            }
            sum = sum.add(&v, prec);
        }
        Some(sum)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coeff.to_f64().unwrap_or(f64::NAN);
                for (i, &a) in t.xpow.iter().enumerate() {
                    v *= x[i].powi(a as i32);
                }
                let arg: f64 = t.shift.to_f64().unwrap_or(0.0)
                    + t.lambda
                        .iter()
                        .zip(x)
                        .map(|(l, xi)| l.to_f64().unwrap_or(0.0) * xi)
                        .sum::<f64>();
                v * arg.exp()
            })
            .sum()
    }

    /// Plain texp-polynomial form when every exponential factor is
    /// `Π texp(X_j)^{λ_j}` with non-negative integer `λ_j` on the first
    /// `ell` coordinates and no shift.
    pub fn to_plain(&self, shape: Shape) -> Option<ExpPolynomial> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if !t.shift.is_zero() {
                    return None;
                }
                let mut ypow = vec![0u32; shape.ell()];
                for (j, l) in t.lambda.iter().enumerate() {
                    if l.is_zero() {
                        continue;
                    }
                    if j >= shape.ell() || !l.is_integer() || l.is_negative() {
                        return None;
                    }
                    ypow[j] = l.to_integer().to_u32()?;
                }
                Some(crate::algebra::ExpMonomial {
                    coeff: t.coeff.clone(),
                    xpow: t.xpow.clone(),
                    ypow,
                })
            })
            .collect::<Option<Vec<_>>>()?;
        ExpPolynomial::from_terms(shape, terms).ok()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct T {
            coeff: String,
            xpow: Vec<u32>,
            lambda: Vec<String>,
            shift: String,
        }
        let ts: Vec<T> = self
            .terms
            .iter()
            .map(|t| T {
                coeff: fmt_rational(&t.coeff),
                xpow: t.xpow.clone(),
                lambda: t.lambda.iter().map(fmt_rational).collect(),
                shift: fmt_rational(&t.shift),
            })
            .collect();
        serde_json::to_value(ts).expect("terms serialize")
    }
}

fn linear_form(lambda: &[Rational], shift: &Rational) -> String {
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (j, l) in lambda.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let mag = l.abs();
        let body = if mag.is_one() {
            format!("X{}", j + 1)
        } else {
            format!("{} * X{}", fmt_rational(&mag), j + 1)
        };
        parts.push((l.is_negative(), body));
    }
    if !shift.is_zero() || parts.is_empty() {
        parts.push((shift.is_negative(), fmt_rational(&shift.abs())));
    }
    let mut s = String::new();
    for (i, (neg, body)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(body);
    }
    s
}

impl fmt::Display for GenExpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
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
                    1 => factors.push(format!("X{}", i + 1)),
                    _ => factors.push(format!("X{}^{}", i + 1, a)),
                }
            }
            if t.lambda.iter().any(|l| !l.is_zero()) || !t.shift.is_zero() {
                factors.push(format!("Exp({})", linear_form(&t.lambda, &t.shift)));
            }
            let mag = t.coeff.abs();
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

/// A square system of generalized exponential polynomials; the first
/// `restricted` coordinates are kept inside `(-1, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenExpSystem {
    restricted: usize,
    equations: Vec<GenExpPolynomial>,
    jacobian: Vec<Vec<GenExpPolynomial>>,
}

impl GenExpSystem {
    pub fn new(restricted: usize, equations: Vec<GenExpPolynomial>) -> Self {
        let n = equations.len();
        assert!(equations.iter().all(|e| e.n() == n), "square system");
        let jacobian = equations.iter().map(|e| (0..n).map(|j| e.partial(j)).collect()).collect();
        GenExpSystem {
            restricted,
            equations,
            jacobian,
        }
    }

    pub fn equations(&self) -> &[GenExpPolynomial] {
        &self.equations
    }

    pub fn jacobian(&self) -> &[Vec<GenExpPolynomial>] {
        &self.jacobian
    }
}

impl SquareSystem for GenExpSystem {
    fn dim(&self) -> usize {
        self.equations.len()
    }

    fn restricted(&self) -> usize {
        self.restricted
    }

    fn eval_domain(&self, b: &IntervalBox, prec: u32) -> Option<Vec<Interval>> {
        self.equations.iter().map(|e| e.evaluate(b, prec)).collect()
    }

    fn jacobian_domain(&self, b: &IntervalBox, prec: u32) -> Option<IMatrix> {
        self.jacobian
            .iter()
            .map(|row| row.iter().map(|e| e.evaluate(b, prec)).collect())
            .collect()
    }

    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.equations.iter().map(|e| e.eval_f64(x)).collect()
    }

    fn jacobian_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian
            .iter()
            .map(|row| row.iter().map(|e| e.eval_f64(x)).collect())
            .collect()
    }

    fn canonical_text(&self) -> String {
        let mut s = format!("genexp: {} {}\n", self.restricted, self.equations.len());
        for e in &self.equations {
            s.push_str(&format!("{e}\n"));
        }
        s
    }
}

/// Lifts a plain system into generalized form (`texp(x_j)^b = Exp(b·x_j)`
/// inside the domain).
pub fn from_plain(sys: &KhovanskiiSystem) -> GenExpSystem {
    let n = sys.n();
    let eqs = sys
        .equations()
        .iter()
        .map(|p| {
            GenExpPolynomial::from_terms(
                n,
                p.terms().iter().map(|t| {
                    let mut lambda = vec![Rational::zero(); n];
                    for (j, &b) in t.ypow.iter().enumerate() {
                        lambda[j] = Rational::from_integer(b.into());
                    }
                    GenExpMonomial {
                        coeff: t.coeff.clone(),
                        xpow: t.xpow.clone(),
                        lambda,
                        shift: Rational::zero(),
                    }
                }),
            )
        })
        .collect();
    GenExpSystem::new(sys.ell(), eqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclose::parse_rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn derivative_and_text() {
        // 3 * X1 * Exp(2 X1 - 1/2)
        let p = GenExpPolynomial::from_terms(
            1,
            [GenExpMonomial {
                coeff: q(3, 1),
                xpow: vec![1],
                lambda: vec![q(2, 1)],
                shift: q(-1, 2),
            }],
        );
        assert_eq!(p.to_string(), "3 * X1 * Exp(2 * X1 - 1/2)");
        assert_eq!(p.partial(0).to_string(), "6 * X1 * Exp(2 * X1 - 1/2) + 3 * Exp(2 * X1 - 1/2)");
    }

    #[test]
    fn evaluation_uses_finite_exp() {
        let p = GenExpPolynomial::from_terms(
            1,
            [GenExpMonomial {
                coeff: q(1, 1),
                xpow: vec![0],
                lambda: vec![q(2, 1)],
                shift: q(0, 1),
            }],
        );
        let v = p.evaluate(&IntervalBox::point(&[Dyadic::one()]), 128).unwrap();
        assert!(v.contains_rational(&parse_rational("7.3890560989306502272304274605750078131803155705518").unwrap()));
        let far = IntervalBox::point(&[Dyadic::from_i64(1 << 21)]);
        assert!(p.evaluate(&far, 64).is_none());
    }

    #[test]
    fn plain_round_trip() {
        let sys = KhovanskiiSystem::parse("E(x1)^2 - x1 * E(x1) + 1").unwrap();
        let g = from_plain(&sys);
        let back = g.equations()[0].to_plain(sys.shape()).unwrap();
        assert_eq!(back, sys.equations()[0]);
        let shifted = g.equations()[0].mul_exp(&[q(-1, 1)]);
        assert!(shifted.to_plain(sys.shape()).is_none());
    }
}
