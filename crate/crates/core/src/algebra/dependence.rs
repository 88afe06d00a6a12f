//! Candidate integer relations among enclosed reals, by LLL reduction.
//!
//! A returned relation is only a candidate: it is consistent with the
//! enclosures at the detection tolerance and must be confirmed downstream.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Rational;
use super::AlgebraError;
use crate::enclose::{parse_rational, Dyadic, Interval};

/// `d·a_ℓ = Σ k_i·a_i + g` among the first `ℓ` coordinates of a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceRelation {
    pub d: BigInt,
    pub k: Vec<BigInt>,
    pub g: Rational,
}

impl DependenceRelation {
    pub fn new(d: BigInt, k: Vec<BigInt>, g: Rational) -> Result<Self, AlgebraError> {
        if d.is_zero() {
            return Err(AlgebraError::BadRelation("d must be non-zero".into()));
        }
        Ok(DependenceRelation { d, k, g })
    }

    /// Reads an integer candidate `u` found for `(a_1, ..., a_ℓ, 1)`.
    pub fn from_candidate(u: &[BigInt]) -> Option<Self> {
        let (consts, rest) = u.split_last()?;
        let (ul, ks) = rest.split_last()?;
        if ul.is_zero() {
            return None;
        }
        let sign = if ul.is_negative() { -BigInt::one() } else { BigInt::one() };
        Some(DependenceRelation {
            d: ul * &sign,
            k: ks.iter().map(|x| -x * &sign).collect(),
            g: Rational::from_integer(-consts * &sign),
        })
    }

    pub fn ell(&self) -> usize {
        self.k.len() + 1
    }

    /// Residual `d·a_ℓ − Σ k_i a_i − g` enclosed over a box of the first
    /// `ℓ` coordinates.
    pub fn residual(&self, coords: &[Interval], prec: u32) -> Interval {
        let l = self.k.len();
        let mut r = coords[l].mul(&Interval::from_rational(&Rational::from_integer(self.d.clone()), prec), prec);
        for (ki, ci) in self.k.iter().zip(coords) {
            r = r.sub(&ci.mul_rational(&Rational::from_integer(ki.clone()), prec), prec);
        }
        r.sub(&Interval::from_rational(&self.g, prec), prec)
    }
}

impl fmt::Display for DependenceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.k.iter().map(|k| k.to_string()).collect();
        write!(f, "{};{};{}", self.d, ks.join(","), crate::algebra::fmt_rational(&self.g))
    }
}

impl FromStr for DependenceRelation {
    type Err = AlgebraError;

    /// `d;k1,...,k_{ℓ-1};g`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::BadRelation(format!("expected `d;k1,...;g`, got `{s}`"));
        let parts: Vec<&str> = s.trim().split(';').map(str::trim).collect();
        let [d, ks, g] = parts[..] else {
            return Err(bad());
        };
        let d: BigInt = d.parse().map_err(|_| bad())?;
        let k = if ks.is_empty() {
            vec![]
        } else {
            ks.split(',')
                .map(|t| t.trim().parse::<BigInt>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?
        };
        let g = parse_rational(g).ok_or_else(bad)?;
        DependenceRelation::new(d, k, g)
    }
}

/// Searches for `u ∈ ℤ^m`, `0 < max|u_i| ≤ coeff_bound`, with
/// `|Σ u_i·mid(values_i)|` below the tolerance `2^(8−precision)` (scaled by
/// `‖u‖₁` to absorb the enclosure widths). The first vector of the
/// LLL-reduced basis that qualifies is returned, normalized so that its
/// first non-zero entry is positive.
pub fn integer_dependence(
    values: &[Interval],
    coeff_bound: &BigInt,
    precision: u32,
) -> Result<Option<Vec<BigInt>>, AlgebraError> {
    if coeff_bound < &BigInt::one() {
        return Err(AlgebraError::BadRelation("coeff_bound must be at least 1".into()));
    }
    let shift = precision as i64 - 8;
    let tol = Dyadic::pow2(-shift);
    for (i, v) in values.iter().enumerate() {
        if v.width() > tol {
            return Err(AlgebraError::EnclosureTooWide { index: i, precision });
        }
    }
    let m = values.len();
    if m == 0 {
        return Ok(None);
    }
    let mids: Vec<Dyadic> = values.iter().map(Interval::midpoint).collect();
    let basis: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut row = vec![BigInt::zero(); m + 1];
            row[i] = BigInt::one();
            row[m] = mids[i].mul_pow2(shift).add(&Dyadic::one().half()).floor();
            row
        })
        .collect();
    let reduced = lll(basis);
    let tol_q = tol.to_rational();
    for row in reduced {
        let u = &row[..m];
        if u.iter().all(Zero::is_zero) || u.iter().any(|x| x.abs() > *coeff_bound) {
            continue;
        }
        let dot: BigRational = u
            .iter()
            .zip(&mids)
            .map(|(a, b)| b.to_rational() * a)
            .fold(BigRational::zero(), |s, x| s + x);
        let norm1: BigInt = u.iter().map(|x| x.abs()).sum();
        if dot.abs() >= &tol_q * BigRational::from_integer(norm1) {
            continue;
        }
        let mut u = u.to_vec();
        if u.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            u.iter_mut().for_each(|x| *x = -x.clone());
        }
        let g = u.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_one() && !g.is_zero() {
            u.iter_mut().for_each(|x| *x = &*x / &g);
        }
        return Ok(Some(u));
    }
    Ok(None)
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(BigRational::zero(), |s, x| s + x)
}

/// Exact LLL reduction with `δ = 3/4`.
pub fn lll(mut b: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = b.len();
    if n == 0 {
        return b;
    }
    let delta = BigRational::new(3.into(), 4.into());
    let q = |v: &[BigInt]| v.iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>();
    let gso = |b: &[Vec<BigInt>]| {
        let mut bs: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut norms = Vec::with_capacity(n);
        for i in 0..n {
            let bi = q(&b[i]);
            let mut v = bi.clone();
            for j in 0..i {
                mu[i][j] = if norms[j] == BigRational::zero() {
                    BigRational::zero()
                } else {
                    dot(&bi, &bs[j]) / &norms[j]
                };
                for (x, y) in v.iter_mut().zip(&bs[j]) {
                    *x -= &mu[i][j] * y;
                }
            }
            norms.push(dot(&v, &v));
            bs.push(v);
        }
        (mu, norms)
    };
    let (mut mu, mut norms) = gso(&b);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if !r.is_zero() {
                let r = r.to_integer();
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
                let rq = BigRational::from_integer(r);
                for i in 0..=j {
                    let t = if i == j { BigRational::one() } else { mu[j][i].clone() };
                    mu[k][i] -= &rq * t;
                }
            }
        }
        let lhs = &norms[k] + &mu[k][k - 1] * &mu[k][k - 1] * &norms[k - 1];
        if lhs >= &delta * &norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let (m2, n2) = gso(&b);
            mu = m2;
            norms = n2;
            k = k.max(2) - 1;
        }
    }
    b
}
