//! Arbitrary-precision dyadic rationals `m·2^e`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for operations that cannot be carried out exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// A dyadic rational `mantissa · 2^exponent`, kept normalized so that the
/// mantissa is odd (or zero, with exponent zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid dyadic literal `{0}`")]
pub struct DyadicParseError(pub String);

fn floor_shift(m: &BigInt, shift: u64) -> BigInt {
    m.div_floor(&(BigInt::one() << shift))
}

fn ceil_shift(m: &BigInt, shift: u64) -> BigInt {
    -floor_shift(&-m, shift)
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mantissa, exponent }
        } else {
            Dyadic {
                mantissa: mantissa >> tz,
                exponent: exponent + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: e,
        }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | (1u64 << 52)) as i64, raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(sign * m), e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Position of the leading bit: `2^msb <= |self| < 2^(msb+1)`.
    pub fn msb(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exponent + self.bits() as i64 - 1)
        }
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        if self.is_zero() {
            return (BigInt::zero(), other.mantissa.clone(), other.exponent);
        }
        if other.is_zero() {
            return (self.mantissa.clone(), BigInt::zero(), self.exponent);
        }
        match self.exponent.cmp(&other.exponent) {
            Ordering::Equal => (self.mantissa.clone(), other.mantissa.clone(), self.exponent),
            Ordering::Greater => {
                let s = (self.exponent - other.exponent) as u64;
                (&self.mantissa << s, other.mantissa.clone(), other.exponent)
            }
            Ordering::Less => {
                let s = (other.exponent - self.exponent) as u64;
                (self.mantissa.clone(), &other.mantissa << s, self.exponent)
            }
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a - b, e)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exponent: self.exponent + other.exponent,
        }
    }

    /// Multiplication by `2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn half(&self) -> Dyadic {
        self.mul_pow2(-1)
    }

    /// Round to at most `prec` significant bits.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let m = match dir {
            Round::Down => floor_shift(&self.mantissa, shift),
            Round::Up => ceil_shift(&self.mantissa, shift),
            Round::Nearest => {
                let half = BigInt::one() << (shift - 1);
                floor_shift(&(&self.mantissa + half), shift)
            }
        };
        Dyadic::new(m, self.exponent + shift as i64)
    }

    /// Round so that the result is a multiple of `2^e` (absolute grid).
    pub fn round_to_grid(&self, e: i64, dir: Round) -> Dyadic {
        if self.is_zero() || self.exponent >= e {
            return self.clone();
        }
        let shift = (e - self.exponent) as u64;
        let m = match dir {
            Round::Down => floor_shift(&self.mantissa, shift),
            Round::Up => ceil_shift(&self.mantissa, shift),
            Round::Nearest => floor_shift(&(&self.mantissa + (BigInt::one() << (shift - 1))), shift),
        };
        Dyadic::new(m, e)
    }

    /// Quotient `self / other` rounded to `prec` significant bits.
    /// Returns `None` when `other` is zero.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Option<Dyadic> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Dyadic::zero());
        }
        let (mut a, mut b) = (self.mantissa.clone(), other.mantissa.clone());
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        let extra = (prec as i64 + 2 + b.bits() as i64 - a.bits() as i64).max(0) as u64;
        let num = a << extra;
        let exp = self.exponent - other.exponent - extra as i64;
        let (q, r) = num.div_mod_floor(&b);
        let q = match dir {
            Round::Down => q,
            Round::Up => {
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            }
            Round::Nearest => {
                if (&r << 1u32) >= b {
                    q + 1
                } else {
                    q
                }
            }
        };
        // the quotient carries at least prec+2 bits; rounding again in the
        // same direction keeps the bound directed
        Some(Dyadic::new(q, exp).round(prec, dir))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as u64,
            )
        }
    }

    /// Directed rounding of a rational to `prec` significant bits.
    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let num = Dyadic::from_bigint(q.numer().clone());
        let den = Dyadic::from_bigint(q.denom().clone());
        if q.denom().is_one() {
            return num.round(prec, dir);
        }
        num.div(&den, prec, dir).expect("denominator is non-zero")
    }

    /// Exact conversion if the rational has a power-of-two denominator.
    pub fn from_rational_exact(q: &BigRational) -> Option<Dyadic> {
        let den = q.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz).is_one() {
            Some(Dyadic::new(q.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as u64
        } else {
            floor_shift(&self.mantissa, (-self.exponent) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            (
                (&self.mantissa >> s).to_i64().unwrap_or(0),
                self.exponent + s as i64,
            )
        } else {
            (self.mantissa.to_i64().unwrap_or(0), self.exponent)
        };
        let e = e.clamp(-2000, 2000) as i32;
        // split the scaling so that subnormal intermediate values are avoided
        let half = e / 2;
        (m as f64) * 2f64.powi(half) * 2f64.powi(e - half)
    }

    pub fn lesser<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn greater<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same sign: compare leading-bit positions first to avoid huge shifts
        let (ma, mb) = (self.msb().unwrap(), other.msb().unwrap());
        if ma != mb {
            let o = ma.cmp(&mb);
            return if sa > 0 { o } else { o.reverse() };
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    /// Serialized as `mantissa*2^exponent`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl FromStr for Dyadic {
    type Err = DyadicParseError;

    /// Accepts `m*2^e`, plain integers, and finite binary-exact decimals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || DyadicParseError(s.to_string());
        if let Some((m, e)) = t.split_once("*2^") {
            let m: BigInt = m.trim().parse().map_err(|_| err())?;
            let e: i64 = e.trim().parse().map_err(|_| err())?;
            return Ok(Dyadic::new(m, e));
        }
        let q = parse_rational(t).ok_or_else(err)?;
        Dyadic::from_rational_exact(&q).ok_or_else(err)
    }
}

/// Parses `n`, `n/d`, decimal `a.b` and the dyadic form `m*2^e` into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((m, e)) = t.split_once("*2^") {
        let m: BigInt = m.trim().parse().ok()?;
        let e: i64 = e.trim().parse().ok()?;
        return Some(Dyadic::new(m, e).to_rational());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (mant, exp10) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp10 - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn normalizes_mantissa() {
        let x = Dyadic::new(BigInt::from(12), 0);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 2);
        assert_eq!(Dyadic::new(BigInt::zero(), 7), Dyadic::zero());
    }

    #[test]
    fn ordering_mixed_exponents() {
        assert!(d("0.5") < d("0.75"));
        assert!(d("-0.5") > d("-0.75"));
        assert!(d("-1") < d("0"));
        assert!(d("1024") > d("0.001953125"));
    }

    #[test]
    fn directed_rounding_brackets_value() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let lo = Dyadic::from_rational(&third, 53, Round::Down);
        let hi = Dyadic::from_rational(&third, 53, Round::Up);
        assert!(lo.to_rational() < third && third < hi.to_rational());
        assert!(hi.sub(&lo) <= Dyadic::pow2(-53));
        let neg = -third.clone();
        let lo = Dyadic::from_rational(&neg, 20, Round::Down);
        assert!(lo.to_rational() < neg);
    }

    #[test]
    fn text_round_trip() {
        let x = Dyadic::new(BigInt::from(-5), -3);
        assert_eq!(x.to_string(), "-5*2^-3");
        assert_eq!(d("-5*2^-3"), x);
        assert_eq!(d("-0.625"), x);
        assert!("0.1".parse::<Dyadic>().is_err());
    }

    #[test]
    fn division_directed() {
        let one = Dyadic::one();
        let three = Dyadic::from_i64(3);
        let lo = one.div(&three, 40, Round::Down).unwrap();
        let hi = one.div(&three, 40, Round::Up).unwrap();
        assert!(lo < hi);
        assert!(lo.mul(&three) < one && hi.mul(&three) > one);
        assert!(one.div(&Dyadic::zero(), 10, Round::Up).is_none());
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(Dyadic::from_f64(0.75).unwrap(), d("3*2^-2"));
        assert_eq!(d("-3*2^-2").to_f64(), -0.75);
        assert_eq!(Dyadic::from_f64(1e-310).unwrap().to_f64(), 1e-310);
    }
}
