//! Closed intervals with dyadic endpoints and outward-rounded arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{Dyadic, Round};

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn try_new(lo: Dyadic, hi: Dyadic) -> Option<Self> {
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn point(x: Dyadic) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::one())
    }

    pub fn from_i64(v: i64) -> Self {
        Self::point(Dyadic::from_i64(v))
    }

    pub fn from_i64_pair(lo: i64, hi: i64) -> Self {
        Self::new(Dyadic::from_i64(lo), Dyadic::from_i64(hi))
    }

    /// Smallest enclosure of `q` at `prec` bits (a point when `q` is dyadic).
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        match Dyadic::from_rational_exact(q) {
            Some(d) if d.bits() <= prec as u64 => Self::point(d),
            _ => Interval {
                lo: Dyadic::from_rational(q, prec, Round::Down),
                hi: Dyadic::from_rational(q, prec, Round::Up),
            },
        }
    }

    /// Outward enclosure of the rational interval `[a, b]`.
    pub fn from_rationals(a: &BigRational, b: &BigRational, prec: u32) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Interval::new(
            Dyadic::from_rational(a, prec, Round::Down),
            Dyadic::from_rational(b, prec, Round::Up),
        )
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    fn rounded(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
        }
    }

    pub fn round(&self, prec: u32) -> Self {
        Self::rounded(self.lo.clone(), self.hi.clone(), prec)
    }

    pub fn add(&self, o: &Interval, prec: u32) -> Self {
        Self::rounded(self.lo.add(&o.lo), self.hi.add(&o.hi), prec)
    }

    pub fn sub(&self, o: &Interval, prec: u32) -> Self {
        Self::rounded(self.lo.sub(&o.hi), self.hi.sub(&o.lo), prec)
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn mul(&self, o: &Interval, prec: u32) -> Self {
        if self.lo.signum() >= 0 && o.lo.signum() >= 0 {
            return Self::rounded(self.lo.mul(&o.lo), self.hi.mul(&o.hi), prec);
        }
        let c = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Self::rounded(lo, hi, prec)
    }

    pub fn mul_dyadic(&self, d: &Dyadic, prec: u32) -> Self {
        let (a, b) = (self.lo.mul(d), self.hi.mul(d));
        if d.is_negative() {
            Self::rounded(b, a, prec)
        } else {
            Self::rounded(a, b, prec)
        }
    }

    pub fn mul_rational(&self, q: &BigRational, prec: u32) -> Self {
        self.mul(&Interval::from_rational(q, prec), prec)
    }

    pub fn sqr(&self, prec: u32) -> Self {
        self.powi(2, prec)
    }

    /// Integer power; even powers of intervals straddling zero start at zero.
    pub fn powi(&self, k: u32, prec: u32) -> Self {
        match k {
            0 => return Interval::one(),
            1 => return self.clone(),
            _ => {}
        }
        let a = self.lo.abs();
        let b = self.hi.abs();
        let p = |x: &Dyadic, dir: Round| pow_dyadic(x, k, prec, dir);
        if k % 2 == 1 {
            // odd powers are monotone
            let lo = if self.lo.is_negative() {
                p(&a, Round::Up).neg()
            } else {
                p(&self.lo, Round::Down)
            };
            let hi = if self.hi.is_negative() {
                p(&b, Round::Down).neg()
            } else {
                p(&self.hi, Round::Up)
            };
            Interval { lo, hi }
        } else if self.lo.signum() >= 0 {
            Interval {
                lo: p(&self.lo, Round::Down),
                hi: p(&self.hi, Round::Up),
            }
        } else if self.hi.signum() <= 0 {
            Interval {
                lo: p(&b, Round::Down),
                hi: p(&a, Round::Up),
            }
        } else {
            Interval {
                lo: Dyadic::zero(),
                hi: p(a.greater(&b), Round::Up),
            }
        }
    }

    /// Division by a non-zero integer.
    pub fn div_int(&self, n: &BigInt, prec: u32) -> Self {
        assert!(!n.is_zero(), "division by zero");
        let d = Dyadic::from_bigint(n.clone());
        let (a, b) = (
            self.lo.div(&d, prec, Round::Down).unwrap(),
            self.hi.div(&d, prec, Round::Up).unwrap(),
        );
        if n.is_negative() {
            Interval {
                lo: self.hi.div(&d, prec, Round::Down).unwrap(),
                hi: self.lo.div(&d, prec, Round::Up).unwrap(),
            }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    /// Interval quotient; `None` when the divisor contains zero.
    pub fn div(&self, o: &Interval, prec: u32) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let q = |x: &Dyadic, y: &Dyadic, dir| x.div(y, prec, dir).unwrap();
        let cands = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = cands.iter().map(|(x, y)| q(x, y, Round::Down)).min().unwrap();
        let hi = cands.iter().map(|(x, y)| q(x, y, Round::Up)).max().unwrap();
        Some(Interval { lo, hi })
    }

    pub fn hull(&self, o: &Interval) -> Self {
        Interval {
            lo: self.lo.lesser(&o.lo).clone(),
            hi: self.hi.greater(&o.hi).clone(),
        }
    }

    pub fn intersect(&self, o: &Interval) -> Option<Self> {
        let lo = self.lo.greater(&o.lo).clone();
        let hi = self.hi.lesser(&o.hi).clone();
        Interval::try_new(lo, hi)
    }

    /// Exact midpoint.
    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).half()
    }

    /// Exact width.
    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// Widen both ends by `delta >= 0`, exactly.
    pub fn inflate(&self, delta: &Dyadic) -> Self {
        Interval {
            lo: self.lo.sub(delta),
            hi: self.hi.add(delta),
        }
    }

    /// Largest absolute value.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().greater(&self.hi.abs()).clone()
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else {
            self.lo.abs().lesser(&self.hi.abs()).clone()
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            Interval {
                lo: Dyadic::zero(),
                hi: self.mag(),
            }
        }
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    pub fn is_subset(&self, o: &Interval) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }

    /// `self` lies in the open interior of `o`.
    pub fn is_interior_subset(&self, o: &Interval) -> bool {
        o.lo < self.lo && self.hi < o.hi
    }

    pub fn overlaps(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }
}

/// `x^k` rounded in the given direction; `x` must be non-negative for
/// directed results to be meaningful.
fn pow_dyadic(x: &Dyadic, k: u32, prec: u32, dir: Round) -> Dyadic {
    let mut acc = Dyadic::one();
    let mut base = x.clone();
    let mut e = k;
    // guard bits absorb the roundings of the square-and-multiply chain
    let wp = prec + 2 * (32 - k.leading_zeros()) + 4;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base).round(wp, dir);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base).round(wp, dir);
        }
    }
    acc.round(prec, dir)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lo.to_string(), self.hi.to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let lo: Dyadic = a.parse().map_err(serde::de::Error::custom)?;
        let hi: Dyadic = b.parse().map_err(serde::de::Error::custom)?;
        Interval::try_new(lo, hi).ok_or_else(|| serde::de::Error::custom("interval endpoints out of order"))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::from_i64_pair(a, b)
    }

    #[test]
    fn add_and_mul_examples() {
        assert_eq!(iv(1, 2).add(&iv(3, 4), 64), iv(4, 6));
        assert_eq!(iv(-1, 2).mul(&iv(3, 4), 64), iv(-4, 8));
    }

    #[test]
    fn even_power_tightening() {
        assert_eq!(iv(-2, 3).powi(2, 64), iv(0, 9));
        assert_eq!(iv(-3, -2).powi(2, 64), iv(4, 9));
        assert_eq!(iv(-2, 3).powi(3, 64), iv(-8, 27));
    }

    #[test]
    fn midpoint_and_width_exact() {
        let x = iv(1, 2);
        assert_eq!(x.midpoint(), "3*2^-1".parse().unwrap());
        assert_eq!(x.width(), Dyadic::one());
    }

    #[test]
    fn rational_enclosure_contains_value() {
        let q = BigRational::new(BigInt::from(2), BigInt::from(3));
        let x = Interval::from_rational(&q, 30);
        assert!(x.contains_rational(&q));
        assert!(!x.is_point());
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert!(Interval::from_rational(&half, 30).is_point());
    }

    #[test]
    fn division_requires_nonzero_divisor() {
        assert!(iv(1, 2).div(&iv(-1, 1), 64).is_none());
        let q = iv(1, 2).div(&iv(2, 4), 64).unwrap();
        assert_eq!(q, Interval::new("1*2^-2".parse().unwrap(), Dyadic::one()));
    }

    #[test]
    fn json_form() {
        let x = Interval::new("3*2^-2".parse().unwrap(), Dyadic::one());
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"["3*2^-2","1*2^0"]"#);
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
