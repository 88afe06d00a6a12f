//! Certified enclosures of the restricted exponential and of `Exp` on
//! bounded arguments.
//!
//! On `[-1, 1]` the exponential is bracketed by the truncated series
//! `Σ_{k<m} x^k/k!` together with the Lagrange remainder `e^ξ·|x|^m/m!`,
//! where `e^ξ < 3`. Outside the open interval `(-1, 1)` the restricted
//! exponential is zero.

use num_bigint::BigInt;
use num_traits::One;

use super::dyadic::{Dyadic, Round};
use super::interval::Interval;

/// Smallest `m` with `3/m! < 2^-(prec+2)`.
pub fn series_order(prec: u32) -> u32 {
    let target = prec as f64 + 2.0 + 3f64.log2();
    let mut acc = 0.0f64;
    let mut m = 1u32;
    loop {
        acc += (m as f64).log2();
        // a small slack covers accumulated floating error in the log sum
        if acc > target + 1e-6 * m as f64 {
            return m;
        }
        m += 1;
    }
}

/// Enclosure of `e^x` for a dyadic `|x| <= 1`.
fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::one();
    }
    debug_assert!(x.abs() <= Dyadic::one());
    let m = series_order(prec);
    let wp = prec + 16 + 2 * (32 - m.leading_zeros());
    let mut term = Interval::one();
    let mut sum = Interval::one();
    for k in 1..m {
        term = term.mul_dyadic(x, wp).div_int(&BigInt::from(k), wp);
        sum = sum.add(&term, wp);
    }
    let tail = term.mul_dyadic(x, wp).div_int(&BigInt::from(m), wp);
    let rem = tail.mag().mul(&Dyadic::from_i64(3)).round(wp, Round::Up);
    Interval::new(
        sum.lo().sub(&rem).round(prec, Round::Down),
        sum.hi().add(&rem).round(prec, Round::Up),
    )
}

/// Enclosure of `e^ξ` for all `ξ ∈ x`, where `x ⊆ [-1, 1]`.
pub(crate) fn exp_unit_enclosure(x: &Interval, prec: u32) -> Interval {
    let lo = exp_point(x.lo(), prec);
    if x.is_point() {
        return lo;
    }
    let hi = exp_point(x.hi(), prec);
    Interval::new(lo.lo().clone(), hi.hi().clone())
}

fn minus_one() -> Dyadic {
    Dyadic::from_i64(-1)
}

/// Enclosure of the continuous extension `e^ξ` over `x ∩ [-1, 1]`; `None`
/// when the intersection is empty. Used when only points of the open
/// domain `(-1, 1)` matter.
pub fn exp_on_closed_unit(x: &Interval, prec: u32) -> Option<Interval> {
    let unit = Interval::new(minus_one(), Dyadic::one());
    x.intersect(&unit).map(|c| exp_unit_enclosure(&c, prec))
}

/// Enclosure of `texp(ξ)` for every real `ξ ∈ x`.
pub fn texp_enclosure(x: &Interval, prec: u32) -> Interval {
    let one = Dyadic::one();
    let m1 = minus_one();
    if x.hi() <= &m1 || x.lo() >= &one {
        return Interval::zero();
    }
    let inside = Interval::new(x.lo().greater(&m1).clone(), x.hi().lesser(&one).clone());
    let e = exp_unit_enclosure(&inside, prec);
    if x.lo() > &m1 && x.hi() < &one {
        e
    } else {
        // texp jumps to 0 at ±1 and beyond
        e.hull(&Interval::zero())
    }
}

/// Least integer `n` with `|x| ⊂ (-n, n)`.
pub fn exp_fin_scale(x: &Interval) -> BigInt {
    x.mag().floor() + BigInt::one()
}

/// Enclosure of `Exp(ξ) = texp(ξ/n)^n` for every `ξ ∈ x`; always strictly
/// positive.
pub fn exp_fin_enclosure(x: &Interval, prec: u32) -> Interval {
    let n = exp_fin_scale(x);
    if n.is_one() {
        return exp_unit_enclosure(x, prec);
    }
    let guard = n.bits() as u32 + 8;
    let wp = prec + guard;
    let unit = Interval::new(minus_one(), Dyadic::one());
    let scaled = x
        .div_int(&n, wp)
        .intersect(&unit)
        .expect("x/n lies in (-1, 1)");
    let base = exp_unit_enclosure(&scaled, wp);
    let k: u32 = n.try_into().expect("exponent argument too large");
    base.powi(k, wp).round(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn point(n: i64, d: i64) -> Interval {
        Interval::from_rational(&q(n, d), 200)
    }

    fn dec(s: &str) -> BigRational {
        crate::enclose::dyadic::parse_rational(s).unwrap()
    }

    #[test]
    fn order_is_minimal() {
        let m = series_order(64);
        // 3/m! < 2^-66 but not for m-1
        let fact = |k: u32| (1..=k).fold(BigInt::one(), |a, i| a * i);
        let bound = BigInt::from(3) << 66u32;
        assert!(fact(m) > bound);
        assert!(fact(m - 1) <= bound);
    }

    #[test]
    fn texp_at_zero_is_exactly_one() {
        assert_eq!(texp_enclosure(&Interval::zero(), 64), Interval::one());
    }

    #[test]
    fn texp_vanishes_outside_unit_interval() {
        assert_eq!(texp_enclosure(&Interval::from_i64_pair(2, 3), 64), Interval::zero());
        assert_eq!(texp_enclosure(&Interval::from_i64(1), 64), Interval::zero());
        assert_eq!(texp_enclosure(&Interval::from_i64(-1), 64), Interval::zero());
    }

    #[test]
    fn texp_at_minus_half() {
        let e = texp_enclosure(&point(-1, 2), 128);
        assert!(e.contains_rational(&dec("0.60653065971263342360379953499118045344191813548719")));
        assert!(e.width() < Dyadic::pow2(-120));
    }

    #[test]
    fn straddling_one_hulls_zero() {
        let x = Interval::from_rationals(&q(9, 10), &q(11, 10), 64);
        let e = texp_enclosure(&x, 64);
        assert_eq!(e.lo(), &Dyadic::zero());
        assert!(e.hi().to_rational() <= dec("2.7182819"));
        assert!(e.hi().to_rational() >= dec("2.7182818"));
    }

    #[test]
    fn exp_fin_examples() {
        assert_eq!(exp_fin_enclosure(&Interval::zero(), 64), Interval::one());
        let e2 = exp_fin_enclosure(&Interval::from_i64(2), 128);
        assert!(e2.contains_rational(&dec("7.3890560989306502272304274605750078131803155705518")));
        let em = exp_fin_enclosure(&Interval::from_i64(-100), 64);
        assert!(em.lo().is_positive());
    }

    #[test]
    fn exp_fin_scale_is_least_n() {
        assert_eq!(exp_fin_scale(&Interval::from_i64(-1)), BigInt::from(2));
        assert_eq!(exp_fin_scale(&point(1, 2)), BigInt::from(1));
        assert_eq!(exp_fin_scale(&Interval::from_i64(100)), BigInt::from(101));
    }
}
