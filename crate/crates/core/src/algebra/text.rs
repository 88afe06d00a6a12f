//! Text forms: terms to canonical polynomials, and polynomial parsing.

use super::poly::{ExpPolynomial, Shape};
use super::AlgebraError;
use crate::formula::{parse_term, Term};

/// Converts a term to a texp-polynomial; `index` maps variable names to
/// 0-based positions. texp may only be applied to a restricted variable.
pub fn term_to_poly(
    t: &Term,
    shape: Shape,
    index: &dyn Fn(&str) -> Option<usize>,
) -> Result<ExpPolynomial, AlgebraError> {
    let var = |name: &str| index(name).ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()));
    Ok(match t {
        Term::Const(q) => ExpPolynomial::constant(shape, q.clone()),
        Term::Var(v) => ExpPolynomial::var(shape, var(v)?)?,
        Term::Texp(inner) => match inner.as_ref() {
            Term::Var(v) => ExpPolynomial::texp_var(shape, var(v)?)?,
            other => return Err(AlgebraError::NestedTexp(other.to_string())),
        },
        Term::Neg(a) => -term_to_poly(a, shape, index)?,
        Term::Add(a, b) => term_to_poly(a, shape, index)? + term_to_poly(b, shape, index)?,
        Term::Sub(a, b) => term_to_poly(a, shape, index)? - term_to_poly(b, shape, index)?,
        Term::Mul(a, b) => term_to_poly(a, shape, index)? * term_to_poly(b, shape, index)?,
        Term::Pow(a, k) => term_to_poly(a, shape, index)?.pow(*k),
    })
}

/// Names `x1..xn`.
pub fn standard_var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn standard_index(name: &str) -> Option<usize> {
    let k: usize = name.strip_prefix('x')?.parse().ok()?;
    (k >= 1 && !name[1..].starts_with('0')).then(|| k - 1)
}

impl ExpPolynomial {
    /// Parses the canonical text grammar over `x1..xn`, with `E(xi)` only
    /// for `i <= ell`.
    pub fn parse(text: &str, shape: Shape) -> Result<ExpPolynomial, AlgebraError> {
        let names = standard_var_names(shape.n());
        let t = parse_term(text, Some(&names))?;
        term_to_poly(&t, shape, &standard_index)
    }
}

/// Highest variable index and highest texp index (1-based) occurring in
/// a polynomial text over `x1, x2, ...`; used to infer a shape.
pub(crate) fn infer_extent(text: &str) -> Result<(usize, usize), AlgebraError> {
    let t = parse_term(text, None)?;
    let mut n = 0;
    let mut ell = 0;
    let mut bad = None;
    t.visit(&mut |s| match s {
        Term::Var(v) => match standard_index(v) {
            Some(i) => n = n.max(i + 1),
            None => bad = Some(v.clone()),
        },
        Term::Texp(inner) => {
            if let Term::Var(v) = inner.as_ref() {
                if let Some(i) = standard_index(v) {
                    ell = ell.max(i + 1);
                }
            }
        }
        _ => {}
    });
    match bad {
        Some(v) => Err(AlgebraError::UnknownVariable(v)),
        None => Ok((ell, n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let s = Shape::new(1, 2).unwrap();
        for text in ["x1 * E(x1) - 1", "-x1 + 2 * x2 + 3", "E(x1)^2 - 1/2 * x2", "0"] {
            let p = ExpPolynomial::parse(text, s).unwrap();
            assert_eq!(ExpPolynomial::parse(&p.to_string(), s).unwrap(), p);
        }
        let p = ExpPolynomial::parse("(x1 + x2)^2 - x1^2 - x2^2", s).unwrap();
        assert_eq!(p.to_string(), "2 * x1 * x2");
    }

    #[test]
    fn parse_rejects_bad_variables() {
        let s = Shape::new(1, 2).unwrap();
        assert!(ExpPolynomial::parse("E(x2)", s).is_err());
        assert!(ExpPolynomial::parse("x3", s).is_err());
        assert!(ExpPolynomial::parse("E(x1 + 1)", s).is_err());
        assert!(ExpPolynomial::parse("y", s).is_err());
    }

    #[test]
    fn extent_inference() {
        assert_eq!(infer_extent("E(x1) - x3").unwrap(), (1, 3));
        assert!(infer_extent("x0 + 1").is_err());
    }
}
