use std::fmt;

use num_traits::Zero;

use super::ast::{Atom, CmpOp, Formula, QfFormula, Term};
use super::flatten::is_flat;
use super::FormulaError;
use crate::algebra::{term_to_poly, ExpPolynomial, Rational, Shape};

/// One branch of the texp case split: the variables in `vars[..ell]` are
/// guarded inside `(-1, 1)`, those in `outside` lie in the closed
/// complement, and every texp in `matrix` applies to an inside variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub vars: Vec<String>,
    pub ell: usize,
    pub outside: Vec<String>,
    pub matrix: Formula,
}

fn texp_arguments(f: &Formula, vars: &[String]) -> Vec<String> {
    let mut found = vec![false; vars.len()];
    for a in f.atoms() {
        for t in [&a.lhs, &a.rhs] {
            t.visit(&mut |s| {
                if let Term::Texp(inner) = s {
                    if let Term::Var(v) = inner.as_ref() {
                        if let Some(i) = vars.iter().position(|x| x == v) {
                            found[i] = true;
                        }
                    }
                }
            });
        }
    }
    vars.iter().zip(found).filter(|(_, f)| *f).map(|(v, _)| v.clone()).collect()
}

/// Splits a flat formula on `x ∈ (-1,1)` versus `x ∉ (-1,1)` for each
/// texp argument, replacing `E(x)` by `0` in the outside branch. The
/// all-inside disjunct comes first; the rest follow by binary count of
/// the outside set.
pub fn normalize_complexity(f: &QfFormula) -> Result<Vec<Disjunct>, FormulaError> {
    if !is_flat(&f.body) {
        return Err(FormulaError::NotFlat);
    }
    let args = texp_arguments(&f.body, &f.vars);
    if args.len() > 16 {
        return Err(FormulaError::TooManyTexpArguments(args.len()));
    }
    let mut out = Vec::with_capacity(1 << args.len());
    for mask in 0u32..(1 << args.len()) {
        let outside: Vec<String> = args
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.clone())
            .collect();
        let inside: Vec<String> = args.iter().filter(|v| !outside.contains(v)).cloned().collect();
        let mut vars = inside.clone();
        vars.extend(f.vars.iter().filter(|v| !inside.contains(v)).cloned());
        let matrix = f.body.map_terms(&mut |t| match &t {
            Term::Texp(inner) if matches!(inner.as_ref(), Term::Var(v) if outside.contains(v)) => Term::int(0),
            _ => t,
        });
        out.push(Disjunct {
            vars,
            ell: inside.len(),
            outside,
            matrix,
        });
    }
    Ok(out)
}

impl Disjunct {
    pub fn inside(&self) -> &[String] {
        &self.vars[..self.ell]
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.ell, self.vars.len().max(1)).expect("ell <= n")
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.vars.iter().position(|x| x == v)
    }

    /// Guard atoms: `-1 < x`, `x < 1` inside; `x^2 - 1 >= 0` outside.
    pub fn guard_atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        for v in self.inside() {
            out.push(Atom::new(Term::int(-1), CmpOp::Lt, Term::var(v)));
            out.push(Atom::new(Term::var(v), CmpOp::Lt, Term::int(1)));
        }
        for v in &self.outside {
            out.push(Atom::new(
                Term::sub(Term::pow(Term::var(v), 2), Term::int(1)),
                CmpOp::Ge,
                Term::int(0),
            ));
        }
        out
    }

    /// Conjunctive cases of the matrix together with the outside guards,
    /// with `<=` and `>=` split into strict inequality or equality.
    /// Inside guards are not listed: they are the domain of the system.
    pub fn conjunctive_cases(&self) -> Vec<Vec<Atom>> {
        let mut parts = vec![self.matrix.clone()];
        for v in &self.outside {
            parts.push(Formula::atom(
                Term::sub(Term::pow(Term::var(v), 2), Term::int(1)),
                CmpOp::Ge,
                Term::int(0),
            ));
        }
        let split = Formula::and(parts).map_atoms(&mut |a| match a.op {
            CmpOp::Le | CmpOp::Ge => {
                let strict = if a.op == CmpOp::Le { CmpOp::Lt } else { CmpOp::Gt };
                Formula::or(vec![
                    Formula::Atom(Atom::new(a.lhs.clone(), strict, a.rhs.clone())),
                    Formula::Atom(Atom::new(a.lhs.clone(), CmpOp::Eq, a.rhs.clone())),
                ])
            }
            _ => Formula::Atom(a.clone()),
        });
        split.dnf()
    }

    /// `lhs - rhs` as a texp-polynomial over `vars` (in the given shape,
    /// which may carry trailing auxiliary variables).
    pub fn atom_polynomial(&self, a: &Atom, shape: Shape) -> Result<ExpPolynomial, FormulaError> {
        let idx = |v: &str| self.index_of(v);
        let l = term_to_poly(&a.lhs, shape, &idx)?;
        let r = term_to_poly(&a.rhs, shape, &idx)?;
        Ok(l - r)
    }

    /// Truth at a rational point of `vars`; `None` when an atom cannot be
    /// decided by refined interval evaluation, exact evaluation or
    /// canonical zero detection.
    pub fn holds_at(&self, point: &[Rational]) -> Result<Option<bool>, FormulaError> {
        assert_eq!(point.len(), self.vars.len());
        let one = Rational::from_integer(1.into());
        for (i, x) in point.iter().enumerate() {
            let inside = *x > -one.clone() && *x < one;
            if i < self.ell && !inside {
                return Ok(Some(false));
            }
            if self.outside.contains(&self.vars[i]) && inside {
                return Ok(Some(false));
            }
        }
        let shape = self.shape();
        // a formula without variables still gets one (unused) coordinate
        let mut padded = point.to_vec();
        padded.resize(shape.n(), Rational::zero());
        let mut signs = Vec::new();
        for a in self.matrix.atoms() {
            let p = self.atom_polynomial(a, shape)?;
            signs.push((a.clone(), sign_at(&p, &padded)));
        }
        Ok(eval_with_signs(&self.matrix, &signs))
    }
}

/// Sign of a texp-polynomial at a rational point, if decidable.
pub(crate) fn sign_at(p: &ExpPolynomial, point: &[Rational]) -> Option<i32> {
    if p.is_zero() {
        return Some(0);
    }
    if let Some(v) = p.eval_rational(point) {
        return Some(if v.is_zero() { 0 } else if v > Rational::zero() { 1 } else { -1 });
    }
    for prec in [64u32, 256, 1024] {
        let b = crate::enclose::IntervalBox::from_rationals(point, prec + 8);
        let v = p.evaluate(&b, prec).ok()?;
        if v.lo().is_positive() {
            return Some(1);
        }
        if v.hi().is_negative() {
            return Some(-1);
        }
        if v.is_point() && v.lo().is_zero() {
            return Some(0);
        }
    }
    None
}

fn eval_with_signs(f: &Formula, signs: &[(Atom, Option<i32>)]) -> Option<bool> {
    match f {
        Formula::Atom(a) => {
            let s = signs.iter().find(|(x, _)| x == a).and_then(|(_, s)| *s)?;
            Some(a.op.holds_for_sign(s))
        }
        Formula::And(v) => {
            let mut unknown = false;
            for x in v {
                match eval_with_signs(x, signs) {
                    Some(false) => return Some(false),
                    None => unknown = true,
                    Some(true) => {}
                }
            }
            (!unknown).then_some(true)
        }
        Formula::Or(v) => {
            let mut unknown = false;
            for x in v {
                match eval_with_signs(x, signs) {
                    Some(true) => return Some(true),
                    None => unknown = true,
                    Some(false) => {}
                }
            }
            (!unknown).then_some(false)
        }
    }
}

impl fmt::Display for Disjunct {
    /// Guards first, then the matrix, as a formula in the input grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for v in self.inside() {
            parts.push(format!("-1 < {v} < 1"));
        }
        for v in &self.outside {
            parts.push(format!("({v} <= -1 | {v} >= 1)"));
        }
        match &self.matrix {
            Formula::And(v) => parts.extend(v.iter().map(|x| match x {
                Formula::Or(_) => format!("({x})"),
                _ => x.to_string(),
            })),
            Formula::Or(_) => parts.push(format!("({})", self.matrix)),
            Formula::Atom(a) => parts.push(a.to_string()),
        }
        write!(f, "{}", parts.join(" & "))
    }
}

/// What an auxiliary variable witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxKind {
    /// `F > 0` as `F·w² − 1 = 0`, so `w = ±F^(-1/2)`.
    Positive,
    /// `F ≠ 0` as `F·w − 1 = 0`, so `w = 1/F`.
    NonZero,
    /// `F ≥ 0` as `F − w² = 0`, so `w = ±√F`.
    NonNegative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxWitness {
    pub var: usize,
    pub kind: AuxKind,
    /// The polynomial `F` of the source atom, in the system's shape.
    pub source: ExpPolynomial,
}

/// Equations whose zeros in `U_{ℓ,n}` project onto the satisfying points
/// of a conjunctive disjunct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistentialSystem {
    pub shape: Shape,
    pub equations: Vec<ExpPolynomial>,
    pub witness_map: Vec<(String, usize)>,
    pub aux: Vec<AuxWitness>,
}

impl ExistentialSystem {
    pub fn is_square(&self) -> bool {
        self.equations.len() == self.shape.n()
    }
}

/// Converts a conjunction of atoms into equations: `F > 0 ↦ F·w² − 1`,
/// `F ≠ 0 ↦ F·w − 1`, `F ≥ 0 ↦ F − w²`, equalities pass through; `<` and
/// `<=` are handled by negating `F`.
pub fn case_to_equations(d: &Disjunct, atoms: &[Atom]) -> Result<ExistentialSystem, FormulaError> {
    let base = d.vars.len();
    let naux = atoms.iter().filter(|a| a.op != CmpOp::Eq).count();
    let n = base + naux;
    if n == 0 {
        return Err(FormulaError::NoVariables);
    }
    let shape = Shape::new(d.ell, n)?;
    let mut equations = Vec::with_capacity(atoms.len());
    let mut aux = Vec::new();
    let mut next = base;
    for a in atoms {
        let mut f = d.atom_polynomial(a, shape)?;
        if matches!(a.op, CmpOp::Lt | CmpOp::Le) {
            f = -f;
        }
        if a.op == CmpOp::Eq {
            equations.push(f);
            continue;
        }
        let w = ExpPolynomial::var(shape, next)?;
        let one = ExpPolynomial::from_int(shape, 1);
        let (eq, kind) = match a.op {
            CmpOp::Gt | CmpOp::Lt => (&(&f * &w.pow(2)) - &one, AuxKind::Positive),
            CmpOp::Ne => (&(&f * &w) - &one, AuxKind::NonZero),
            _ => (&f - &w.pow(2), AuxKind::NonNegative),
        };
        equations.push(eq);
        aux.push(AuxWitness {
            var: next,
            kind,
            source: f,
        });
        next += 1;
    }
    let witness_map = d.vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    Ok(ExistentialSystem {
        shape,
        equations,
        witness_map,
        aux,
    })
}

/// The equation device for a disjunct whose matrix is a conjunction.
pub fn atoms_to_equations(d: &Disjunct) -> Result<ExistentialSystem, FormulaError> {
    if !d.matrix.is_conjunctive() {
        return Err(FormulaError::NotConjunctive);
    }
    let mut atoms: Vec<Atom> = d.matrix.atoms().into_iter().cloned().collect();
    atoms.extend(d.guard_atoms().into_iter().skip(2 * d.ell));
    case_to_equations(d, &atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{flatten, parse_formula};

    fn disjuncts(s: &str) -> Vec<Disjunct> {
        normalize_complexity(&flatten(&parse_formula(s).unwrap()).formula).unwrap()
    }

    #[test]
    fn worked_split() {
        let ds = disjuncts("x + y > 2 & E(x) = z");
        let shown: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
        assert_eq!(
            shown,
            ["-1 < x < 1 & x + y > 2 & E(x) = z", "(x <= -1 | x >= 1) & x + y > 2 & 0 = z"]
        );
        assert_eq!(ds[0].ell, 1);
        assert_eq!(ds[1].ell, 0);
    }

    #[test]
    fn no_texp_single_disjunct() {
        let ds = disjuncts("x^2 + y^2 < 1");
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].ell, 0);
    }

    #[test]
    fn inside_variables_come_first() {
        let ds = disjuncts("a + E(b) + E(c) = 0");
        assert_eq!(ds.len(), 4);
        assert_eq!(ds[0].vars, ["b", "c", "a"]);
        assert_eq!(ds[1].vars, ["c", "a", "b"]);
        assert_eq!(ds[1].outside, ["b"]);
        assert_eq!(ds[3].ell, 0);
    }

    #[test]
    fn equation_device() {
        let d = &disjuncts("x > 0")[0];
        let sys = atoms_to_equations(d).unwrap();
        assert_eq!(sys.equations[0].to_string(), "x1 * x2^2 - 1");
        let d = &disjuncts("x = 0")[0];
        assert_eq!(atoms_to_equations(d).unwrap().equations[0].to_string(), "x1");
        let d = &disjuncts("x >= 0")[0];
        assert_eq!(atoms_to_equations(d).unwrap().equations[0].to_string(), "-x2^2 + x1");
        let d = &disjuncts("x != 0")[0];
        assert_eq!(atoms_to_equations(d).unwrap().equations[0].to_string(), "x1 * x2 - 1");
        let d = &disjuncts("x < 1")[0];
        assert_eq!(atoms_to_equations(d).unwrap().equations[0].to_string(), "-x1 * x2^2 + x2^2 - 1");
        let d = &disjuncts("x < 1 | x > 2")[0];
        assert!(atoms_to_equations(d).is_err());
    }

    #[test]
    fn le_splits_into_strict_or_equal() {
        let d = &disjuncts("x <= 1 & y >= 0")[0];
        assert_eq!(d.conjunctive_cases().len(), 4);
    }

    #[test]
    fn pointwise_semantics() {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        let ds = disjuncts("x + y > 2 & E(x) = z");
        // x = 0, y = 5/2, z = 1 satisfies the inside branch
        assert_eq!(ds[0].holds_at(&[q(0, 1), q(5, 2), q(1, 1)]).unwrap(), Some(true));
        assert_eq!(ds[1].holds_at(&[q(0, 1), q(5, 2), q(1, 1)]).unwrap(), Some(false));
        // x = 3, y = 0, z = 0 satisfies the outside branch
        assert_eq!(ds[1].holds_at(&[q(3, 1), q(0, 1), q(0, 1)]).unwrap(), Some(true));
        assert_eq!(ds[0].holds_at(&[q(1, 2), q(2, 1), q(1, 1)]).unwrap(), Some(false));
    }

    #[test]
    fn closed_formula_holds_at_empty_point() {
        let ds = disjuncts("1/2 < 1 & 2 != 2");
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].holds_at(&[]).unwrap(), Some(false));
        assert_eq!(disjuncts("1 < 2")[0].holds_at(&[]).unwrap(), Some(true));
    }
}
