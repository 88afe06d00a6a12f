//! Krawczyk certification of regular zeros of square texp-polynomial
//! systems.

mod certificate;
mod krawczyk;
mod linalg;

pub use certificate::{check_certificate, Certificate, CertifyError, JacobianEnclosure};
pub use krawczyk::{certify_regular_zero, krawczyk, Budget, Failure, Verdict};
pub use linalg::{approx_inverse, det_enclosure, DMatrix, IMatrix};

use crate::algebra::{domain_texp, AlgebraError, KhovanskiiSystem};
use crate::enclose::{texp_enclosure, Dyadic, Interval, IntervalBox};

/// A square system that can be enclosed on boxes of its domain. The first
/// `restricted()` coordinates must stay strictly inside `(-1, 1)`.
///
/// The `*_domain` enclosures are valid for points of the box that lie in
/// the domain; `None` means the box misses the domain entirely.
pub trait SquareSystem: Clone + Send + Sync {
    fn dim(&self) -> usize;
    fn restricted(&self) -> usize;
    fn eval_domain(&self, b: &IntervalBox, prec: u32) -> Option<Vec<Interval>>;
    fn jacobian_domain(&self, b: &IntervalBox, prec: u32) -> Option<IMatrix>;
    /// Values of the smooth extension, used for floating-point Newton.
    fn eval_f64(&self, x: &[f64]) -> Vec<f64>;
    fn jacobian_f64(&self, x: &[f64]) -> Vec<Vec<f64>>;
    fn canonical_text(&self) -> String;
}

impl SquareSystem for KhovanskiiSystem {
    fn dim(&self) -> usize {
        self.n()
    }

    fn restricted(&self) -> usize {
        self.ell()
    }

    fn eval_domain(&self, b: &IntervalBox, prec: u32) -> Option<Vec<Interval>> {
        assert_eq!(b.dim(), self.n(), "box dimension");
        let ys = domain_texp(b, self.ell(), prec)?;
        Some(self.equations().iter().map(|p| p.eval_with(b.coords(), &ys, prec)).collect())
    }

    fn jacobian_domain(&self, b: &IntervalBox, prec: u32) -> Option<IMatrix> {
        assert_eq!(b.dim(), self.n(), "box dimension");
        let ys = domain_texp(b, self.ell(), prec)?;
        Some(
            self.jacobian()
                .iter()
                .map(|row| row.iter().map(|p| p.eval_with(b.coords(), &ys, prec)).collect())
                .collect(),
        )
    }

    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.equations().iter().map(|p| p.eval_f64_smooth(x)).collect()
    }

    fn jacobian_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian()
            .iter()
            .map(|row| row.iter().map(|p| p.eval_f64_smooth(x)).collect())
            .collect()
    }

    fn canonical_text(&self) -> String {
        self.to_string()
    }
}

/// Floating-point Newton iteration on the smooth extension. Returns the
/// last iterate once the step falls below `1e-15` relative, `None` on a
/// singular or non-finite step.
pub fn newton_f64<S: SquareSystem>(sys: &S, x0: &[f64], max_iter: usize) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    for _ in 0..max_iter {
        let f = sys.eval_f64(&x);
        let j = sys.jacobian_f64(&x);
        let dx = solve_f64(j, f)?;
        let mut small = true;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi -= di;
            small &= di.abs() <= 1e-15 * xi.abs().max(1.0);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        if small {
            break;
        }
    }
    Some(x)
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c] == 0.0 || !a[p][c].is_finite() {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// A box of relative half-width `rel` (absolute below magnitude 1) around
/// a floating-point point.
pub fn box_around(x: &[f64], rel: f64) -> Option<IntervalBox> {
    x.iter()
        .map(|&v| {
            let r = rel * v.abs().max(1.0);
            Some(Interval::new(Dyadic::from_f64(v - r)?, Dyadic::from_f64(v + r)?))
        })
        .collect::<Option<Vec<_>>>()
        .map(IntervalBox::new)
}

fn check_dim(sys: &KhovanskiiSystem, b: &IntervalBox) -> Result<(), AlgebraError> {
    if b.dim() != sys.n() {
        return Err(AlgebraError::ShapeMismatch {
            expected: sys.shape(),
            found: format!("box of dimension {}", b.dim()),
        });
    }
    Ok(())
}

/// Component-wise enclosures of `f_i` over the box, restricted semantics.
pub fn interval_eval_system(sys: &KhovanskiiSystem, b: &IntervalBox, prec: u32) -> Result<Vec<Interval>, AlgebraError> {
    check_dim(sys, b)?;
    let ys: Vec<Interval> = (0..sys.ell()).map(|i| texp_enclosure(b.coord(i), prec)).collect();
    Ok(sys.equations().iter().map(|p| p.eval_with(b.coords(), &ys, prec)).collect())
}

/// Entry-wise Jacobian enclosure with its determinant, restricted
/// semantics.
pub fn interval_jacobian(sys: &KhovanskiiSystem, b: &IntervalBox, prec: u32) -> Result<JacobianEnclosure, AlgebraError> {
    check_dim(sys, b)?;
    let ys: Vec<Interval> = (0..sys.ell()).map(|i| texp_enclosure(b.coord(i), prec)).collect();
    let entries: IMatrix = sys
        .jacobian()
        .iter()
        .map(|row| row.iter().map(|p| p.eval_with(b.coords(), &ys, prec)).collect())
        .collect();
    let det = det_enclosure(&entries, prec);
    Ok(JacobianEnclosure { entries, det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclose::parse_rational;

    fn sys(t: &str) -> KhovanskiiSystem {
        KhovanskiiSystem::parse(t).unwrap()
    }

    fn bx(t: &str) -> IntervalBox {
        IntervalBox::parse(t, 64).unwrap()
    }

    fn q(s: &str) -> crate::algebra::Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn system_evaluation() {
        let v = interval_eval_system(&sys("E(x1) - 1"), &bx("[0, 0]"), 64).unwrap();
        assert_eq!(v[0], Interval::zero());
        let v = interval_eval_system(&sys("x1^2 - 2"), &bx("[2, 3]"), 64).unwrap();
        assert_eq!(v[0], Interval::from_i64_pair(2, 7));
        let v = interval_eval_system(&sys("E(x1) - 2"), &bx("[0.6, 0.8]"), 64).unwrap();
        assert!(v[0].contains_zero());
        let eps = q("0.000001");
        assert!(v[0].lo().to_rational() >= q("1.82211880039") - q("2") - &eps);
        assert!(v[0].hi().to_rational() <= q("2.22554092849") - q("2") + &eps);
        assert!(interval_eval_system(&sys("x1 - 1"), &bx("[[0, 1], [0, 1]]"), 64).is_err());
    }

    #[test]
    fn newton_and_box() {
        let s = sys("x1^2 - 2");
        let x = newton_f64(&s, &[1.0], 50).unwrap();
        assert!((x[0] - 2f64.sqrt()).abs() < 1e-15);
        let b = box_around(&x, 1e-9).unwrap();
        assert!(b.coord(0).contains_rational(&q("1.41421356237309504880")));
        assert!(newton_f64(&sys("x1^2 + 1"), &[0.0], 5).is_none());
    }

    #[test]
    fn jacobian_examples() {
        let j = interval_jacobian(&sys("E(x1) - 2"), &bx("[0.69, 0.70]"), 64).unwrap();
        assert!(j.det.lo().to_rational() >= q("1.99") && j.det.hi().to_rational() <= q("2.02"));
        let j = interval_jacobian(&sys("x1^2 + x2^2 - 1; x2"), &bx("[[0.9, 1.1], [-0.1, 0.1]]"), 64).unwrap();
        // 0.9 and 1.1 are not dyadic, so the box itself is rounded outward
        let slack = q("1/1000000000000");
        assert!(j.det.lo().to_rational() >= q("1.8") - &slack && j.det.hi().to_rational() <= q("2.2") + &slack);
        let j = interval_jacobian(&sys("x1^2; x1 * x2"), &bx("[[-0.1, 0.1], [-0.1, 0.1]]"), 64).unwrap();
        assert!(j.det.contains_zero());
    }
}
