use super::ReduceError;
use crate::algebra::{determinant, ExpPolynomial, KhovanskiiSystem, Rational, Shape};

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Completes `k < n` equations to a square system by the critical-point
/// conditions of `|x − c|²` on their zero set: with `S` the first column
/// set whose `k×k` Jacobian minor is not identically zero, each `j ∉ S`
/// contributes the determinant of the columns `S ∪ {j}` of the Jacobian
/// bordered by the row `x − c`.
pub fn witness_slice(equations: &[ExpPolynomial], center: &[Rational]) -> Result<KhovanskiiSystem, ReduceError> {
    let k = equations.len();
    let Some(first) = equations.first() else {
        return Err(ReduceError::NotUnderdetermined { k, n: 0 });
    };
    let shape: Shape = first.shape();
    let n = shape.n();
    if k >= n {
        return Err(ReduceError::NotUnderdetermined { k, n });
    }
    if center.len() != n {
        return Err(ReduceError::CenterLength { expected: n, found: center.len() });
    }
    if let Some(p) = equations.iter().find(|p| p.shape() != shape) {
        return Err(ReduceError::Algebra(crate::algebra::AlgebraError::ShapeMismatch {
            expected: shape,
            found: p.shape().to_string(),
        }));
    }
    let jac: Vec<Vec<ExpPolynomial>> = equations
        .iter()
        .map(|p| (0..n).map(|j| p.partial(j)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let cols = |sel: &[usize]| -> Vec<Vec<ExpPolynomial>> {
        jac.iter().map(|row| sel.iter().map(|&c| row[c].clone()).collect()).collect()
    };
    let s = k_subsets(n, k)
        .into_iter()
        .find(|sel| !determinant(&cols(sel), shape).is_zero())
        .ok_or(ReduceError::RankDeficient)?;
    let border: Vec<ExpPolynomial> = (0..n)
        .map(|i| Ok(ExpPolynomial::var(shape, i)? - ExpPolynomial::constant(shape, center[i].clone())))
        .collect::<Result<_, ReduceError>>()?;
    let mut out = equations.to_vec();
    for j in (0..n).filter(|j| !s.contains(j)) {
        let mut sel = s.clone();
        sel.push(j);
        let mut m = cols(&sel);
        m.push(sel.iter().map(|&c| border[c].clone()).collect());
        out.push(determinant(&m, shape));
    }
    Ok(KhovanskiiSystem::new(shape, out)?)
}
