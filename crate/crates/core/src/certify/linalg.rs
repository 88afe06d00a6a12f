//! Small dense linear algebra over intervals and rounded dyadics.

use crate::enclose::{Dyadic, Interval, Round};

pub type IMatrix = Vec<Vec<Interval>>;
pub type DMatrix = Vec<Vec<Dyadic>>;

fn near(x: Dyadic, prec: u32) -> Dyadic {
    x.round(prec, Round::Nearest)
}

/// Approximate inverse by Gauss–Jordan elimination with partial pivoting,
/// rounding to nearest at `prec` bits. Not rigorous; `None` when a pivot
/// vanishes.
pub fn approx_inverse(a: &DMatrix, prec: u32) -> Option<DMatrix> {
    let n = a.len();
    let mut m: Vec<Vec<Dyadic>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Dyadic::one() } else { Dyadic::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].abs().cmp(&m[j][col].abs()).then(j.cmp(&i)))?;
        if m[p][col].is_zero() {
            return None;
        }
        m.swap(col, p);
        let piv = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = x.div(&piv, prec, Round::Nearest)?;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..2 * n {
                let t = near(f.mul(&m[col][c]), prec);
                m[r][c] = near(m[r][c].sub(&t), prec);
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Rigorous enclosure of `{det A : A ∈ entries}`. Interval Gaussian
/// elimination with maximal-mignitude pivoting; when no pivot excludes 0,
/// cofactor expansion for `n <= 4`, otherwise a Hadamard-type bound.
pub fn det_enclosure(a: &IMatrix, prec: u32) -> Interval {
    let n = a.len();
    if n == 0 {
        return Interval::one();
    }
    let ge = gauss_det(a, prec);
    if n <= 4 {
        let cof = cofactor_det(a, prec);
        return match ge {
            Some(g) => g.intersect(&cof).unwrap_or(cof),
            None => cof,
        };
    }
    ge.unwrap_or_else(|| {
        let mut bound = Dyadic::one();
        for row in a {
            let s = row.iter().fold(Dyadic::zero(), |s, x| s.add(&x.mag()));
            bound = bound.mul(&s).round(prec, Round::Up);
        }
        Interval::new(bound.neg(), bound)
    })
}

fn gauss_det(a: &IMatrix, prec: u32) -> Option<Interval> {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Interval::one();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].mig().cmp(&m[j][col].mig()).then(j.cmp(&i)))?;
        if m[p][col].contains_zero() {
            return None;
        }
        if p != col {
            m.swap(p, col);
            det = det.neg();
        }
        let piv = m[col][col].clone();
        det = det.mul(&piv, prec);
        for r in col + 1..n {
            let f = m[r][col].div(&piv, prec)?;
            for c in col + 1..n {
                let t = f.mul(&m[col][c], prec);
                m[r][c] = m[r][c].sub(&t, prec);
            }
        }
    }
    Some(det)
}

fn cofactor_det(a: &IMatrix, prec: u32) -> Interval {
    fn rec(a: &IMatrix, row: usize, cols: &[usize], prec: u32) -> Interval {
        match cols {
            [] => Interval::one(),
            [c] => a[row][*c].clone(),
            _ => {
                let mut acc = Interval::zero();
                for (k, &c) in cols.iter().enumerate() {
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let t = a[row][c].mul(&rec(a, row + 1, &rest, prec), prec);
                    acc = if k % 2 == 0 { acc.add(&t, prec) } else { acc.sub(&t, prec) };
                }
                acc
            }
        }
    }
    let cols: Vec<usize> = (0..a.len()).collect();
    rec(a, 0, &cols, prec)
}

/// `Y·v` for a point matrix and an interval vector.
pub fn point_mat_vec(y: &DMatrix, v: &[Interval], prec: u32) -> Vec<Interval> {
    y.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Interval::zero(), |s, (a, b)| s.add(&b.mul_dyadic(a, prec), prec))
        })
        .collect()
}

/// `I − Y·J` for a point matrix `Y` and an interval matrix `J`.
pub fn identity_minus_product(y: &DMatrix, j: &IMatrix, prec: u32) -> IMatrix {
    let n = y.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let mut s = if r == c { Interval::one() } else { Interval::zero() };
                    for k in 0..n {
                        s = s.sub(&j[k][c].mul_dyadic(&y[r][k], prec), prec);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn interval_mat_vec(a: &IMatrix, v: &[Interval], prec: u32) -> Vec<Interval> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Interval::zero(), |s, (x, y)| s.add(&x.mul(y, prec), prec)))
        .collect()
}
