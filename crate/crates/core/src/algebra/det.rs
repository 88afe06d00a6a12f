use super::poly::{ExpPolynomial, Shape};

/// Determinant of a square matrix of texp-polynomials by Laplace expansion
/// along the first row; the empty matrix has determinant 1.
pub fn determinant(m: &[Vec<ExpPolynomial>], shape: Shape) -> ExpPolynomial {
    let k = m.len();
    let cols: Vec<usize> = (0..k).collect();
    expand(m, 0, &cols, shape)
}

fn expand(m: &[Vec<ExpPolynomial>], row: usize, cols: &[usize], shape: Shape) -> ExpPolynomial {
    if cols.is_empty() {
        return ExpPolynomial::from_int(shape, 1);
    }
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = ExpPolynomial::zero(shape);
    for (pos, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &m[row][c] * &expand(m, row + 1, &rest, shape);
        acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Minor obtained by deleting the listed rows and columns.
pub fn minor(m: &[Vec<ExpPolynomial>], drop_rows: &[usize], drop_cols: &[usize]) -> Vec<Vec<ExpPolynomial>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| !drop_rows.contains(i))
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| !drop_cols.contains(j))
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}
