use std::fmt;

use super::det::determinant;
use super::poly::{ExpPolynomial, Shape};
use super::text::infer_extent;
use super::AlgebraError;

/// `n` texp-polynomials in `n` variables with their formal Jacobian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KhovanskiiSystem {
    shape: Shape,
    equations: Vec<ExpPolynomial>,
    jacobian: Vec<Vec<ExpPolynomial>>,
}

impl KhovanskiiSystem {
    pub fn new(shape: Shape, equations: Vec<ExpPolynomial>) -> Result<Self, AlgebraError> {
        if equations.len() != shape.n() {
            return Err(AlgebraError::NotSquare {
                equations: equations.len(),
                n: shape.n(),
            });
        }
        for p in &equations {
            if p.shape() != shape {
                return Err(AlgebraError::ShapeMismatch {
                    expected: shape,
                    found: p.shape().to_string(),
                });
            }
        }
        let jacobian = equations
            .iter()
            .map(|p| (0..shape.n()).map(|j| p.partial(j)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KhovanskiiSystem {
            shape,
            equations,
            jacobian,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn ell(&self) -> usize {
        self.shape.ell()
    }

    pub fn equations(&self) -> &[ExpPolynomial] {
        &self.equations
    }

    pub fn jacobian(&self) -> &[Vec<ExpPolynomial>] {
        &self.jacobian
    }

    /// Symbolic Jacobian determinant.
    pub fn jacobian_determinant(&self) -> ExpPolynomial {
        determinant(&self.jacobian, self.shape)
    }

    /// Reads the system file format: `shape: ell n` followed by one
    /// polynomial per line. Blank lines and `#` comments are skipped.
    /// Without a header the shape is inferred from the variables used,
    /// one equation per line or separated by `;`.
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let first = lines.next().ok_or(AlgebraError::EmptySystem)?;
        if let Some(rest) = first.strip_prefix("shape:") {
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.trim_matches(|c| c == '(' || c == ')' || c == ','))
                .map(|t| t.parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| AlgebraError::BadHeader(first.to_string()))?;
            let [ell, n] = nums[..] else {
                return Err(AlgebraError::BadHeader(first.to_string()));
            };
            let shape = Shape::new(ell, n)?;
            let eqs = lines
                .flat_map(|l| l.split(';'))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| ExpPolynomial::parse(l, shape))
                .collect::<Result<Vec<_>, _>>()?;
            return KhovanskiiSystem::new(shape, eqs);
        }
        let texts: Vec<&str> = std::iter::once(first)
            .chain(lines)
            .flat_map(|l| l.split(';'))
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let mut ell = 0;
        let mut n = texts.len();
        for t in &texts {
            let (e, m) = infer_extent(t)?;
            ell = ell.max(e);
            n = n.max(m);
        }
        let shape = Shape::new(ell, n)?;
        let eqs = texts
            .iter()
            .map(|t| ExpPolynomial::parse(t, shape))
            .collect::<Result<Vec<_>, _>>()?;
        KhovanskiiSystem::new(shape, eqs)
    }

    /// Human-readable Jacobian listing.
    pub fn jacobian_text(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.jacobian.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out.push_str(&format!("J[{}][{}] = {}\n", i + 1, j + 1, e));
            }
        }
        out
    }
}

impl fmt::Display for KhovanskiiSystem {
    /// The system file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "shape: {} {}", self.shape.ell(), self.shape.n())?;
        for p in &self.equations {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}
