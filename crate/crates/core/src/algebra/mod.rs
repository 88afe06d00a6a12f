//! Exact symbolic layer: texp-polynomials, formal derivatives, Jacobians
//! and integer-relation candidates.

mod dependence;
mod det;
mod poly;
mod system;
mod text;

pub use dependence::{integer_dependence, lll, DependenceRelation};
pub use det::{determinant, minor};
pub use poly::{ExpMonomial, ExpPolynomial, Rational, Shape};
pub(crate) use poly::{domain_texp, fmt_rational};
pub use system::KhovanskiiSystem;
pub use text::{standard_var_names, term_to_poly};

use crate::formula::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("empty system: n must be at least 1")]
    EmptySystem,
    #[error("invalid shape: ell = {ell} exceeds n = {n}")]
    InvalidShape { ell: usize, n: usize },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: Shape, found: String },
    #[error("variable index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("variable {index} is not exponentiated (ell = {ell})")]
    NotRestricted { index: usize, ell: usize },
    #[error("system has {equations} equations for {n} variables")]
    NotSquare { equations: usize, n: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("texp applied to a non-variable term `{0}`")]
    NestedTexp(String),
    #[error("malformed system header `{0}`")]
    BadHeader(String),
    #[error("invalid dependence relation: {0}")]
    BadRelation(String),
    #[error("enclosure {index} is wider than the detection tolerance 2^(8-{precision})")]
    EnclosureTooWide { index: usize, precision: u32 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}
