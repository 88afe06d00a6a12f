//! Rewrites of systems: elimination of a dependent coordinate,
//! regularizing augmentation and witness slicing of non-square systems.

mod augment;
mod eliminate;
mod genexp;
mod slice;

pub use augment::{denest, orient_positive, regularize_augment, AugmentedSystem};
pub use eliminate::{eliminate_dependence, ReducedSystem};
pub use genexp::{from_plain, GenExpMonomial, GenExpPolynomial, GenExpSystem};
pub use slice::witness_slice;

use crate::algebra::AlgebraError;
use crate::certify::Failure;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("relation relates {relation} coordinates but the system has ell = {ell}")]
    RelationShape { relation: usize, ell: usize },
    #[error("relation is inconsistent with the certified enclosure")]
    RelationInconsistent,
    #[error("no equation can be dropped leaving a regular Jacobian")]
    NoRegularMinor,
    #[error("transformed coordinates leave the bounded domain")]
    DomainLeft,
    #[error("re-certification failed: {0}")]
    Recertification(Failure),
    #[error("system of size {0} is too small")]
    TooSmall(usize),
    #[error("expected fewer equations than variables, got {k} equations in {n} variables")]
    NotUnderdetermined { k: usize, n: usize },
    #[error("center has {found} coordinates, expected {expected}")]
    CenterLength { expected: usize, found: usize },
    #[error("every maximal Jacobian minor vanishes identically")]
    RankDeficient,
    #[error("Jacobian determinant is not positive at the zero; orient the system first")]
    NegativeDeterminant,
    #[error("minor omitting column {0} is not bounded away from zero")]
    SingularMinor(usize),
    #[error("certified extension does not project into the original box")]
    ProjectionEscapes,
}
