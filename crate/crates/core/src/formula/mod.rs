//! Quantifier-free formulas over `(ℝ, <, +, ·, texp)`: parsing,
//! flattening, the complexity case split and the equation device.

mod ast;
mod eval;
mod flatten;
mod normalize;
mod parse;

pub use ast::{sort_vars, var_order, Atom, CmpOp, Formula, QfFormula, Term};
pub use eval::{compare_zero, eval_atom, eval_formula, eval_term, Truth};
pub use flatten::{flatten, is_flat, Flattened};
pub use normalize::{
    atoms_to_equations, case_to_equations, normalize_complexity, AuxKind, AuxWitness, Disjunct, ExistentialSystem,
};
pub use parse::{parse_formula, parse_formula_with_vars, parse_term, ParseError};

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("formula is not flat: texp applied to a non-variable term")]
    NotFlat,
    #[error("disjunct matrix is not a conjunction of atoms")]
    NotConjunctive,
    #[error("formula has no variables")]
    NoVariables,
    #[error("{0} texp arguments exceed the case-split limit of 16")]
    TooManyTexpArguments(usize),
}
