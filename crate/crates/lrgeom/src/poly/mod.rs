//! Exact sparse polynomials over the rationals, with formal jet symbols.

mod frac;
mod monomial;
mod parse;
#[allow(clippy::module_inception)]
mod poly;
mod symbols;

pub use frac::{frac_eq, Frac};
pub use monomial::{Monomial, MonomialOrder};
pub use parse::{parse_frac, parse_poly};
pub use poly::{rat, Coeff, Poly};
pub use symbols::{JetDecl, Symbol, VarTable, MAX_JET_ORDER};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("invalid symbol name `{0}`")]
    BadName(String),
    #[error("symbol `{0}` declared twice")]
    DuplicateName(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("jet `{jet}` differentiates in `{coord}`, which is not among its dependencies")]
    JetDependency { jet: String, coord: String },
    #[error("jet `{jet}` exceeds declared max order {max}")]
    JetOrder { jet: String, max: usize },
    #[error("coordinate tags `{0}` and `{1}` make jet names ambiguous")]
    AmbiguousTags(String, String),
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial is not divisible")]
    NotDivisible,
}
