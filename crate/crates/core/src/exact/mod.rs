//! Exact arithmetic over ℚ and in residue rings ℚ[x]/(p).

mod element;
mod poly;
mod sturm;

pub use element::AlgebraicNumber;
pub use poly::{parse_rational, IntPolynomial};
pub use sturm::{real_root_count, resultant, sturm_count, sturm_sequence};

pub(crate) use poly::rbig_pow;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("invalid interval: lower end must be below upper end")]
    InvalidInterval,
    #[error("interval endpoint {0} is a root")]
    EndpointIsRoot(String),
    #[error("element is not invertible in the residue ring")]
    NotInvertible,
    #[error("elements belong to different residue rings")]
    ModulusMismatch,
    #[error("minimal polynomial could not be confirmed (modulus may be reducible)")]
    MinPolyUnconfirmed,
    #[error("parse error {0}")]
    Parse(String),
}
