use thiserror::Error;

use crate::stats::{FirthFit, TestKind};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("input out of domain: {0}")]
    InputDomain(String),

    #[error("test kind {0} is not supported by this operation")]
    UnsupportedKind(TestKind),

    /// Joint stratified enumeration would visit more datasets than allowed.
    #[error(
        "stratified enumeration needs {required} joint datasets, above the cap of {cap}; \
         use coarser strata"
    )]
    ResourceLimit { required: u128, cap: u64 },

    #[error("covariate is constant (no carriers or all carriers); slope is not identified")]
    SingularDesign,

    #[error("penalized Newton iteration did not converge after {} iterations", .0.iterations)]
    FirthNotConverged(Box<FirthFit>),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::InputDomain(msg.into())
    }
}
