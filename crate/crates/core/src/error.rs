use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("site {site} out of range for a {n}-qubit register")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("site {0} listed more than once")]
    DuplicateSite(usize),
    #[error("site list is empty")]
    EmptySites,
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not dichotomic (max |A² - I| = {0:.3e})")]
    NotDichotomic(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("circuit declares no measurements")]
    NoMeasurements,
    #[error("non-finite value encountered")]
    NonFinite,
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    /// Short stable name used in error rows of result tables.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SiteOutOfRange { .. } => "site_out_of_range",
            Error::DuplicateSite(_) => "duplicate_site",
            Error::EmptySites => "empty_sites",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotUnitary(_) => "not_unitary",
            Error::NotDichotomic(_) => "not_dichotomic",
            Error::InvalidState(_) => "invalid_state",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NoMeasurements => "no_measurements",
            Error::NonFinite => "non_finite",
        }
    }
}
