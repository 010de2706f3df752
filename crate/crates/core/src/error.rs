use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom {index} has modulus {modulus:e} below the floor eps = {eps:e}")]
    EpsGapViolated { index: u64, modulus: f64, eps: f64 },

    #[error("invalid atom generator: {0}")]
    InvalidGenerator(String),

    #[error("xi is not square summable: {0}")]
    XiNotL2(String),

    #[error("xi lies in the domain of R: {0}")]
    XiInDomainOfR(String),

    #[error("vector is not square summable: {0}")]
    NotSquareSummable(String),

    #[error("symbol of degree {degree} applied outside its domain: {detail}")]
    DomainViolation { degree: i32, detail: String },

    #[error("tail bound {bound:e} above target {target:e} at truncation cap {cap}")]
    TailBoundFailure { bound: f64, target: f64, cap: u64 },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("elements belong to different models")]
    ModelMismatch,

    #[error("presentation is not an element of D(A*): {0}")]
    NotInDomain(String),

    #[error("boundary value is not in the extension subspace (residual {residual:e})")]
    NotInExtensionDomain { residual: f64 },

    #[error("extension basis is linearly dependent (normalized Gram determinant {det:e})")]
    DependentBasis { det: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("alpha must be nonzero")]
    AlphaZero,

    #[error("support of xi has fewer than two distinct atoms")]
    AmbiguousSupport,
}

impl Error {
    /// Name of the module whose contract produced the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::EpsGapViolated { .. }
            | Error::InvalidGenerator(_)
            | Error::XiNotL2(_)
            | Error::XiInDomainOfR(_)
            | Error::NotSquareSummable(_)
            | Error::DomainViolation { .. }
            | Error::InvalidTolerance(_) => "model",
            Error::TailBoundFailure { .. } => "summation",
            Error::InvalidElement(_) | Error::ModelMismatch | Error::NotInDomain(_) => "vishik",
            Error::NotInExtensionDomain { .. }
            | Error::DependentBasis { .. }
            | Error::DimensionMismatch(_) => "extensions",
            Error::AlphaZero | Error::AmbiguousSupport => "onedim",
        }
    }

    /// Stable identifier used in machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EpsGapViolated { .. } => "EpsGapViolated",
            Error::InvalidGenerator(_) => "InvalidGenerator",
            Error::XiNotL2(_) => "XiNotL2",
            Error::XiInDomainOfR(_) => "XiInDomainOfR",
            Error::NotSquareSummable(_) => "NotSquareSummable",
            Error::DomainViolation { .. } => "DomainViolation",
            Error::TailBoundFailure { .. } => "TailBoundFailure",
            Error::InvalidTolerance(_) => "InvalidTolerance",
            Error::InvalidElement(_) => "InvalidElement",
            Error::ModelMismatch => "ModelMismatch",
            Error::NotInDomain(_) => "NotInDomain",
            Error::NotInExtensionDomain { .. } => "NotInExtensionDomain",
            Error::DependentBasis { .. } => "DependentBasis",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::AlphaZero => "AlphaZero",
            Error::AmbiguousSupport => "AmbiguousSupport",
        }
    }
}
