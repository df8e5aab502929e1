use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports. Variants map one-to-one onto the
/// `code` field of the CLI error JSON.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live over different rings: {0}")]
    DescriptorMismatch(String),
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("1/2 is not in the ring")]
    HalfNotInvertible,
    #[error("matrix is not right invertible")]
    NotRightInvertible,
    #[error("operation not supported over this ring: {0}")]
    UnsupportedRing(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("matrix does not preserve the orthogonal form")]
    NotOrthogonal,
    #[error("matrix does not have determinant one")]
    NotSpecialLinear,

    #[error("bad generator indices: {0}")]
    BadIndices(String),
    #[error("word length {len} exceeds limit {limit}")]
    WordLimit { len: usize, limit: usize },
    #[error("witness check failed: {0}")]
    CheckFailed(String),

    #[error("no unit entry to pivot on: {0}")]
    NoUnitEntry(String),
    #[error("ring is not local")]
    NotLocal,
    #[error("form identity violated: {0}")]
    FormViolation(String),
    #[error("size bound violated: {0}")]
    SizeBound(String),

    #[error("r·c is not zero")]
    NotPerpendicular,
    #[error("inner products with w are not both one")]
    BadPerp,
    #[error("ideal is not comaximal with the unit ideal")]
    IdealNotComaximal,
    #[error("quotient not supported: {0}")]
    UnsupportedQuotient(String),

    #[error("no split exponent N <= {0} works")]
    SplitExponentExhausted(u32),
    #[error("s1 + s2 != 1: {0}")]
    BadComaximal(String),
    #[error("charts disagree on the overlap: {0}")]
    OverlapMismatch(String),
    #[error("patching base not supported: {0}")]
    UnsupportedBase(String),

    #[error("O_2 element fits neither diagonal nor antidiagonal shape")]
    NotClassifiable,
    #[error("reduction failed: {0}")]
    ReductionFailed(String),
    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),

    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),
    #[error("object outside the table domain: {0}")]
    ObjectOutOfDomain(String),
    #[error("objects lie in different orbits")]
    NotEquivalent,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            DescriptorMismatch(_) => "DescriptorMismatch",
            NotAUnit(_) => "NotAUnit",
            Unsupported(_) => "Unsupported",
            DegreeCap { .. } => "DegreeCap",
            InvalidRing(_) => "InvalidRing",
            InvalidElement(_) => "InvalidElement",
            ShapeMismatch(_) => "ShapeMismatch",
            SizeLimit(_) => "SizeLimit",
            HalfNotInvertible => "HalfNotInvertible",
            NotRightInvertible => "NotRightInvertible",
            UnsupportedRing(_) => "UnsupportedRing",
            NotInvertible => "NotInvertible",
            NotSymplectic => "NotSymplectic",
            NotOrthogonal => "NotOrthogonal",
            NotSpecialLinear => "NotSpecialLinear",
            BadIndices(_) => "BadIndices",
            WordLimit { .. } => "WordLimit",
            CheckFailed(_) => "CheckFailed",
            NoUnitEntry(_) => "NoUnitEntry",
            NotLocal => "NotLocal",
            FormViolation(_) => "FormViolation",
            SizeBound(_) => "SizeBound",
            NotPerpendicular => "NotPerpendicular",
            BadPerp => "BadPerp",
            IdealNotComaximal => "IdealNotComaximal",
            UnsupportedQuotient(_) => "UnsupportedQuotient",
            SplitExponentExhausted(_) => "SplitExponentExhausted",
            BadComaximal(_) => "BadComaximal",
            OverlapMismatch(_) => "OverlapMismatch",
            UnsupportedBase(_) => "UnsupportedBase",
            NotClassifiable => "NotClassifiable",
            ReductionFailed(_) => "ReductionFailed",
            UnsupportedPresentation(_) => "UnsupportedPresentation",
            SearchBudgetExceeded(_) => "SearchBudgetExceeded",
            ObjectOutOfDomain(_) => "ObjectOutOfDomain",
            NotEquivalent => "NotEquivalent",
            Parse(_) => "Parse",
        }
    }
}
