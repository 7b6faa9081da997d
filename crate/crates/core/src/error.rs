use thiserror::Error;

/// Every failure mode of the library, tagged so callers can tell input
/// problems from violated mathematical preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("corpus directory {0} contains no problem files")]
    CorpusMissing(String),

    #[error("composition is not truncation-safe: {0}")]
    CompositionUnsafe(String),
    #[error("not divisible, remainder {remainder}")]
    NotDivisible { remainder: String },
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("truncated data cannot be solved exactly: {0}")]
    TruncationTooLowToSolve(String),
    #[error("division by zero")]
    DivisionByZero,

    #[error("map is the identity to the available depth")]
    IdentityMap,
    #[error("map is not tangent to the identity: {0}")]
    NotTangentToIdentity(String),
    #[error("map does not fix the cutting locus pointwise: {0}")]
    DoesNotFixLocus(String),
    #[error("transition is not adapted: {0}")]
    NotAdapted(String),
    #[error("transition is not splitting")]
    NotSplitting,
    #[error("operation needs a codimension-one chart, got codimension {0}")]
    NotCodimensionOne(usize),
    #[error("section kind requires order of contact 1, got {0}")]
    NuMismatch(u32),
    #[error("unsupported center: {0}")]
    UnsupportedCenter(String),
    #[error("differential does not act as the identity on the normal bundle: {0}")]
    NormalActionNotIdentity(String),

    #[error("pole order exceeds the available expansion: {0}")]
    PoleAtInfinityOfTruncation(String),
    #[error("denominator vanishes identically")]
    ZeroDenominatorIdentically,
    #[error("degenerate zero, Jacobian determinant {jacobian}")]
    DegenerateZero { jacobian: String },
    #[error("point is not a common zero: {0}")]
    NotCommonZero(String),
    #[error("branch does not lie on the curve: {0}")]
    BranchNotOnCurve(String),
    #[error("hypotheses not met: {0}")]
    HypothesesUnmet(String),
    #[error("chart forms do not cover the projective line: {0}")]
    ChartCoverIncomplete(String),
    #[error("section vanishes identically on the fixed locus")]
    SectionIdenticallyZero,
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("chart {chart}{}: {source}", point.as_ref().map(|p| format!(", point {p}")).unwrap_or_default())]
    InChart {
        chart: usize,
        point: Option<String>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_chart(self, chart: usize, point: Option<String>) -> Self {
        Error::InChart { chart, point, source: Box::new(self) }
    }

    /// The innermost error, with chart context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::InChart { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::Parse { .. } | Error::InvalidInput(_) | Error::CorpusMissing(_)
        )
    }

    /// Stable identifier used in reports.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::Parse { .. } => "ParseError",
            Error::InvalidInput(_) => "InvalidInput",
            Error::CorpusMissing(_) => "CorpusMissing",
            Error::CompositionUnsafe(_) => "CompositionUnsafe",
            Error::NotDivisible { .. } => "NotDivisible",
            Error::InsufficientTruncation(_) => "InsufficientTruncation",
            Error::TruncationTooLowToSolve(_) => "TruncationTooLowToSolve",
            Error::DivisionByZero => "DivisionByZero",
            Error::IdentityMap => "IdentityMap",
            Error::NotTangentToIdentity(_) => "NotTangentToIdentity",
            Error::DoesNotFixLocus(_) => "DoesNotFixLocus",
            Error::NotAdapted(_) => "NotAdapted",
            Error::NotSplitting => "NotSplitting",
            Error::NotCodimensionOne(_) => "NotCodimensionOne",
            Error::NuMismatch(_) => "NuMismatch",
            Error::UnsupportedCenter(_) => "UnsupportedCenter",
            Error::NormalActionNotIdentity(_) => "NormalActionNotIdentity",
            Error::PoleAtInfinityOfTruncation(_) => "PoleAtInfinityOfTruncation",
            Error::ZeroDenominatorIdentically => "ZeroDenominatorIdentically",
            Error::DegenerateZero { .. } => "DegenerateZero",
            Error::NotCommonZero(_) => "NotCommonZero",
            Error::BranchNotOnCurve(_) => "BranchNotOnCurve",
            Error::HypothesesUnmet(_) => "HypothesesUnmet",
            Error::ChartCoverIncomplete(_) => "ChartCoverIncomplete",
            Error::SectionIdenticallyZero => "SectionIdenticallyZero",
            Error::UnsupportedGeometry(_) => "UnsupportedGeometry",
            Error::InChart { .. } => unreachable!(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
