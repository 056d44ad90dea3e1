use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("PeriodMatrix invariant violated: {0}")]
    NonPosDef(String),
    #[error("truncation radius {needed} exceeds the cap {cap}")]
    RadiusCap { needed: usize, cap: usize },
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("period quadrature did not converge with {nodes} nodes (last change {change:e})")]
    QuadratureStall { nodes: usize, change: f64 },
    #[error("no admissible integration path: {0}")]
    PathFailure(String),
    #[error("point is (numerically) a branch point: |p(x)| = {0:e}")]
    BranchPoint(f64),
    #[error("curve points coincide modulo the lattice: {0}")]
    CoincidentPoints(String),
    #[error("Kummer image is numerically the zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank deficient design matrix (sigma2/sigma1 = {0:e})")]
    RankDeficient(f64),
    #[error("root search failed: found {found} of {wanted} roots")]
    RootSearchFailed { found: usize, wanted: usize },
    #[error("evaluation point lies on the theta divisor: {0}")]
    DivisorHit(String),
    #[error("lost track of the zero: {0}")]
    LostZero(String),
    #[error("zero is not simple: |d_U theta| = {0:e}")]
    DegenerateZero(f64),
    #[error("guard condition failed: {0}")]
    GuardFailed(String),
    #[error("particle collision: {0}")]
    Collision(String),
    #[error("series window exhausted: {0}")]
    WindowExhausted(String),
    #[error("data is not periodic: defect {0:e}")]
    NonPeriodic(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable name of the variant, used verbatim in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPosDef(_) => "NonPosDef",
            Error::RadiusCap { .. } => "RadiusCap",
            Error::DegenerateCurve(_) => "DegenerateCurve",
            Error::QuadratureStall { .. } => "QuadratureStall",
            Error::PathFailure(_) => "PathFailure",
            Error::BranchPoint(_) => "BranchPoint",
            Error::CoincidentPoints(_) => "CoincidentPoints",
            Error::ZeroVector => "ZeroVector",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::RankDeficient(_) => "RankDeficient",
            Error::RootSearchFailed { .. } => "RootSearchFailed",
            Error::DivisorHit(_) => "DivisorHit",
            Error::LostZero(_) => "LostZero",
            Error::DegenerateZero(_) => "DegenerateZero",
            Error::GuardFailed(_) => "GuardFailed",
            Error::Collision(_) => "Collision",
            Error::WindowExhausted(_) => "WindowExhausted",
            Error::NonPeriodic(_) => "NonPeriodic",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Errors caused by bad input data rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonPosDef(_)
                | Error::DegenerateCurve(_)
                | Error::CoincidentPoints(_)
                | Error::DimensionMismatch(_)
                | Error::InvalidInput(_)
        )
    }
}
