use thiserror::Error;

/// Errors raised by the geometric operations.
#[derive(Debug, Error)]
pub enum JbhError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("element is not a tripotent (residual {residual:.3e})")]
    NotTripotent { residual: f64 },

    #[error("tripotents are not mutually orthogonal (residual {residual:.3e})")]
    NotOrthogonal { residual: f64 },

    #[error("tripotent is not minimal (Peirce-2 dimension {dim})")]
    NotMinimal { dim: usize },

    #[error("point lies outside the open unit ball (norm {norm})")]
    OutsideBall { norm: f64 },

    #[error("invalid boundary datum: {0}")]
    InvalidDatum(String),

    #[error("operator is not self-adjoint (relative asymmetry {asymmetry:.3e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("element is not in the self-adjoint part A(e) (residual {residual:.3e})")]
    NotInSelfAdjointPart { residual: f64 },

    #[error("point is not on the boundary of the dual ball (dual norm {dual_norm})")]
    NotOnBoundary { dual_norm: f64 },

    #[error("sequence index {k} is below the admissible threshold {threshold}")]
    BelowThreshold { k: f64, threshold: f64 },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("limit datum has empty support")]
    EmptyLimit,

    #[error("linear system is singular")]
    Singular,

    #[error("extrapolation did not converge: {0}")]
    NonConvergence(String),

    #[error("unknown {0}")]
    UnknownName(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, JbhError>;
