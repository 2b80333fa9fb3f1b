use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tangent vectors are based at different points")]
    MismatchedBase,

    #[error("point is not on the model (membership residual {residual:e})")]
    NotOnModel { residual: f64 },

    #[error("vector is not tangent at its base point (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point is antipodal to the base point; radial direction undefined")]
    Antipodal,

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("chart differential is rank deficient at u = {u:?}")]
    RankDeficient { u: Vec<f64> },

    #[error("first fundamental form is ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("normal construction failed: {0}")]
    NormalConstruction(String),

    #[error("no analytic derivative available for {0}")]
    DerivativeUnavailable(&'static str),

    #[error("generator is not {kind}-skew (defect {defect:e})")]
    NotSkew { kind: &'static str, defect: f64 },

    #[error("vector field is not Killing (defect {defect:e} > {threshold:e})")]
    NotKilling { defect: f64, threshold: f64 },

    #[error("ambient has no constant sectional curvature")]
    NonConstantCurvature,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature resolution {got} below minimum {min}")]
    ResolutionTooLow { got: usize, min: usize },

    #[error("permutation enumeration guard: n = {0} not in 2..=6")]
    AlgebraGuard(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
