use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trace identity violated: 2*sum d_i(1-kappa_i) = {lhs}, but n = {n}")]
    TraceIdentityViolation { lhs: String, n: u32 },

    #[error("kappa out of range for ideal {index}: {kappa}")]
    KappaOutOfRange { index: usize, kappa: String },

    #[error("center shape error: {0}")]
    CenterShapeError(String),

    #[error("invalid pair: {0}")]
    InvalidPair(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("shape mismatch: expected {expected} ideal coefficients, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("prescribed tensor must have positive coefficients: {0}")]
    NonPositiveTensor(String),

    #[error("metric must have positive coefficients: {0}")]
    NonPositiveMetric(String),

    #[error("positivity violated: 4T_{index} - kappa_{index} = {value} < 0")]
    PositivityViolated { index: usize, value: f64 },

    #[error("pair is not of simple-K type: (r, s) = ({r}, {s}), expected (1, 0)")]
    NotSimpleK { r: u32, s: u32 },

    #[error("cubic analysis needs exactly two ideals, pair has {0}")]
    WrongIdealCount(usize),

    #[error(
        "critical points on the null-trace manifold are only classified for r+s <= 2 \
         (pair has {0} ideals); use solve_scaled_all instead"
    )]
    UnsupportedIdealCount(usize),

    #[error("critical metric is not positive: {0}")]
    PositivityFailure(String),

    #[error("root scan unresolved: {0}")]
    ScanUnresolved(String),

    #[error("no feasible point on the constraint manifold: {0}")]
    NoFeasiblePoint(String),

    #[error("non-simple input: {0}")]
    NonSimpleInput(String),

    #[error("Killing form ratio is not constant on block {block}: deviation {deviation:e}")]
    NonProportional { block: usize, deviation: f64 },

    #[error("Ricci block {block} is not scalar: deviation {deviation:e}")]
    BlockNotScalar { block: usize, deviation: f64 },

    #[error("Ricci off-diagonal entries do not vanish: max {deviation:e}")]
    OffDiagonalNonzero { deviation: f64 },

    #[error("unknown pair: {0}")]
    UnknownPair(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
