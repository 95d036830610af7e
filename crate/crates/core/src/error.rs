use thiserror::Error;

/// Everything that can go wrong inside the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdeError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("generating polynomial is degenerate at omega = {omega}")]
    DegenerateFrequency { omega: f64 },

    #[error("two generating roots coincide at omega = {omega}")]
    BranchCollision { omega: f64 },

    #[error("gamma stays within 1e-8 of zero on an interval around omega = {omega}")]
    Inconclusive { omega: f64 },

    #[error("delayed coupling b must be nonzero")]
    ZeroDelayCoupling,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("crossing at omega = {omega} is not transverse")]
    NonTransverseCrossing { omega: f64 },

    #[error("tau = {tau} lies on the critical delay {tau_k}")]
    OnBifurcation { tau: f64, tau_k: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("system is not in class 0/I/II/III; only the spectral oracle applies")]
    Unclassified,

    #[error("Newton iteration did not converge (last iterate {re}{im:+}i, residual {residual:e})")]
    NoConvergence { re: f64, im: f64, residual: f64 },

    #[error("characteristic root on the counting contour near {re}{im:+}i")]
    RootOnContour { re: f64, im: f64 },

    #[error("contour quadrature stalled: {0}")]
    QuadratureStall(String),

    #[error("step dt = {dt} exceeds tau/20 = {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("critical delay residual {residual:e} exceeds {limit:e} at tau = {tau}")]
    ResidualTooLarge { tau: f64, residual: f64, limit: f64 },

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T, E = DdeError> = std::result::Result<T, E>;
