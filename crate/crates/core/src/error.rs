use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a sample needs at least two observations, got {0}")]
    EmptyOrSingleton(usize),
    #[error("observation {value} at index {index} lies outside the open interval (0, 1)")]
    OutOfSupport { index: usize, value: f64 },
    #[error("observation at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("sample size {n} exceeds the limit of {cap} for this computation")]
    CapExceeded { n: usize, cap: usize },
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },
    #[error("theta = {theta} is outside the admissible range of {family}")]
    ThetaOutOfRange { family: String, theta: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("adaptive quadrature failed to reach tolerance (estimate {estimate}, error {error})")]
    QuadratureFailure { estimate: f64, error: f64 },
    #[error("{reps} replications are too few for level {level}: need reps * level >= 20 and reps >= 1000")]
    InsufficientReps { reps: usize, level: f64 },
    #[error("only {hits} exceedances of a = {a} at n = {n}; at least {required} are needed")]
    InsufficientHits {
        n: usize,
        a: f64,
        hits: usize,
        required: usize,
    },
    #[error("unknown alternative family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
