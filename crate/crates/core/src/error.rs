use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UtmError {
    #[error("datum domain {datum} does not match problem domain {problem}")]
    DomainMismatch { datum: String, problem: String },
    #[error("unknown built-in datum '{0}'")]
    UnknownDatum(String),
    #[error("transform undefined at lambda = {re}{im:+}i: Im(lambda) must stay below the decay rate {epsilon}")]
    TransformUndefined { re: f64, im: f64, epsilon: f64 },
    #[error("derivative of order {order} unavailable (datum supports up to {available})")]
    MissingDerivative { order: usize, available: usize },
    #[error("kernel pole at lambda = {re}{im:+}i")]
    KernelPole { re: f64, im: f64 },
    #[error("non-finite value at lambda = {re}{im:+}i")]
    NonFinite { re: f64, im: f64 },
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("deformation angle {delta} outside the admissible range [0, {max})")]
    InvalidDeformation { delta: f64, max: f64 },
    #[error("datum violates boundary compatibility: {0}")]
    Incompatible(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("bad tabulated data: {0}")]
    BadTable(String),
}

pub type Result<T> = std::result::Result<T, UtmError>;
