use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("expected {expected} slice coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("conj() cannot be resolved: {0}")]
    Conj(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("every sample was singular or excluded")]
    EmptyDomain,
    #[error("reduced Kerr polynomial degenerates at this point")]
    DegenerateAtPoint,
    #[error("root finder did not converge")]
    NoConvergence,
    #[error("closed-form Kerr field needs degree <= 2, got {0}")]
    UnsupportedDegree(u32),
    #[error("no closed-form superminimal solution for {0}")]
    UnsupportedFamily(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("image is a point at infinity")]
    AtInfinity,
    #[error("no backward null ray reaches the slice")]
    NoPreimage,
    #[error("backward null ray is not unique (caustic nearby)")]
    NonUnique,
    #[error("field is not submersive at this point")]
    NotSubmersive,
    #[error("screen basis degenerates")]
    DegenerateScreen,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
