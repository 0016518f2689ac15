use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tree degree q must be at least 2, got {0}")]
    InvalidDegree(usize),

    #[error("ball of radius {radius} over q = {q} overflows the vertex index type")]
    BallTooLarge { q: usize, radius: usize },

    #[error("vertex {vertex} is outside the ball ({len} vertices)")]
    VertexOutOfRange { vertex: usize, len: usize },

    #[error("cylinder {cylinder} is outside the partition ({len} cylinders)")]
    CylinderOutOfRange { cylinder: usize, len: usize },

    #[error("cylinder depth {depth} is too shallow for vertex depth {needed}")]
    Truncation { depth: usize, needed: usize },

    #[error("invalid cylinder depth {0}; must be at least 1")]
    InvalidCylinderDepth(usize),

    #[error("averaging level {level} exceeds cylinder depth {depth}")]
    AveragingLevel { level: usize, depth: usize },

    #[error("spectral grid needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("c-function has a pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("spectral parameter {s} is outside the open interval (0, {tau})")]
    OutsideSpectralInterval { s: f64, tau: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{name} must satisfy {constraint}, got {value}")]
    Exponent {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("function family is empty")]
    EmptyFamily,

    #[error("function {index} of the family is identically zero")]
    ZeroFunction { index: usize },

    #[error("incompatible setting: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
