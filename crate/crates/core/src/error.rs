use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("point coincides with the shape centroid")]
    CoincidentPoint,

    #[error("fewer than two real roots of the cos(phi) polynomial in [-1, 1] (found {found})")]
    RootFailure { found: usize },

    #[error("angle solve failed for point {index}: {source}")]
    PhiFailure {
        index: usize,
        #[source]
        source: Box<FitError>,
    },

    #[error("all input points are identical")]
    DegenerateInput,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("normal equations are rank deficient in column `{column}`")]
    RankDeficient { column: &'static str },

    #[error("non-finite value encountered during iteration")]
    NonFinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = FitError> = std::result::Result<T, E>;
