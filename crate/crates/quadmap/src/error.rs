use thiserror::Error;

/// Errors shared across the crate.
///
/// Domain errors (degenerate inputs, failed preconditions) all live here so
/// the CLI can funnel them into one machine-readable error channel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("{value} is not p-integral at p = {p}")]
    NotPIntegral { p: u64, value: String },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("division by zero in F_p")]
    ZeroDivision,

    #[error("mismatched moduli: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("degenerate map")]
    DegenerateMap,

    #[error("singular matrix: determinant is zero")]
    SingularMatrix,

    #[error("(0:0) is not a projective point")]
    ZeroPoint,

    #[error("points equal")]
    PointsEqual,

    #[error("P{0} not fixed")]
    NotFixed(usize),

    #[error("P{0} ramified")]
    Ramified(usize),

    #[error("point is not fixed by the map")]
    PointNotFixed,

    #[error("not a 2-cycle")]
    NotTwoCycle,

    #[error("degenerate critical normal form")]
    DegenerateNormalForm,

    #[error("evaluation undefined: both reduced forms vanish at the point")]
    DegenerateEvaluation,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("witness check failed: {0}")]
    WitnessFailure(String),
}
