use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the algebra, the numerical engine and the oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("elements live on different lattices")]
    LatticeMismatch,

    #[error("size cap exceeded: {what} is {actual}, limit {limit}")]
    SizeCap {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("matrix is not Hermitian: max |M - M*| = {deviation:e} exceeds {allowed:e}")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error(
        "Jacobi eigensolver did not converge after {sweeps} sweeps \
         (dimension {dimension}, off-diagonal norm {off_norm:e}, Frobenius norm {norm:e})"
    )]
    NoConvergence {
        sweeps: usize,
        dimension: usize,
        off_norm: f64,
        norm: f64,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("H not reflection invariant: {0}")]
    NotReflectionInvariant(String),

    #[error("H not globally gauge invariant: {0}")]
    NotGaugeInvariant(String),

    #[error("partition sum vanishes (Z = {0}); the Gibbs functional is undefined")]
    DegenerateNormalization(Complex64),

    #[error("symmetry violation between sites {site} and {mirror}: {detail}")]
    SymmetryViolation {
        site: String,
        mirror: String,
        detail: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
