use thiserror::Error;

/// Errors surfaced by the library.
///
/// Internal invariants (things that can only fail through a bug in this
/// crate, e.g. a normal form whose witness product does not reproduce it)
/// are enforced with assertions instead and panic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not symplectic: {identity}")]
    NotSymplectic {
        /// Name of the violated block identity, e.g. "R^t Q - S^t P = I".
        identity: String,
    },

    #[error("input is not a valid linked group: {0}")]
    InvalidGroup(String),

    #[error("enumeration size limit exceeded: {needed} elements, limit {limit}")]
    SizeLimit { needed: String, limit: usize },

    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(String),

    #[error("primality test out of range: {0} exceeds the deterministic witness bound")]
    PrimalityOutOfRange(String),

    #[error("root is not liftable: derivative vanishes mod p")]
    NotLiftable,

    #[error("moduli are not pairwise coprime: gcd({0}, {1}) > 1")]
    NotCoprime(String, String),

    #[error("cannot embed cyclotomic element from level {from} into lower level {to}")]
    EmbedLevel { from: u32, to: u32 },

    #[error("columns do not generate the group")]
    NotGenerating,

    #[error("operation requires odd torsion, found even coefficient {0}")]
    EvenTorsion(String),

    #[error("cannot factor {0}: remaining cofactor exceeds the deterministic bound")]
    FactorOutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
