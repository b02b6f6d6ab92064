//! Error types shared by every module.
//!
//! Three failure classes map onto the CLI exit-code contract:
//! usage/config problems exit 2, numerical breakdowns exit 3. A bound
//! violated beyond tolerance is *not* an error — verification reports carry
//! a pass flag and the CLI maps a failing report to exit 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument left the validity domain of an operation (t outside
    /// `[0, T]`, `alpha <= 1`, `k = 0` where a corollary needs `k > 0`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed configuration: unknown family or estimate identifier,
    /// missing parameter, unreadable config file.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure failed to converge or lost a required
    /// invariant (quadrature non-convergence, positivity loss in the
    /// heat solver).
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    /// Exit code for the CLI contract: 2 for usage/config, 3 for numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
