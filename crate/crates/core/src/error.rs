use alloc::string::String;
use core::fmt;

/// Errors produced by game evaluation, merit functions and solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point left the domain on which a payoff is defined.
    Domain {
        player: Option<usize>,
        reason: &'static str,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// A dense diagnostic was requested for a problem that is too large.
    TooLarge {
        dimension: usize,
        limit: usize,
    },
    InvalidParameter(String),
    InvalidConfig(String),
    /// The point handed to an SNP-only check is not stationary.
    NotStationary {
        grad_norm: f64,
    },
    /// Every probe or record was filtered out, so nothing could be estimated.
    NoQualifyingSamples(&'static str),
}

impl Error {
    pub fn domain(reason: &'static str) -> Self {
        Error::Domain {
            player: None,
            reason,
        }
    }

    /// Attaches a player index to a domain error, leaving other variants untouched.
    pub fn for_player(self, player: usize) -> Self {
        match self {
            Error::Domain { reason, .. } => Error::Domain {
                player: Some(player),
                reason,
            },
            other => other,
        }
    }

    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain {
                player: Some(p),
                reason,
            } => write!(f, "domain violation for player {}: {}", p + 1, reason),
            Error::Domain {
                player: None,
                reason,
            } => write!(f, "domain violation: {}", reason),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {}, found {}", expected, found)
            }
            Error::TooLarge { dimension, limit } => {
                write!(f, "dimension {} exceeds the diagnostic limit {}", dimension, limit)
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {}", msg),
            Error::InvalidConfig(msg) => write!(f, "invalid solver configuration: {}", msg),
            Error::NotStationary { grad_norm } => {
                write!(f, "point is not stationary (joint gradient norm {:e})", grad_norm)
            }
            Error::NoQualifyingSamples(what) => write!(f, "no qualifying samples: {}", what),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}
