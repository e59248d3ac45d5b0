use thiserror::Error;

use crate::systems::rect::TilingError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: bad fractions, non-normalized vectors, unsorted cuts.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A rational stand-in for an irrational rotation would expose its period.
    #[error(
        "aliasing guard: time {time} x {intervals} intervals exceeds denominator {denominator} / {safety_factor}"
    )]
    Aliasing {
        time: u64,
        intervals: usize,
        denominator: String,
        safety_factor: u64,
    },

    #[error("budget exceeded: {what} = {requested} > {limit}")]
    Budget {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("tiling error: {0}")]
    Tiling(#[from] TilingError),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn budget(what: &'static str, requested: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::Budget {
            what,
            requested: requested.into(),
            limit: limit.into(),
        }
    }

    /// True for errors that the CLI maps to the budget/aliasing exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Aliasing { .. } | Error::Budget { .. })
    }
}
