use thiserror::Error;

/// Errors shared by every certified operation in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A configured node or word budget was exhausted before the
    /// enumeration finished. The partial result is discarded; callers may
    /// retry with a larger budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// The window-by-window matching ran out of zero positions. Carries the
    /// failing window index and the exact counts so the failure is
    /// reproducible.
    #[error("matching infeasible at window {window}: need {need} zeros, have {available}")]
    InfeasibleMatching {
        window: usize,
        need: usize,
        available: usize,
    },

    /// The adaptive gap search exhausted its truncation schedule without
    /// certifying a gap. This is an honest "not found", never a density
    /// claim.
    #[error("no certifiable gap found: {0}")]
    GapNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Resource limits for enumerations whose raw search space is exponential.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Maximum number of search-tree nodes visited by one enumeration call.
    pub max_nodes: u64,
    /// Maximum admissible value of (2 + floor(1/eps))^m before a cover
    /// enumeration or cover render refuses to start.
    pub max_cover_words: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 4_000_000,
            max_cover_words: 1 << 26,
        }
    }
}

impl Budget {
    /// Word-count guard used by depth-`m` cover enumeration: refuses when
    /// `choices_per_level^m` exceeds the configured limit.
    pub fn check_cover_words(&self, choices_per_level: u128, m: u32) -> Result<u128> {
        let count = choices_per_level
            .checked_pow(m)
            .filter(|&c| c <= self.max_cover_words)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "cover word count {choices_per_level}^{m} exceeds limit {}",
                    self.max_cover_words
                ))
            })?;
        Ok(count)
    }
}
