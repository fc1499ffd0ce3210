//! Enumeration limits shared by the engine and the analysis searches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Patterns evaluated by a single exhaustive enumeration.
    pub enumeration: u64,
    /// Entries of a composite rule table.
    pub table: u64,
    /// Entries of a materialized periodization map.
    pub materialize: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps::uniform(DEFAULT_CAP)
    }
}

impl Caps {
    pub fn uniform(cap: u64) -> Self {
        Caps {
            enumeration: cap,
            table: cap,
            materialize: cap,
        }
    }

    /// Reads `ANUCA_CAP` and falls back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var("ANUCA_CAP") {
            Ok(v) => {
                let cap = v.trim().parse::<u64>().map_err(|_| {
                    Error::InvalidParameter(format!("ANUCA_CAP must be a positive integer, got `{v}`"))
                })?;
                if cap == 0 {
                    return Err(Error::InvalidParameter("ANUCA_CAP must be positive".into()));
                }
                Ok(Caps::uniform(cap))
            }
            Err(_) => Ok(Caps::default()),
        }
    }
}

/// `q^n` if it does not overflow `u64`.
pub fn checked_pow(q: u64, n: usize) -> Option<u64> {
    let n = u32::try_from(n).ok()?;
    q.checked_pow(n)
}

/// Returns `q^n` when it is at most `cap`.
pub(crate) fn within_cap(q: u64, n: usize, cap: u64, what: &str) -> Result<u64> {
    match checked_pow(q, n) {
        Some(v) if v <= cap => Ok(v),
        _ => Err(Error::CapExceeded {
            what: what.to_string(),
            needed: format!("{q}^{n}"),
            cap,
            completed: None,
        }),
    }
}
