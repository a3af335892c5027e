//! Run parameters and resource budgets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Sl,
    Sp,
    O,
    U,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Sl => "sl",
            Family::Sp => "sp",
            Family::O => "o",
            Family::U => "u",
        }
    }

    /// Matrix size for parameter n. For Sp the parameter follows the
    /// convention that n means matrices of size 2n.
    pub fn mat_size(self, n: usize) -> usize {
        match self {
            Family::Sp => 2 * n,
            _ => n,
        }
    }

    /// Whether the group lives over the quadratic unramified extension.
    pub fn needs_extension(self) -> bool {
        matches!(self, Family::U)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "sl" => Ok(Family::Sl),
            "sp" => Ok(Family::Sp),
            "o" => Ok(Family::O),
            "u" => Ok(Family::U),
            other => Err(Error::InvalidConfig(format!("unknown family `{other}`"))),
        }
    }
}

/// Enumeration and orbit-action caps. Exceeding a cap is an explicit
/// refusal (`Error::Budget`), never silent truncation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Budgets {
    /// Largest group order that full element enumeration will attempt.
    pub max_enum: u64,
    /// Largest |C(O_1)| allowed to drive orbit and centralizer scans.
    pub max_orbit_group: u64,
    /// Largest residue field size accepted for the base ring.
    pub max_q: u16,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_enum: 5_000_000, max_orbit_group: 100_000, max_q: 9 }
    }
}

impl Budgets {
    /// Defaults, with `RINGREP_MAX_ENUM` / `RINGREP_MAX_ORBIT` overrides.
    pub fn from_env() -> Budgets {
        let mut b = Budgets::default();
        if let Some(v) = env_u64("RINGREP_MAX_ENUM") {
            b.max_enum = v;
        }
        if let Some(v) = env_u64("RINGREP_MAX_ORBIT") {
            b.max_orbit_group = v;
        }
        if let Some(v) = env_u64("RINGREP_MAX_Q") {
            b.max_q = v as u16;
        }
        b
    }

    pub fn check_enum(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.max_enum {
            return Err(Error::Budget { what, needed, cap: self.max_enum });
        }
        Ok(())
    }

    pub fn check_orbit(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.max_orbit_group {
            return Err(Error::Budget { what, needed, cap: self.max_orbit_group });
        }
        Ok(())
    }
}

fn env_u64(key: &str) -> Option<u64> {
    std::env::var(key).ok()?.parse().ok()
}
