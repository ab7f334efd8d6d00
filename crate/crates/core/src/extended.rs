//! Nonnegative extended reals for detour costs.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A value in `[0, ∞]`, with infinity as its own variant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// Sum in `[0, ∞]`.
    pub fn add(self, other: Extended) -> Extended {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinite,
        }
    }

    /// Absolute difference of two finite values; `None` otherwise.
    pub fn gap(self, other: Extended) -> Option<f64> {
        Some((self.finite()? - other.finite()?).abs())
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}
