//! Analytic sensitivities for a coherent state in port a and a
//! p-photon-subtracted squeezed vacuum in port b (p = 0, 1, 2).
//!
//! All QFI and second-moment formulas assume the optimal phase relation
//! `theta_s + 2 theta_a - 2 theta_1 = pi`.

mod budget;
mod formulas;
mod limits;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use budget::{invert_mean, s_root, BudgetMode, BudgetSpec, ProbeParams};
pub use formulas::{mean_inside, n_inside, n_sq_inside, nbar, nbar_from_sinh2, qfi_closed, qfi_closed_eta};
pub use limits::{hl, mzi_qfi_symmetric, qcrb, qfi_bounds, qfi_from_correlations, BoundReport, Regime};

/// Largest gain (and squeeze magnitude) accepted; `cosh(4g)` stays below 1e21.
pub const MAX_GAIN: f64 = 12.0;

/// Number of photons subtracted from the squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Subtraction {
    Zero,
    One,
    Two,
}

impl Subtraction {
    pub const ALL: [Subtraction; 3] = [Subtraction::Zero, Subtraction::One, Subtraction::Two];

    pub fn count(self) -> u32 {
        match self {
            Subtraction::Zero => 0,
            Subtraction::One => 1,
            Subtraction::Two => 2,
        }
    }
}

impl TryFrom<u32> for Subtraction {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        match p {
            0 => Ok(Subtraction::Zero),
            1 => Ok(Subtraction::One),
            2 => Ok(Subtraction::Two),
            _ => Err(Error::Domain(format!(
                "closed forms exist for p in {{0, 1, 2}}, got {p}"
            ))),
        }
    }
}

impl From<Subtraction> for u32 {
    fn from(p: Subtraction) -> u32 {
        p.count()
    }
}

impl std::fmt::Display for Subtraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.count())
    }
}

pub(crate) fn check_param(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
    }
    Ok(())
}

pub(crate) fn check_gain(g: f64) -> Result<()> {
    check_param("gain", g)?;
    if g > MAX_GAIN {
        return Err(Error::Range(format!("gain {g} exceeds {MAX_GAIN}")));
    }
    Ok(())
}

pub(crate) fn check_squeeze(r: f64) -> Result<()> {
    check_param("squeeze", r)?;
    if r > MAX_GAIN {
        return Err(Error::Range(format!("squeeze {r} exceeds {MAX_GAIN}")));
    }
    Ok(())
}

pub(crate) fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!("{name} overflowed")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subtraction_conversions() {
        for p in Subtraction::ALL {
            assert_eq!(Subtraction::try_from(p.count()).unwrap(), p);
        }
        assert!(matches!(Subtraction::try_from(3), Err(Error::Domain(_))));
    }

    #[test]
    fn gain_guard() {
        assert!(check_gain(12.0).is_ok());
        assert!(matches!(check_gain(12.5), Err(Error::Range(_))));
        assert!(matches!(check_gain(-0.1), Err(Error::Domain(_))));
        assert!(matches!(check_gain(f64::NAN), Err(Error::Domain(_))));
    }
}
