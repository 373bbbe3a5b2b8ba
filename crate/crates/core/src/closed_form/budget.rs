use serde::{Deserialize, Serialize};

use super::{nbar_from_sinh2, Subtraction};
use crate::error::{Error, Result};
use crate::roots::bisect;

/// Which photon count the budget fixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// `(N_in, eta)` fix the squeezed vacuum before subtraction:
    /// `sinh^2 r = eta N_in`, `|alpha|^2 = (1 - eta) N_in`.
    PreSubtraction,
    /// `(N_in, eta)` fix the subtracted state: `nbar_p = eta N_in`,
    /// `|alpha|^2 = (1 - eta) N_in`.
    PostSubtraction,
}

/// Coherent amplitude and squeeze magnitude of a probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub alpha_mag: f64,
    pub squeeze_mag: f64,
}

impl ProbeParams {
    pub fn new(alpha_mag: f64, squeeze_mag: f64) -> Self {
        Self {
            alpha_mag,
            squeeze_mag,
        }
    }

    pub fn sinh2(&self) -> f64 {
        self.squeeze_mag.sinh().powi(2)
    }
}

/// Photon budget split between the two input ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetSpec {
    pub total_mean: f64,
    pub squeeze_fraction: f64,
    pub subtracted: Subtraction,
    pub mode: BudgetMode,
}

impl BudgetSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.total_mean.is_finite() && self.total_mean > 0.0) {
            return Err(Error::Infeasible(format!(
                "total mean photon number must be > 0, got {}",
                self.total_mean
            )));
        }
        if !(0.0..=1.0).contains(&self.squeeze_fraction) {
            return Err(Error::Infeasible(format!(
                "squeezing fraction must lie in [0, 1], got {}",
                self.squeeze_fraction
            )));
        }
        Ok(())
    }

    /// Mean photon number carried by the squeezed port.
    pub fn squeezed_share(&self) -> f64 {
        self.squeeze_fraction * self.total_mean
    }

    /// `sinh^2 r` realizing this budget.
    pub fn sinh2(&self) -> Result<f64> {
        self.validate()?;
        let share = self.squeezed_share();
        match self.mode {
            BudgetMode::PreSubtraction => Ok(share),
            BudgetMode::PostSubtraction => invert_mean(self.subtracted, share),
        }
    }

    pub fn resolve(&self) -> Result<ProbeParams> {
        let s = self.sinh2()?;
        let alpha2 = ((1.0 - self.squeeze_fraction) * self.total_mean).max(0.0);
        Ok(ProbeParams {
            alpha_mag: alpha2.sqrt(),
            squeeze_mag: s.sqrt().asinh(),
        })
    }

    /// Smallest squeezing fraction realizable in this mode.
    pub fn feasibility_floor(total_mean: f64, subtracted: Subtraction, mode: BudgetMode) -> f64 {
        match (mode, subtracted) {
            (BudgetMode::PostSubtraction, Subtraction::One) => (1.0 / total_mean).min(1.0),
            _ => 0.0,
        }
    }
}

/// Root of `3S(5S + 3)/(3S + 1) = x`, i.e. the `sinh^2 r` whose
/// two-photon-subtracted squeezed vacuum carries `x` photons:
/// `S = (x - 3 + sqrt(x^2 + 2x/3 + 9)) / 10`.
///
/// For `x < 3` the equivalent form `(2x/3) / (sqrt(...) - x + 3)` avoids
/// cancellation.
pub fn s_root(x: f64) -> f64 {
    let disc = (x * x + 2.0 * x / 3.0 + 9.0).sqrt();
    if x >= 3.0 {
        (x - 3.0 + disc) / 10.0
    } else {
        (2.0 * x / 3.0) / (disc - x + 3.0)
    }
}

/// Relative slack allowed when a requested mean sits at the edge of the
/// feasible range.
const EDGE_SLACK: f64 = 1e-12;

/// `sinh^2 r` such that the p-subtracted squeezed vacuum has mean `target`.
pub fn invert_mean(p: Subtraction, target: f64) -> Result<f64> {
    if !(target.is_finite() && target >= 0.0) {
        return Err(Error::Infeasible(format!("mean photon number {target} is not >= 0")));
    }
    let floor = nbar_from_sinh2(p, 0.0);
    if target < floor * (1.0 - EDGE_SLACK) {
        return Err(Error::Infeasible(format!(
            "a {p}-photon-subtracted squeezed vacuum carries at least {floor} photon(s), requested {target}"
        )));
    }
    let analytic = match p {
        Subtraction::Zero => target,
        Subtraction::One => (target - 1.0) / 3.0,
        Subtraction::Two => s_root(target),
    }
    .max(0.0);

    let residual = |s: f64| nbar_from_sinh2(p, s) - target;
    let scale = target.max(1.0);
    if analytic.is_finite() && residual(analytic).abs() <= 1e-12 * scale {
        return Ok(analytic);
    }
    // nbar_p is increasing in sinh^2 r and nbar_p(s) >= s
    if residual(0.0) >= 0.0 {
        return Ok(0.0);
    }
    bisect(residual, 0.0, target.max(1.0), 1e-12 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(eta: f64, n: f64, p: Subtraction, mode: BudgetMode) -> BudgetSpec {
        BudgetSpec {
            total_mean: n,
            squeeze_fraction: eta,
            subtracted: p,
            mode,
        }
    }

    #[test]
    fn s_root_at_six_is_one() {
        assert!((s_root(6.0) - 1.0).abs() < 1e-15);
        let s = s_root(6.0);
        assert!((3.0 * s * (5.0 * s + 3.0) / (3.0 * s + 1.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn s_root_small_argument_is_stable() {
        for x in [1e-12, 1e-8, 1e-3, 0.5, 2.999, 3.0, 3.001, 1e4, 1e9] {
            let s = s_root(x);
            let back = 3.0 * s * (5.0 * s + 3.0) / (3.0 * s + 1.0);
            assert!(((back - x) / x).abs() < 1e-13, "x = {x}: {back}");
        }
        assert_eq!(s_root(0.0), 0.0);
    }

    #[test]
    fn single_subtraction_inversion() {
        let b = budget(0.02, 200.0, Subtraction::One, BudgetMode::PostSubtraction);
        assert!((b.sinh2().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn infeasible_single_subtraction() {
        let b = budget(0.004, 200.0, Subtraction::One, BudgetMode::PostSubtraction);
        assert!(matches!(b.sinh2(), Err(Error::Infeasible(_))));
        // exactly at the floor
        let b = budget(1.0 / 200.0, 200.0, Subtraction::One, BudgetMode::PostSubtraction);
        assert_eq!(b.sinh2().unwrap(), 0.0);
    }

    #[test]
    fn pre_subtraction_split() {
        let b = budget(0.25, 200.0, Subtraction::Two, BudgetMode::PreSubtraction);
        let probe = b.resolve().unwrap();
        assert!((probe.sinh2() - 50.0).abs() < 1e-12);
        assert!((probe.alpha_mag.powi(2) - 150.0).abs() < 1e-12);
    }

    #[test]
    fn budget_validation() {
        assert!(budget(1.2, 10.0, Subtraction::Zero, BudgetMode::PreSubtraction).validate().is_err());
        assert!(budget(0.5, 0.0, Subtraction::Zero, BudgetMode::PreSubtraction).validate().is_err());
        assert!(budget(0.5, f64::NAN, Subtraction::Zero, BudgetMode::PreSubtraction).validate().is_err());
    }

    #[test]
    fn inversion_round_trips() {
        for p in Subtraction::ALL {
            for target in [1.0, 1.5, 4.0, 37.0, 200.0] {
                let s = invert_mean(p, target).unwrap();
                let back = nbar_from_sinh2(p, s);
                assert!(((back - target) / target).abs() < 1e-12, "p = {p}, target = {target}");
            }
        }
    }

    #[test]
    fn floors() {
        assert_eq!(BudgetSpec::feasibility_floor(200.0, Subtraction::One, BudgetMode::PostSubtraction), 0.005);
        assert_eq!(BudgetSpec::feasibility_floor(200.0, Subtraction::Two, BudgetMode::PostSubtraction), 0.0);
        assert_eq!(BudgetSpec::feasibility_floor(200.0, Subtraction::One, BudgetMode::PreSubtraction), 0.0);
    }
}
