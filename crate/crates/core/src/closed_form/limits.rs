use serde::{Deserialize, Serialize};

use super::budget::{BudgetMode, BudgetSpec, ProbeParams};
use super::formulas::{n_inside, n_sq_inside, qfi_closed, qfi_closed_eta};
use super::Subtraction;
use crate::error::{Error, Result};

/// Quantum Cramér-Rao bound `1 / sqrt(m F)`.
pub fn qcrb(qfi: f64, m: u32) -> Result<f64> {
    if !(qfi.is_finite() && qfi > 0.0) {
        return Err(Error::Domain(format!("QFI must be > 0, got {qfi}")));
    }
    if m == 0 {
        return Err(Error::Domain("need at least one repeat".into()));
    }
    Ok(1.0 / (m as f64 * qfi).sqrt())
}

/// Which form of the Heisenberg limit to use for a probe with a fluctuating
/// photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `1 / (m <N>)`
    SmallM,
    /// `1 / sqrt(m <N^2>)`
    LargeM,
    /// `max[1 / sqrt(m <N^2>), 1 / (m <N>)]`
    Combined,
}

/// Heisenberg limit for `m` repeats of a probe with inside moments
/// `<N>` and `<N^2>`.
pub fn hl(mean: f64, mean_sq: f64, m: u32, regime: Regime) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("need at least one repeat".into()));
    }
    if !(mean.is_finite() && mean > 0.0 && mean_sq.is_finite() && mean_sq > 0.0) {
        return Err(Error::Domain(format!(
            "photon moments must be positive, got <N> = {mean}, <N^2> = {mean_sq}"
        )));
    }
    // allow rounding when the probe is number-definite
    if mean_sq < mean * mean * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "<N^2> = {mean_sq} below <N>^2 = {}",
            mean * mean
        )));
    }
    let m = m as f64;
    let small = 1.0 / (m * mean);
    let large = 1.0 / (m * mean_sq).sqrt();
    Ok(match regime {
        Regime::SmallM => small,
        Regime::LargeM => large,
        Regime::Combined => small.max(large),
    })
}

/// QFI of a path-symmetric Mach-Zehnder probe, `nbar (Q + 1)(1 - J)`.
pub fn mzi_qfi_symmetric(n_bar: f64, q: f64, j: f64) -> f64 {
    n_bar * (q + 1.0) * (1.0 - j)
}

/// Lower and upper bounds on the QFI from the per-arm photon statistics:
/// `n_a (Q_a + 1) + n_b (Q_b + 1)` and
/// `(sqrt(n_a (Q_a + 1)) + sqrt(n_b (Q_b + 1)))^2`.
pub fn qfi_bounds(mean_a: f64, q_a: f64, mean_b: f64, q_b: f64) -> (f64, f64) {
    let xa = (mean_a * (q_a + 1.0)).max(0.0);
    let xb = (mean_b * (q_b + 1.0)).max(0.0);
    (xa + xb, (xa.sqrt() + xb.sqrt()).powi(2))
}

/// QFI recomposed from means, Mandel parameters and the intermode
/// correlation.
pub fn qfi_from_correlations(mean_a: f64, q_a: f64, mean_b: f64, q_b: f64, j: f64) -> f64 {
    let xa = mean_a * (q_a + 1.0);
    let xb = mean_b * (q_b + 1.0);
    xa + xb + 2.0 * (xa * xb).max(0.0).sqrt() * j
}

/// Every sensitivity figure for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: Subtraction,
    pub alpha_mag: f64,
    pub squeeze_mag: f64,
    pub gain: f64,
    pub repeats: u32,
    pub qfi: f64,
    pub qcrb: f64,
    pub mean_inside: f64,
    pub mean_sq_inside: f64,
    pub hl_small_m: f64,
    pub hl_large_m: f64,
    pub hl_combined: f64,
}

impl BoundReport {
    pub fn evaluate(p: Subtraction, probe: ProbeParams, g: f64, m: u32) -> Result<Self> {
        let qfi = qfi_closed(p, probe.alpha_mag, probe.squeeze_mag, g)?;
        Self::assemble(p, probe, g, m, qfi)
    }

    /// Budget-parameterized point. Post-subtraction budgets take the QFI
    /// from the budget form.
    pub fn for_budget(budget: &BudgetSpec, g: f64, m: u32) -> Result<Self> {
        let probe = budget.resolve()?;
        let qfi = match budget.mode {
            BudgetMode::PostSubtraction => qfi_closed_eta(budget, g)?,
            BudgetMode::PreSubtraction => qfi_closed(budget.subtracted, probe.alpha_mag, probe.squeeze_mag, g)?,
        };
        Self::assemble(budget.subtracted, probe, g, m, qfi)
    }

    fn assemble(p: Subtraction, probe: ProbeParams, g: f64, m: u32, qfi: f64) -> Result<Self> {
        let mean = n_inside(p, probe.alpha_mag, probe.squeeze_mag, g)?;
        let mean_sq = n_sq_inside(p, probe.alpha_mag, probe.squeeze_mag, g)?;
        Ok(Self {
            p,
            alpha_mag: probe.alpha_mag,
            squeeze_mag: probe.squeeze_mag,
            gain: g,
            repeats: m,
            qfi,
            qcrb: qcrb(qfi, m)?,
            mean_inside: mean,
            mean_sq_inside: mean_sq,
            hl_small_m: hl(mean, mean_sq, m, Regime::SmallM)?,
            hl_large_m: hl(mean, mean_sq, m, Regime::LargeM)?,
            hl_combined: hl(mean, mean_sq, m, Regime::Combined)?,
        })
    }

    pub fn hl(&self, regime: Regime) -> f64 {
        match regime {
            Regime::SmallM => self.hl_small_m,
            Regime::LargeM => self.hl_large_m,
            Regime::Combined => self.hl_combined,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qcrb_values() {
        assert_eq!(qcrb(1.0, 4).unwrap(), 0.5);
        assert_eq!(qcrb(4.0, 1).unwrap(), 0.5);
        let f = qfi_closed(Subtraction::Zero, 0.0, 0.0, 1.0).unwrap();
        assert!((qcrb(f, 1).unwrap() - 1.0 / 2f64.sinh()).abs() < 1e-14);
        assert!((qcrb(f, 1).unwrap() - 0.275_720_564_771_783_2).abs() < 1e-14);
        assert!(qcrb(0.0, 1).is_err());
        assert!(qcrb(1.0, 0).is_err());
    }

    #[test]
    fn hl_regimes() {
        assert_eq!(hl(10.0, 100.0, 1, Regime::SmallM).unwrap(), 0.1);
        assert_eq!(hl(10.0, 100.0, 1, Regime::LargeM).unwrap(), 0.1);
        // number-definite probe recovers 1 / (sqrt(m) N)
        let n = 25.0;
        assert!((hl(n, n * n, 1, Regime::Combined).unwrap() - 1.0 / n).abs() < 1e-15);
        let m = 9;
        let combined = hl(n, n * n, m, Regime::Combined).unwrap();
        assert!((combined - 1.0 / (3.0 * n)).abs() < 1e-15);
        assert!(hl(0.0, 1.0, 1, Regime::SmallM).is_err());
        assert!(hl(10.0, 50.0, 1, Regime::SmallM).is_err());
    }

    #[test]
    fn mzi_values() {
        assert_eq!(mzi_qfi_symmetric(10.0, 0.0, 0.0), 10.0);
        assert_eq!(mzi_qfi_symmetric(10.0, 0.0, 1.0), 0.0);
        assert_eq!(mzi_qfi_symmetric(4.0, 2.0, -1.0), 24.0);
    }

    #[test]
    fn bounds_values() {
        assert_eq!(qfi_bounds(0.0, 0.0, 0.0, 0.0), (0.0, 0.0));
        let (lo, hi) = qfi_bounds(3.0, 0.7, 3.0, 0.7);
        assert!((hi - 2.0 * lo).abs() < 1e-12);
    }

    #[test]
    fn correlation_recomposition_spans_bounds() {
        let (lo, hi) = qfi_bounds(2.0, 0.5, 5.0, 1.5);
        assert!((qfi_from_correlations(2.0, 0.5, 5.0, 1.5, 0.0) - lo).abs() < 1e-12);
        assert!((qfi_from_correlations(2.0, 0.5, 5.0, 1.5, 1.0) - hi).abs() < 1e-12);
    }

    #[test]
    fn report_single_point() {
        let r = BoundReport::evaluate(Subtraction::Zero, ProbeParams::new(2.0, 0.0), 0.0, 1).unwrap();
        assert_eq!(r.qcrb, 0.5);
        assert_eq!(r.mean_inside, 4.0);
        assert!(r.hl_large_m <= r.hl_small_m * (r.repeats as f64).sqrt());
        assert!(r.mean_sq_inside >= r.mean_inside * r.mean_inside);
    }
}
