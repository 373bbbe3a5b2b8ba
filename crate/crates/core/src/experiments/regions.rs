use serde::{Deserialize, Serialize};

use crate::closed_form::{BoundReport, BudgetMode, BudgetSpec, Regime, Subtraction};
use crate::error::{Error, Result};
use crate::roots::{bisect, scan_sign_changes};

/// Coarse scan and bisection settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOptions {
    /// Scan samples across the feasible eta range; at least 200.
    pub samples: usize,
    /// Bisection width in eta.
    pub tolerance: f64,
    pub mode: BudgetMode,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        Self {
            samples: 401,
            tolerance: 1e-10,
            mode: BudgetMode::PreSubtraction,
        }
    }
}

/// Squeezing fractions where `qcrb - hl` changes sign at fixed gain and
/// budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBoundary {
    pub p: Subtraction,
    pub g: f64,
    pub total_mean: f64,
    pub regime: Regime,
    /// Single lower boundary with the limit beaten above it.
    pub eta_c: Option<f64>,
    /// Lower edge of a beaten window.
    pub eta_l: Option<f64>,
    /// Upper edge of a beaten window.
    pub eta_u: Option<f64>,
    /// Every sign change found, ascending.
    pub crossings: Vec<f64>,
    /// `|qcrb - hl|` at each crossing.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
}

impl RegionBoundary {
    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// `qcrb - hl` as a function of the squeezing fraction; NaN where the
/// budget is not realizable.
pub fn difference_at(p: Subtraction, g: f64, total_mean: f64, m: u32, regime: Regime, mode: BudgetMode, eta: f64) -> f64 {
    let budget = BudgetSpec {
        total_mean,
        squeeze_fraction: eta,
        subtracted: p,
        mode,
    };
    BoundReport::for_budget(&budget, g, m)
        .map(|r| r.qcrb - r.hl(regime))
        .unwrap_or(f64::NAN)
}

/// Locates every sign change of `qcrb - hl` over the feasible eta range and
/// classifies the pattern. A lone falling crossing is reported as `eta_c`; a
/// falling crossing followed by a rising one as `(eta_l, eta_u)`.
pub fn find_boundaries(
    p: Subtraction,
    g: f64,
    total_mean: f64,
    m: u32,
    regime: Regime,
    opts: &BoundaryOptions,
) -> Result<RegionBoundary> {
    if opts.samples < 200 {
        return Err(Error::InvalidSpec(format!(
            "boundary scan needs at least 200 samples, got {}",
            opts.samples
        )));
    }
    if !(opts.tolerance.is_finite() && opts.tolerance > 0.0) {
        return Err(Error::InvalidSpec(format!("bad bisection tolerance {}", opts.tolerance)));
    }
    // surfaces bad gain, budget or repeat count
    let top = BudgetSpec {
        total_mean,
        squeeze_fraction: 1.0,
        subtracted: p,
        mode: opts.mode,
    };
    BoundReport::for_budget(&top, g, m)?;

    let floor = BudgetSpec::feasibility_floor(total_mean, p, opts.mode);
    let f = |eta: f64| difference_at(p, g, total_mean, m, regime, opts.mode, eta);
    let brackets = scan_sign_changes(f, floor, 1.0, opts.samples);

    let mut crossings = Vec::with_capacity(brackets.len());
    for b in &brackets {
        crossings.push(bisect(f, b.lo, b.hi, opts.tolerance)?);
    }
    let residuals = crossings.iter().map(|&x| f(x).abs()).collect();

    let falling: Vec<bool> = brackets.iter().map(|b| b.falling).collect();
    let (mut eta_c, mut eta_l, mut eta_u) = (None, None, None);
    match falling[..] {
        [true] => eta_c = Some(crossings[0]),
        [true, false] => {
            eta_l = Some(crossings[0]);
            eta_u = Some(crossings[1]);
        }
        _ => {}
    }
    Ok(RegionBoundary {
        p,
        g,
        total_mean,
        regime,
        eta_c,
        eta_l,
        eta_u,
        crossings,
        residuals,
        tolerance: opts.tolerance,
    })
}
