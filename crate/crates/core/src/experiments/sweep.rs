use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{BoundReport, BudgetMode, BudgetSpec, ProbeParams, Regime, Subtraction};
use crate::error::{Error, Result};

/// A parameter that a sweep axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Gain,
    /// Squeezing fraction of a photon budget.
    Eta,
    /// Total mean input photon number of a photon budget.
    TotalMean,
    /// Coherent amplitude `|alpha|`.
    Alpha,
    /// Squeeze magnitude `r`.
    Squeeze,
}

impl Param {
    fn needs_budget(self) -> Option<bool> {
        match self {
            Param::Gain => None,
            Param::Eta | Param::TotalMean => Some(true),
            Param::Alpha | Param::Squeeze => Some(false),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::Gain => "g",
            Param::Eta => "eta",
            Param::TotalMean => "N_in",
            Param::Alpha => "alpha",
            Param::Squeeze => "r",
        })
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" | "gain" => Ok(Param::Gain),
            "eta" => Ok(Param::Eta),
            "N_in" | "n_in" | "total_mean" => Ok(Param::TotalMean),
            "alpha" => Ok(Param::Alpha),
            "r" | "squeeze" => Ok(Param::Squeeze),
            _ => Err(Error::InvalidSpec(format!("unknown sweep parameter '{s}'"))),
        }
    }
}

/// Evenly spaced samples of one parameter, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: Param, start: f64, end: f64, count: usize) -> Self {
        Self {
            param,
            start,
            end,
            count,
        }
    }

    /// A one-sample axis.
    pub fn point(param: Param, value: f64) -> Self {
        Self::new(param, value, value, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(Error::InvalidSpec(format!("axis {} has a non-finite range", self.param)));
        }
        match self.count {
            0 => Err(Error::InvalidSpec(format!("axis {} has no samples", self.param))),
            1 if self.start != self.end => Err(Error::InvalidSpec(format!(
                "axis {} needs at least 2 samples to span [{}, {}]",
                self.param, self.start, self.end
            ))),
            _ => Ok(()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.end
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// How the input state is specified at points where no axis overrides it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Probe {
    Direct { alpha: f64, squeeze: f64 },
    Budget { total_mean: f64, eta: f64, mode: BudgetMode },
}

impl Probe {
    fn is_budget(&self) -> bool {
        matches!(self, Probe::Budget { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub probe: Probe,
    /// Gain used when no axis varies it.
    pub gain: f64,
    pub repeats: u32,
    pub orders: Vec<Subtraction>,
    /// Heisenberg limit subtracted in the `diff` column.
    pub regime: Regime,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() {
            return Err(Error::InvalidSpec("no subtraction orders requested".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidSpec("repeats must be >= 1".into()));
        }
        let axes: Vec<&Axis> = std::iter::once(&self.axis1).chain(self.axis2.as_ref()).collect();
        for axis in &axes {
            axis.validate()?;
            if let Some(budget) = axis.param.needs_budget() {
                if budget != self.probe.is_budget() {
                    return Err(Error::InvalidSpec(format!(
                        "axis {} does not apply to a {} probe",
                        axis.param,
                        if self.probe.is_budget() { "budget" } else { "direct" }
                    )));
                }
            }
        }
        if let [a, b] = axes[..] {
            if a.param == b.param {
                return Err(Error::InvalidSpec(format!("axis {} given twice", a.param)));
            }
        }
        Ok(())
    }

    /// Smallest feasible squeezing fraction for order `p`, when the probe is
    /// a budget with a fixed total.
    pub fn feasibility_floor(&self, p: Subtraction) -> Option<f64> {
        match self.probe {
            Probe::Budget { total_mean, mode, .. } if total_mean > 0.0 => {
                Some(BudgetSpec::feasibility_floor(total_mean, p, mode))
            }
            _ => None,
        }
    }

    fn evaluate(&self, x1: f64, x2: Option<f64>, p: Subtraction) -> Result<SweepRow> {
        let mut probe = self.probe;
        let mut gain = self.gain;
        let overrides = std::iter::once((self.axis1.param, x1)).chain(self.axis2.map(|a| a.param).zip(x2));
        for (param, v) in overrides {
            match (param, &mut probe) {
                (Param::Gain, _) => gain = v,
                (Param::Eta, Probe::Budget { eta, .. }) => *eta = v,
                (Param::TotalMean, Probe::Budget { total_mean, .. }) => *total_mean = v,
                (Param::Alpha, Probe::Direct { alpha, .. }) => *alpha = v,
                (Param::Squeeze, Probe::Direct { squeeze, .. }) => *squeeze = v,
                _ => unreachable!("checked by validate"),
            }
        }
        let report = match probe {
            Probe::Direct { alpha, squeeze } => {
                BoundReport::evaluate(p, ProbeParams::new(alpha, squeeze), gain, self.repeats)
            }
            Probe::Budget { total_mean, eta, mode } => BoundReport::for_budget(
                &BudgetSpec {
                    total_mean,
                    squeeze_fraction: eta,
                    subtracted: p,
                    mode,
                },
                gain,
                self.repeats,
            ),
        };
        match report {
            Ok(r) => Ok(SweepRow::from_report(x1, x2, &r, self.regime)),
            // degenerate or unrealizable inputs
            Err(Error::Infeasible(_)) | Err(Error::Domain(_)) => Ok(SweepRow::infeasible(x1, x2, p)),
            Err(e) => Err(e),
        }
    }
}

/// One grid point for one subtraction order. Every numeric field is `None`
/// exactly when `feasible` is false.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub p: Subtraction,
    pub feasible: bool,
    pub qfi: Option<f64>,
    pub qcrb: Option<f64>,
    pub mean_inside: Option<f64>,
    pub mean_sq_inside: Option<f64>,
    pub hl_small: Option<f64>,
    pub hl_large: Option<f64>,
    /// `qcrb - hl` for the spec's regime; negative where the limit is beaten.
    pub diff: Option<f64>,
}

impl SweepRow {
    fn from_report(axis1: f64, axis2: Option<f64>, r: &BoundReport, regime: Regime) -> Self {
        Self {
            axis1,
            axis2,
            p: r.p,
            feasible: true,
            qfi: Some(r.qfi),
            qcrb: Some(r.qcrb),
            mean_inside: Some(r.mean_inside),
            mean_sq_inside: Some(r.mean_sq_inside),
            hl_small: Some(r.hl_small_m),
            hl_large: Some(r.hl_large_m),
            diff: Some(r.qcrb - r.hl(regime)),
        }
    }

    fn infeasible(axis1: f64, axis2: Option<f64>, p: Subtraction) -> Self {
        Self {
            axis1,
            axis2,
            p,
            feasible: false,
            qfi: None,
            qcrb: None,
            mean_inside: None,
            mean_sq_inside: None,
            hl_small: None,
            hl_large: None,
            diff: None,
        }
    }
}

/// Evaluates every grid point for every requested order. Rows come out
/// axis1-major, then axis2, then in the order of `spec.orders`.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let xs1 = spec.axis1.values();
    let xs2: Vec<Option<f64>> = match &spec.axis2 {
        Some(a) => a.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let jobs: Vec<(f64, Option<f64>, Subtraction)> = xs1
        .iter()
        .flat_map(|&x1| {
            xs2.iter()
                .flat_map(move |&x2| spec.orders.iter().map(move |&p| (x1, x2, p)))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(x1, x2, p)| spec.evaluate(x1, x2, p))
        .collect()
}

/// Two-axis sweep recording `qcrb - hl` for `regime`.
pub fn difference_map(spec: &SweepSpec, regime: Regime) -> Result<Vec<SweepRow>> {
    if spec.axis2.is_none() {
        return Err(Error::InvalidSpec("a difference map needs two axes".into()));
    }
    sweep(&SweepSpec {
        regime,
        ..spec.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget_spec(axis1: Axis, axis2: Option<Axis>, mode: BudgetMode) -> SweepSpec {
        SweepSpec {
            axis1,
            axis2,
            probe: Probe::Budget {
                total_mean: 200.0,
                eta: 0.5,
                mode,
            },
            gain: 3.0,
            repeats: 1,
            orders: Subtraction::ALL.to_vec(),
            regime: Regime::SmallM,
        }
    }

    #[test]
    fn axis_values_hit_endpoints() {
        let v = Axis::new(Param::Eta, 0.0, 1.0, 201).values();
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[200], 1.0);
        assert_eq!(Axis::point(Param::Gain, 0.3).values(), vec![0.3]);
        assert!(Axis::new(Param::Gain, 0.0, 1.0, 1).validate().is_err());
        assert!(Axis::new(Param::Gain, 0.0, f64::NAN, 5).validate().is_err());
    }

    #[test]
    fn param_names_round_trip() {
        for p in [Param::Gain, Param::Eta, Param::TotalMean, Param::Alpha, Param::Squeeze] {
            assert_eq!(p.to_string().parse::<Param>().unwrap(), p);
        }
        assert!("zeta".parse::<Param>().is_err());
    }

    #[test]
    fn single_point_coherent() {
        let spec = SweepSpec {
            axis1: Axis::point(Param::Gain, 0.0),
            axis2: None,
            probe: Probe::Direct { alpha: 2.0, squeeze: 0.0 },
            gain: 0.0,
            repeats: 1,
            orders: vec![Subtraction::Zero],
            regime: Regime::SmallM,
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].qcrb, Some(0.5));
    }

    #[test]
    fn rejects_mismatched_axis() {
        let mut spec = budget_spec(Axis::new(Param::Alpha, 0.0, 1.0, 3), None, BudgetMode::PreSubtraction);
        assert!(matches!(sweep(&spec), Err(Error::InvalidSpec(_))));
        spec.axis1 = Axis::new(Param::Eta, 0.0, 1.0, 3);
        spec.axis2 = Some(Axis::new(Param::Eta, 0.0, 1.0, 3));
        assert!(matches!(sweep(&spec), Err(Error::InvalidSpec(_))));
        spec.axis2 = None;
        spec.orders.clear();
        assert!(matches!(sweep(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn ordering_is_axis1_major() {
        let spec = budget_spec(
            Axis::new(Param::Eta, 0.1, 0.9, 3),
            Some(Axis::new(Param::Gain, 0.0, 1.0, 2)),
            BudgetMode::PreSubtraction,
        );
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 3 * 2 * 3);
        let keys: Vec<(f64, f64, u32)> = rows.iter().map(|r| (r.axis1, r.axis2.unwrap(), r.p.count())).collect();
        assert_eq!(keys[0], (0.1, 0.0, 0));
        assert_eq!(keys[2], (0.1, 0.0, 2));
        assert_eq!(keys[3], (0.1, 1.0, 0));
        assert_eq!(keys[6], (0.5, 0.0, 0));
        assert_eq!(sweep(&spec).unwrap(), rows);
    }

    #[test]
    fn infeasible_points_are_marked() {
        let spec = budget_spec(Axis::new(Param::Eta, 0.0, 0.01, 3), None, BudgetMode::PostSubtraction);
        let rows = sweep(&spec).unwrap();
        let one: Vec<&SweepRow> = rows.iter().filter(|r| r.p == Subtraction::One).collect();
        assert!(!one[0].feasible && one[0].qcrb.is_none() && one[0].diff.is_none());
        assert!(one[2].feasible);
        assert_eq!(spec.feasibility_floor(Subtraction::One), Some(0.005));
        // zero total budget
        let spec = budget_spec(Axis::new(Param::TotalMean, 0.0, 200.0, 3), None, BudgetMode::PreSubtraction);
        let rows = sweep(&spec).unwrap();
        assert!(rows[..3].iter().all(|r| !r.feasible));
        assert!(rows[3..].iter().all(|r| r.feasible));
    }

    #[test]
    fn coherent_row_of_difference_map() {
        // g = 0, eta = 0: shot noise 1/|alpha| against 1/|alpha|^2
        let spec = budget_spec(
            Axis::point(Param::Eta, 0.0),
            Some(Axis::point(Param::Gain, 0.0)),
            BudgetMode::PreSubtraction,
        );
        let rows = difference_map(&spec, Regime::SmallM).unwrap();
        let d = rows[0].diff.unwrap();
        let a = 200f64.sqrt();
        assert!((d - (1.0 / a - 1.0 / (a * a))).abs() < 1e-15);
        assert!(d > 0.0);
        assert!(difference_map(&SweepSpec { axis2: None, ..spec }, Regime::SmallM).is_err());
    }
}
