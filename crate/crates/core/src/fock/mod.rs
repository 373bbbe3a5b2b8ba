//! Truncated Fock-space oracle.
//!
//! States are dense amplitude arrays over `dims` photon-number levels per
//! mode; two-mode states are stored row-major with index `n_a * dims + n_b`.
//! Every quantity the closed forms predict can be extracted from these
//! arrays by direct probability-weighted sums.

mod evolve;
mod states;
mod stats;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use evolve::{apply_nbs, exp_action, phase_shift, Generator, SeriesOptions, TwoModeSqueezeGenerator};
pub use states::{coherent_state, squeezed_vacuum_state, subtract_photons, tensor_product};
pub use stats::{moments, one_mode_stats, qfi_via_derivative, MomentSet, OneModeStats};

/// Default probability allowed in the top decile of Fock levels.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

/// Complex amplitudes of a one- or two-mode state on a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    modes: usize,
    dims: usize,
    amps: Vec<C64>,
    tail_mass: f64,
}

impl FockVector {
    pub fn one_mode(amps: Vec<C64>) -> Result<Self> {
        Self::new(1, amps.len(), amps)
    }

    pub fn two_mode(dims: usize, amps: Vec<C64>) -> Result<Self> {
        Self::new(2, dims, amps)
    }

    pub fn vacuum(modes: usize, dims: usize) -> Result<Self> {
        if !(1..=2).contains(&modes) {
            return Err(Error::Dimension(format!("unsupported mode count {modes}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dims.pow(modes as u32)];
        if let Some(a) = amps.first_mut() {
            *a = C64::new(1.0, 0.0);
        }
        Self::new(modes, dims, amps)
    }

    fn new(modes: usize, dims: usize, amps: Vec<C64>) -> Result<Self> {
        if dims < 2 {
            return Err(Error::Dimension(format!("need dims >= 2, got {dims}")));
        }
        if amps.len() != dims.pow(modes as u32) {
            return Err(Error::Dimension(format!(
                "{} amplitudes do not fill a {modes}-mode basis of dims {dims}",
                amps.len()
            )));
        }
        let tail_mass = tail_mass(modes, dims, &amps);
        Ok(Self {
            modes,
            dims,
            amps,
            tail_mass,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Truncation dimension per mode.
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of `|n_a, n_b>` in a two-mode state.
    pub fn amp2(&self, n_a: usize, n_b: usize) -> C64 {
        debug_assert_eq!(self.modes, 2);
        self.amps[n_a * self.dims + n_b]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability carried by the top 10% of Fock levels of either mode.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_truncation_safe(&self, tolerance: f64) -> bool {
        self.tail_mass < tolerance
    }

    pub fn ensure_truncation_safe(&self, tolerance: f64) -> Result<()> {
        if self.is_truncation_safe(tolerance) {
            Ok(())
        } else {
            Err(Error::TruncationUnsafe {
                tail_mass: self.tail_mass,
                tolerance,
                dims: self.dims,
            })
        }
    }

    pub(crate) fn expect_modes(&self, expected: usize) -> Result<()> {
        if self.modes == expected {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                expected,
                found: self.modes,
            })
        }
    }

    /// Rescales to unit norm. Fails on a zero vector.
    pub(crate) fn normalized(modes: usize, dims: usize, mut amps: Vec<C64>) -> Option<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return None;
        }
        let inv = 1.0 / norm;
        amps.iter_mut().for_each(|a| *a *= inv);
        Self::new(modes, dims, amps).ok()
    }
}

/// First level of the top decile.
fn tail_start(dims: usize) -> usize {
    dims - dims.div_ceil(10)
}

fn tail_mass(modes: usize, dims: usize, amps: &[C64]) -> f64 {
    let start = tail_start(dims);
    match modes {
        1 => amps[start..].iter().map(|a| a.norm_sqr()).sum(),
        _ => amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i / dims >= start || i % dims >= start)
            .map(|(_, a)| a.norm_sqr())
            .sum(),
    }
}

/// Preparation of the two input ports: `|alpha>_a (x) b^p |0, zeta>_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub alpha_mag: f64,
    pub alpha_phase: f64,
    pub squeeze_mag: f64,
    pub squeeze_phase: f64,
    pub subtracted: u32,
}

impl InputSpec {
    /// Input with the squeeze phase chosen so that `condition` holds for the
    /// given coherent and pump phases.
    pub fn with_condition(
        alpha_mag: f64,
        alpha_phase: f64,
        squeeze_mag: f64,
        subtracted: u32,
        pump_phase: f64,
        condition: PhaseCondition,
    ) -> Self {
        Self {
            alpha_mag,
            alpha_phase,
            squeeze_mag,
            squeeze_phase: condition.squeeze_phase(alpha_phase, pump_phase),
            subtracted,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_mag", self.alpha_mag),
            ("squeeze_mag", self.squeeze_mag),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.alpha_phase.is_finite() && self.squeeze_phase.is_finite()) {
            return Err(Error::Domain("phases must be finite".into()));
        }
        if self.subtracted > 0 && self.squeeze_mag == 0.0 {
            return Err(Error::ZeroNorm {
                subtracted: self.subtracted,
            });
        }
        Ok(())
    }
}

/// First nonlinear beam splitter: gain `g` and pump phase `theta_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbsSpec {
    pub gain: f64,
    pub pump_phase: f64,
}

impl NbsSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain.is_finite() && self.gain >= 0.0) {
            return Err(Error::Domain(format!("gain must be finite and >= 0, got {}", self.gain)));
        }
        if !self.pump_phase.is_finite() {
            return Err(Error::Domain("pump phase must be finite".into()));
        }
        Ok(())
    }
}

/// Relations between the squeeze, coherent and pump phases under which the
/// analytic forms are stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseCondition {
    /// `theta_s + 2 theta_a - 2 theta_1 = pi`, which maximizes the QFI.
    MaximalQfi,
    /// `theta_s + theta_a - theta_1 = pi`, the condition quoted alongside the
    /// second-moment formulas.
    SecondMomentStated,
}

impl PhaseCondition {
    pub fn squeeze_phase(self, alpha_phase: f64, pump_phase: f64) -> f64 {
        let raw = match self {
            PhaseCondition::MaximalQfi => PI - 2.0 * alpha_phase + 2.0 * pump_phase,
            PhaseCondition::SecondMomentStated => PI - alpha_phase + pump_phase,
        };
        raw.rem_euclid(TAU)
    }
}

/// Truncation and series controls for oracle runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Starting truncation per mode.
    pub dims: usize,
    /// Largest truncation tried before a point is declared truncation-unsafe.
    pub max_dims: usize,
    pub tail_tolerance: f64,
    pub series: SeriesOptions,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dims: 48,
            max_dims: 384,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            series: SeriesOptions::default(),
        }
    }
}

/// Builds `|alpha>_a (x) |p, zeta>_b` at truncation `dims`.
pub fn input_state(input: &InputSpec, dims: usize) -> Result<FockVector> {
    input.validate()?;
    let a = coherent_state(input.alpha_mag, input.alpha_phase, dims)?;
    let b = squeezed_vacuum_state(input.squeeze_mag, input.squeeze_phase, dims)?;
    let b = subtract_photons(&b, input.subtracted)?;
    tensor_product(&a, &b)
}

/// A converged post-NBS state and the truncation that produced it.
#[derive(Debug, Clone)]
pub struct OracleState {
    /// Input to the first NBS.
    pub input: FockVector,
    /// State just after the first NBS.
    pub state: FockVector,
    pub dims: usize,
}

/// Prepares the input, applies the first NBS and checks truncation safety,
/// enlarging the basis by 25% per attempt until both the input and the output
/// tail masses fall below `config.tail_tolerance`.
pub fn converged_state(input: &InputSpec, nbs: &NbsSpec, config: &OracleConfig) -> Result<OracleState> {
    input.validate()?;
    nbs.validate()?;
    let mut dims = config.dims.max(2);
    loop {
        let attempt = input_state(input, dims).and_then(|prepared| {
            prepared.ensure_truncation_safe(config.tail_tolerance)?;
            let state = apply_nbs(&prepared, nbs, &config.series)?;
            state.ensure_truncation_safe(config.tail_tolerance)?;
            Ok(OracleState {
                input: prepared,
                state,
                dims,
            })
        });
        match attempt {
            Err(Error::TruncationUnsafe { .. }) if dims < config.max_dims => {
                dims = (dims + dims.div_ceil(4)).min(config.max_dims);
            }
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_band_is_top_decile() {
        assert_eq!(tail_start(20), 18);
        assert_eq!(tail_start(48), 43);
        assert_eq!(tail_start(2), 1);
    }

    #[test]
    fn vacuum_has_no_tail() {
        let v = FockVector::vacuum(2, 10).unwrap();
        assert_eq!(v.tail_mass(), 0.0);
        assert_eq!(v.norm_sqr(), 1.0);
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(matches!(
            FockVector::two_mode(4, vec![C64::new(0.0, 0.0); 15]),
            Err(Error::Dimension(_))
        ));
        assert!(FockVector::one_mode(vec![C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn subtraction_from_vacuum_is_rejected_upfront() {
        let input = InputSpec {
            alpha_mag: 1.0,
            alpha_phase: 0.0,
            squeeze_mag: 0.0,
            squeeze_phase: 0.0,
            subtracted: 1,
        };
        assert_eq!(input.validate(), Err(Error::ZeroNorm { subtracted: 1 }));
    }

    #[test]
    fn phase_conditions_hold() {
        // distance from zero on the circle
        let wrapped = |x: f64| ((x + PI).rem_euclid(TAU) - PI).abs();
        let (ta, t1) = (0.7, 0.3);
        let s = PhaseCondition::MaximalQfi.squeeze_phase(ta, t1);
        assert!(wrapped(s + 2.0 * ta - 2.0 * t1 - PI) < 1e-12);
        let s = PhaseCondition::SecondMomentStated.squeeze_phase(ta, t1);
        assert!(wrapped(s + ta - t1 - PI) < 1e-12);
    }

    #[test]
    fn converged_state_grows_basis() {
        let input = InputSpec::with_condition(1.0, 0.0, 0.5, 1, 0.0, PhaseCondition::MaximalQfi);
        let nbs = NbsSpec {
            gain: 0.5,
            pump_phase: 0.0,
        };
        let cfg = OracleConfig {
            dims: 8,
            ..Default::default()
        };
        let out = converged_state(&input, &nbs, &cfg).unwrap();
        assert!(out.dims > 8);
        assert!(out.state.is_truncation_safe(cfg.tail_tolerance));
    }

    #[test]
    fn converged_state_reports_cap() {
        let input = InputSpec::with_condition(1.0, 0.0, 0.8, 2, 0.0, PhaseCondition::MaximalQfi);
        let nbs = NbsSpec {
            gain: 0.8,
            pump_phase: 0.0,
        };
        let cfg = OracleConfig {
            dims: 10,
            max_dims: 20,
            ..Default::default()
        };
        assert!(matches!(
            converged_state(&input, &nbs, &cfg),
            Err(Error::TruncationUnsafe { dims: 20, .. })
        ));
    }
}
