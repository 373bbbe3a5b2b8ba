//! Action of `exp(t G)` on a state vector for a sparse anti-Hermitian
//! generator `G`, by Taylor series on short segments.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::FockVector;
use crate::error::{Error, Result};
use crate::fock::NbsSpec;

/// A linear operator that can be applied to a flat amplitude vector.
pub trait Generator {
    fn dim(&self) -> usize;

    /// Upper bound on the operator 2-norm over the truncated space.
    fn norm_bound(&self) -> f64;

    /// `y = G x`. `y` is overwritten.
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    /// Target accuracy of the full propagation, relative to the state norm.
    pub tolerance: f64,
    /// Most Taylor terms allowed in any single segment.
    pub max_terms: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_terms: 10_000,
        }
    }
}

/// Largest `|t| * ||G||` handled by one Taylor segment.
const SEGMENT_NORM: f64 = 2.0;

/// Computes `exp(t G) psi`.
///
/// The interval is cut into segments with `|t| ||G|| / segments <= 2`, so each
/// Taylor series has monotonically shrinking terms and no cancellation. A
/// segment stops once a term falls below `tolerance / segments` of the running
/// sum.
pub fn exp_action<G: Generator + ?Sized>(
    gen: &G,
    t: f64,
    psi: &[C64],
    opts: &SeriesOptions,
) -> Result<Vec<C64>> {
    let n = gen.dim();
    if psi.len() != n {
        return Err(Error::Dimension(format!(
            "generator acts on {n} amplitudes, state has {}",
            psi.len()
        )));
    }
    if t == 0.0 {
        return Ok(psi.to_vec());
    }
    let scale = t.abs() * gen.norm_bound();
    let segments = ((scale / SEGMENT_NORM).ceil() as usize).max(1);
    let h = t / segments as f64;
    let seg_tol = opts.tolerance / segments as f64;

    let mut acc = psi.to_vec();
    let mut term = vec![C64::new(0.0, 0.0); n];
    let mut next = vec![C64::new(0.0, 0.0); n];
    for _ in 0..segments {
        term.copy_from_slice(&acc);
        let acc_norm = norm(&acc);
        let mut converged = false;
        for k in 1..=opts.max_terms {
            gen.apply(&term, &mut next);
            let c = h / k as f64;
            for (dst, src) in term.iter_mut().zip(&next) {
                *dst = src * c;
            }
            for (a, dt) in acc.iter_mut().zip(&term) {
                *a += dt;
            }
            let term_norm = norm(&term);
            if term_norm <= seg_tol * acc_norm {
                converged = true;
                break;
            }
            if !term_norm.is_finite() {
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                iterations: opts.max_terms,
            });
        }
    }
    Ok(acc)
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `e^{i theta} a†b† - e^{-i theta} a b` on a two-mode basis of `dims` levels
/// per mode.
#[derive(Debug, Clone, Copy)]
pub struct TwoModeSqueezeGenerator {
    pub dims: usize,
    pub phase: f64,
}

impl Generator for TwoModeSqueezeGenerator {
    fn dim(&self) -> usize {
        self.dims * self.dims
    }

    fn norm_bound(&self) -> f64 {
        // tridiagonal within each n_a - n_b sector, couplings <= dims - 1
        2.0 * (self.dims - 1) as f64
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let d = self.dims;
        let up = C64::from_polar(1.0, self.phase);
        let down = up.conj();
        for na in 0..d {
            for nb in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                if na > 0 && nb > 0 {
                    acc += up * x[(na - 1) * d + nb - 1] * ((na * nb) as f64).sqrt();
                }
                if na + 1 < d && nb + 1 < d {
                    acc -= down * x[(na + 1) * d + nb + 1] * (((na + 1) * (nb + 1)) as f64).sqrt();
                }
                y[na * d + nb] = acc;
            }
        }
    }
}

/// Applies `U = exp[g (e^{i theta_1} a†b† - e^{-i theta_1} a b)]`, which
/// satisfies `U† a U = cosh g a + e^{i theta_1} sinh g b†`.
///
/// The result carries its tail mass; amplification pushes population upward,
/// so callers should check it against their tolerance.
pub fn apply_nbs(state: &FockVector, nbs: &NbsSpec, opts: &SeriesOptions) -> Result<FockVector> {
    state.expect_modes(2)?;
    nbs.validate()?;
    let gen = TwoModeSqueezeGenerator {
        dims: state.dims(),
        phase: nbs.pump_phase,
    };
    let amps = exp_action(&gen, nbs.gain, state.amps(), opts)?;
    FockVector::two_mode(state.dims(), amps)
}

/// `exp(-i phi K_z)` with `K_z = (n_a + n_b + 1) / 2`.
pub fn phase_shift(state: &FockVector, phi: f64) -> Result<FockVector> {
    state.expect_modes(2)?;
    let d = state.dims();
    let amps = state
        .amps()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let total = (i / d + i % d) as f64;
            a * C64::from_polar(1.0, -0.5 * phi * (total + 1.0))
        })
        .collect();
    FockVector::two_mode(d, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, moments, qfi_via_derivative, squeezed_vacuum_state, tensor_product};

    fn sinh2(x: f64) -> f64 {
        x.sinh().powi(2)
    }

    fn nbs(gain: f64, pump_phase: f64) -> NbsSpec {
        NbsSpec { gain, pump_phase }
    }

    #[test]
    fn zero_gain_is_identity() {
        let a = coherent_state(0.7, 0.2, 20).unwrap();
        let b = squeezed_vacuum_state(0.3, 1.0, 20).unwrap();
        let s = tensor_product(&a, &b).unwrap();
        let out = apply_nbs(&s, &nbs(0.0, 0.4), &SeriesOptions::default()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn two_mode_squeezed_vacuum_means() {
        let vac = FockVector::vacuum(2, 64).unwrap();
        let out = apply_nbs(&vac, &nbs(0.5, 0.0), &SeriesOptions::default()).unwrap();
        let m = moments(&out).unwrap();
        assert!((m.mean_a - sinh2(0.5)).abs() < 1e-8);
        assert!((m.mean_b - sinh2(0.5)).abs() < 1e-8);
        assert!((m.qfi - sinh2(1.0)).abs() < 1e-8);
        assert!((qfi_via_derivative(&out).unwrap() - sinh2(1.0)).abs() < 1e-8);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    /// Two-mode squeezed vacuum amplitudes are known exactly:
    /// `c_nn = (e^{i theta} tanh g)^n / cosh g`.
    #[test]
    fn two_mode_squeezed_vacuum_amplitudes() {
        let (g, theta, d) = (0.6, 0.8, 80);
        let out = apply_nbs(&FockVector::vacuum(2, d).unwrap(), &nbs(g, theta), &SeriesOptions::default()).unwrap();
        for n in 0..20 {
            let expected = C64::from_polar(g.tanh().powi(n as i32) / g.cosh(), theta * n as f64);
            assert!((out.amp2(n, n) - expected).norm() < 1e-12, "level {n}");
            if n > 0 {
                assert!(out.amp2(n, n - 1).norm() < 1e-14);
            }
        }
    }

    /// `a U psi = U (cosh g a + e^{i theta} sinh g b†) psi` on the interior
    /// block.
    #[test]
    fn bogoliubov_relation_holds() {
        let d = 48;
        let (g, theta) = (0.8, 0.7);
        let a = coherent_state(0.6, 0.4, d).unwrap();
        let b = squeezed_vacuum_state(0.3, 1.1, d).unwrap();
        let psi = tensor_product(&a, &b).unwrap();
        let opts = SeriesOptions::default();

        let lower_a = |v: &[C64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); d * d];
            for na in 0..d - 1 {
                for nb in 0..d {
                    out[na * d + nb] = v[(na + 1) * d + nb] * ((na + 1) as f64).sqrt();
                }
            }
            out
        };
        let raise_b = |v: &[C64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); d * d];
            for na in 0..d {
                for nb in 1..d {
                    out[na * d + nb] = v[na * d + nb - 1] * (nb as f64).sqrt();
                }
            }
            out
        };

        let u_psi = apply_nbs(&psi, &nbs(g, theta), &opts).unwrap();
        let lhs = lower_a(u_psi.amps());

        let v = C64::from_polar(g.sinh(), theta);
        let mixed: Vec<C64> = lower_a(psi.amps())
            .iter()
            .zip(raise_b(psi.amps()))
            .map(|(x, y)| g.cosh() * x + v * y)
            .collect();
        let gen = TwoModeSqueezeGenerator { dims: d, phase: theta };
        let rhs = exp_action(&gen, g, &mixed, &opts).unwrap();

        for na in 0..d / 2 {
            for nb in 0..d / 2 {
                let i = na * d + nb;
                assert!((lhs[i] - rhs[i]).norm() < 1e-8, "({na},{nb})");
            }
        }
    }

    #[test]
    fn phase_shift_preserves_moments() {
        let s = apply_nbs(
            &tensor_product(&coherent_state(0.5, 0.0, 40).unwrap(), &squeezed_vacuum_state(0.4, 0.0, 40).unwrap())
                .unwrap(),
            &nbs(0.3, 0.0),
            &SeriesOptions::default(),
        )
        .unwrap();
        let shifted = phase_shift(&s, 1.234).unwrap();
        assert!((shifted.norm_sqr() - s.norm_sqr()).abs() < 1e-14);
        let (m0, m1) = (moments(&s).unwrap(), moments(&shifted).unwrap());
        assert!((m0.qfi - m1.qfi).abs() < 1e-12);
        assert!((m0.mean_total_sq - m1.mean_total_sq).abs() < 1e-12);
    }

    #[test]
    fn phase_shift_zero_and_four_pi() {
        let s = tensor_product(&coherent_state(0.5, 0.3, 12).unwrap(), &coherent_state(0.2, 0.0, 12).unwrap()).unwrap();
        assert_eq!(phase_shift(&s, 0.0).unwrap(), s);
        // exp(-i 2 pi (n + 1)) = 1 for every level
        let full = phase_shift(&s, 4.0 * std::f64::consts::PI).unwrap();
        for (x, y) in full.amps().iter().zip(s.amps()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn series_cap_is_reported() {
        let vac = FockVector::vacuum(2, 8).unwrap();
        let opts = SeriesOptions {
            tolerance: 0.0,
            max_terms: 5,
        };
        assert!(matches!(
            apply_nbs(&vac, &nbs(0.5, 0.0), &opts),
            Err(Error::NonConvergence { iterations: 5 })
        ));
    }
}
