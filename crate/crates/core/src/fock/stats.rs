use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::FockVector;
use crate::error::Result;

/// Photon-number statistics of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov: f64,
    /// Mandel Q of mode a; 0 when the mode is empty.
    pub q_a: f64,
    pub q_b: f64,
    /// Normalized intermode covariance; 0 when either variance vanishes.
    pub j: f64,
    pub mean_total: f64,
    pub mean_total_sq: f64,
    /// `4 Var(K_z) = Var(n_a) + Var(n_b) + 2 Cov(n_a, n_b)`.
    pub qfi: f64,
}

fn mandel(mean: f64, var: f64) -> f64 {
    if mean == 0.0 {
        0.0
    } else {
        (var - mean) / mean
    }
}

/// Direct probability-weighted sums over `(n_a, n_b)`. Central moments are
/// accumulated in a second pass.
pub fn moments(state: &FockVector) -> Result<MomentSet> {
    state.expect_modes(2)?;
    let d = state.dims();
    let probs: Vec<f64> = state.amps().iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = probs.iter().sum();

    let (mut mean_a, mut mean_b, mut mean_total_sq) = (0.0, 0.0, 0.0);
    for (i, p) in probs.iter().enumerate() {
        let (na, nb) = ((i / d) as f64, (i % d) as f64);
        mean_a += p * na;
        mean_b += p * nb;
        mean_total_sq += p * (na + nb) * (na + nb);
    }
    mean_a /= total;
    mean_b /= total;
    mean_total_sq /= total;

    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for (i, p) in probs.iter().enumerate() {
        let da = (i / d) as f64 - mean_a;
        let db = (i % d) as f64 - mean_b;
        var_a += p * da * da;
        var_b += p * db * db;
        cov += p * da * db;
    }
    var_a /= total;
    var_b /= total;
    cov /= total;

    let j = if var_a == 0.0 || var_b == 0.0 {
        0.0
    } else {
        cov / (var_a.sqrt() * var_b.sqrt())
    };
    let mean_total = mean_a + mean_b;
    let qfi = var_a + var_b + 2.0 * cov;
    Ok(MomentSet {
        mean_a,
        mean_b,
        var_a,
        var_b,
        cov,
        q_a: mandel(mean_a, var_a),
        q_b: mandel(mean_b, var_b),
        j,
        mean_total,
        mean_total_sq,
        qfi,
    })
}

/// Pure-state QFI from the derivative of the phase-shifted state,
/// `4 (<psi'|psi'> - |<psi'|psi>|^2)` with `|psi'> = -i K_z |psi>`.
pub fn qfi_via_derivative(state: &FockVector) -> Result<f64> {
    state.expect_modes(2)?;
    let d = state.dims();
    let minus_i = C64::new(0.0, -1.0);
    let (mut dd, mut dpsi) = (0.0, C64::new(0.0, 0.0));
    for (i, &a) in state.amps().iter().enumerate() {
        let kz = 0.5 * ((i / d + i % d) as f64 + 1.0);
        let deriv = minus_i * kz * a;
        dd += deriv.norm_sqr();
        dpsi += deriv.conj() * a;
    }
    Ok(4.0 * (dd - dpsi.norm_sqr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneModeStats {
    pub mean: f64,
    pub variance: f64,
    pub mandel_q: f64,
}

pub fn one_mode_stats(state: &FockVector) -> Result<OneModeStats> {
    state.expect_modes(1)?;
    let probs: Vec<f64> = state.amps().iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    let mean = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>() / total;
    let variance = probs
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 - mean).powi(2) * p)
        .sum::<f64>()
        / total;
    Ok(OneModeStats {
        mean,
        variance,
        mandel_q: mandel(mean, variance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_nbs, coherent_state, tensor_product, NbsSpec, SeriesOptions};
    use proptest::prelude::*;

    #[test]
    fn vacuum_moments_vanish() {
        let m = moments(&FockVector::vacuum(2, 8).unwrap()).unwrap();
        for v in [m.mean_a, m.mean_b, m.var_a, m.var_b, m.cov, m.q_a, m.q_b, m.j, m.qfi, m.mean_total, m.mean_total_sq] {
            assert_eq!(v, 0.0);
        }
        assert_eq!(qfi_via_derivative(&FockVector::vacuum(2, 8).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn coherent_in_one_port() {
        let s = tensor_product(&coherent_state(2.0, 0.0, 40).unwrap(), &coherent_state(0.0, 0.0, 40).unwrap()).unwrap();
        let m = moments(&s).unwrap();
        assert!((m.qfi - 4.0).abs() < 1e-10);
        assert!(m.q_a.abs() < 1e-10);
        assert_eq!(m.q_b, 0.0);
        assert_eq!(m.j, 0.0);
    }

    #[test]
    fn one_mode_rejects_two_mode() {
        assert!(one_mode_stats(&FockVector::vacuum(2, 4).unwrap()).is_err());
        assert!(moments(&FockVector::vacuum(1, 4).unwrap()).is_err());
    }

    fn random_state(d: usize, seed: &[(f64, f64)]) -> FockVector {
        let amps: Vec<C64> = seed.iter().map(|&(re, im)| C64::new(re, im)).collect();
        FockVector::normalized(2, d, amps).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn derivative_route_matches_moment_route(
            seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36)
        ) {
            let s = random_state(6, &seed);
            let m = moments(&s).unwrap();
            let q = qfi_via_derivative(&s).unwrap();
            prop_assert!((q - m.qfi).abs() <= 1e-10 * m.qfi.abs().max(1e-12));
        }

        #[test]
        fn moment_set_invariants(
            seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 49)
        ) {
            let m = moments(&random_state(7, &seed)).unwrap();
            prop_assert!(m.var_a >= 0.0 && m.var_b >= 0.0);
            prop_assert!(m.j.abs() <= 1.0 + 1e-12);
            prop_assert!(m.q_a >= -1.0 - 1e-12 && m.q_b >= -1.0 - 1e-12);
            prop_assert!((m.qfi - (m.var_a + m.var_b + 2.0 * m.cov)).abs() <= 1e-9 * m.qfi.abs().max(1.0));
        }

        #[test]
        fn moments_are_phase_invariant(phi in -20.0f64..20.0) {
            let s = apply_nbs(
                &tensor_product(&coherent_state(0.6, 0.2, 24).unwrap(), &coherent_state(0.3, 1.0, 24).unwrap()).unwrap(),
                &NbsSpec { gain: 0.3, pump_phase: 0.5 },
                &SeriesOptions::default(),
            ).unwrap();
            let (m0, m1) = (moments(&s).unwrap(), moments(&crate::fock::phase_shift(&s, phi).unwrap()).unwrap());
            prop_assert!((m0.qfi - m1.qfi).abs() < 1e-12);
            prop_assert!((m0.mean_total - m1.mean_total).abs() < 1e-12);
            prop_assert!((m0.cov - m1.cov).abs() < 1e-12);
        }
    }
}
