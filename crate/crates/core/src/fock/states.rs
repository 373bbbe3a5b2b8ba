use num_complex::Complex64 as C64;

use super::FockVector;
use crate::error::{Error, Result};

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Coherent state `|alpha>` with `alpha = alpha_mag * exp(i alpha_phase)`,
/// renormalized on the truncated basis.
///
/// The returned vector carries its tail mass; callers decide whether it is
/// converged enough.
pub fn coherent_state(alpha_mag: f64, alpha_phase: f64, dims: usize) -> Result<FockVector> {
    check_nonnegative("alpha_mag", alpha_mag)?;
    if dims < 2 {
        return Err(Error::Dimension(format!("need dims >= 2, got {dims}")));
    }
    let alpha = C64::from_polar(alpha_mag, alpha_phase);
    let mut amps = Vec::with_capacity(dims);
    let mut c = C64::new((-0.5 * alpha_mag * alpha_mag).exp(), 0.0);
    amps.push(c);
    for n in 1..dims {
        c *= alpha / (n as f64).sqrt();
        amps.push(c);
    }
    FockVector::normalized(1, dims, amps)
        .ok_or_else(|| Error::Domain(format!("coherent amplitude {alpha_mag} underflows the basis")))
}

/// Squeezed vacuum `S(zeta)|0>` with `S(zeta) = exp[(-zeta b†² + zeta* b²)/2]`
/// and `zeta = r exp(i theta)`. Only even levels are populated:
///
/// `c_2n = (-e^{i theta} tanh r)^n sqrt((2n)!) / (2^n n! sqrt(cosh r))`.
pub fn squeezed_vacuum_state(squeeze_mag: f64, squeeze_phase: f64, dims: usize) -> Result<FockVector> {
    check_nonnegative("squeeze_mag", squeeze_mag)?;
    if dims < 2 {
        return Err(Error::Dimension(format!("need dims >= 2, got {dims}")));
    }
    let ratio = -C64::from_polar(squeeze_mag.tanh(), squeeze_phase);
    let mut amps = vec![C64::new(0.0, 0.0); dims];
    let mut c = C64::new(1.0 / squeeze_mag.cosh().sqrt(), 0.0);
    let mut n = 0usize;
    while 2 * n < dims {
        amps[2 * n] = c;
        let k = 2 * n as u64;
        c *= ratio * (((k + 1) as f64) / ((k + 2) as f64)).sqrt();
        n += 1;
    }
    FockVector::normalized(1, dims, amps)
        .ok_or_else(|| Error::Domain("squeezed vacuum has zero norm".into()))
}

/// Applies `b^p` and renormalizes:
/// `amps'[n] = amps[n + p] sqrt((n + p)! / n!)`.
pub fn subtract_photons(state: &FockVector, p: u32) -> Result<FockVector> {
    state.expect_modes(1)?;
    if p == 0 {
        return Ok(state.clone());
    }
    let dims = state.dims();
    let p = p as usize;
    let src = state.amps();
    let mut amps = vec![C64::new(0.0, 0.0); dims];
    for n in 0..dims.saturating_sub(p) {
        // sqrt((n+p)!/n!) = prod_{k=1..p} sqrt(n+k)
        let weight: f64 = (1..=p).map(|k| ((n + k) as f64).sqrt()).product();
        amps[n] = src[n + p] * weight;
    }
    FockVector::normalized(1, dims, amps).ok_or(Error::ZeroNorm { subtracted: p as u32 })
}

/// `|a> (x) |b>` with index `n_a * dims + n_b`.
pub fn tensor_product(a_state: &FockVector, b_state: &FockVector) -> Result<FockVector> {
    a_state.expect_modes(1)?;
    b_state.expect_modes(1)?;
    if a_state.dims() != b_state.dims() {
        return Err(Error::Dimension(format!(
            "mode truncations differ: {} vs {}",
            a_state.dims(),
            b_state.dims()
        )));
    }
    let dims = a_state.dims();
    let amps: Vec<C64> = a_state
        .amps()
        .iter()
        .flat_map(|&a| b_state.amps().iter().map(move |&b| a * b))
        .collect();
    FockVector::two_mode(dims, amps)
}
