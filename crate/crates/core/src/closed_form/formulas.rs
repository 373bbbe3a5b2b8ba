use super::budget::{s_root, BudgetMode, BudgetSpec};
use super::{check_gain, check_param, check_squeeze, finite, Subtraction};
use crate::error::Result;

/// Mean photon number of the p-subtracted squeezed vacuum as a function of
/// `s = sinh^2 r`: `s`, `3s + 1`, `3s(5s + 3)/(3s + 1)`.
pub fn nbar_from_sinh2(p: Subtraction, s: f64) -> f64 {
    match p {
        Subtraction::Zero => s,
        Subtraction::One => 3.0 * s + 1.0,
        Subtraction::Two => 3.0 * s * (5.0 * s + 3.0) / (3.0 * s + 1.0),
    }
}

/// `nbar_p(r)`. At `r = 0` this is the `r -> 0+` limit (1 for p = 1).
pub fn nbar(p: Subtraction, r: f64) -> Result<f64> {
    check_squeeze(r)?;
    Ok(nbar_from_sinh2(p, r.sinh().powi(2)))
}

/// Maximal QFI `F_p` for coherent amplitude `alpha`, squeeze `r` and gain `g`.
pub fn qfi_closed(p: Subtraction, alpha: f64, r: f64, g: f64) -> Result<f64> {
    check_param("alpha", alpha)?;
    check_squeeze(r)?;
    check_gain(g)?;
    let a2 = alpha * alpha;
    let c2 = (2.0 * g).cosh().powi(2);
    let s2 = (2.0 * g).sinh().powi(2);
    let sh2r = (2.0 * r).sinh().powi(2);
    let n0 = r.sinh().powi(2);
    let n1 = nbar_from_sinh2(Subtraction::One, n0);
    let f = match p {
        Subtraction::Zero => c2 * (0.5 * sh2r + a2) + s2 * (a2 * (2.0 * r).exp() + n0 + 1.0),
        Subtraction::One => c2 * (1.5 * sh2r + a2) + s2 * (3.0 * a2 * (2.0 * r).exp() + n1 + 1.0),
        Subtraction::Two => {
            let n2 = nbar_from_sinh2(Subtraction::Two, n0);
            c2 * (1.5 * sh2r * (5.0 * n0 * (n1 + 1.0) + 3.0) / (n1 * n1) + a2)
                + s2 * (a2 * (3.0 * (2.0 * r).sinh() * (5.0 * n0 + 1.0) / n1 + 2.0 * n2 + 1.0) + n2 + 1.0)
        }
    };
    finite("qfi", f)
}

/// `F_p` parameterized by the photon budget.
///
/// Post-subtraction budgets use the budget-form expressions directly;
/// pre-subtraction budgets are converted to `(alpha, r)` first.
pub fn qfi_closed_eta(budget: &BudgetSpec, g: f64) -> Result<f64> {
    budget.validate()?;
    check_gain(g)?;
    if budget.mode == BudgetMode::PreSubtraction {
        let probe = budget.resolve()?;
        return qfi_closed(budget.subtracted, probe.alpha_mag, probe.squeeze_mag, g);
    }
    let n = budget.total_mean;
    let eta = budget.squeeze_fraction;
    let x = eta * n;
    let coh = (1.0 - eta) * n;
    let c2 = (2.0 * g).cosh().powi(2);
    let s2 = (2.0 * g).sinh().powi(2);
    let f = match budget.subtracted {
        Subtraction::Zero => {
            c2 * (x * (1.0 + 2.0 * x) + n)
                + s2 * (2.0 * eta * (1.0 - eta) * n * n + 2.0 * (x * (x + 1.0)).sqrt() * coh + n + 1.0)
        }
        Subtraction::One => {
            // rejects eta N < 1 beyond rounding
            budget.sinh2()?;
            let excess = (x - 1.0).max(0.0);
            c2 * (2.0 / 3.0 * excess * (x + 2.0) + coh)
                + s2 * (2.0 * eta * n * n * (1.0 - eta) + n + 1.0 + 2.0 * n * (1.0 - eta) * (excess * (x + 2.0)).sqrt())
        }
        Subtraction::Two => {
            let s = s_root(x);
            let k = 3.0 * s + 1.0;
            c2 * (6.0 * s * (s + 1.0) * (5.0 * s * (3.0 * s + 2.0) + 3.0) / (k * k) + coh)
                + s2 * (coh * (6.0 * (s * (s + 1.0)).sqrt() * (5.0 * s + 1.0) / k + 2.0 * x + 1.0) + x + 1.0)
        }
    };
    finite("qfi", f)
}

/// Mean photon number inside the interferometer for a given input mean:
/// `cosh(2g) N_in + 2 sinh^2 g`.
pub fn mean_inside(input_mean: f64, g: f64) -> Result<f64> {
    check_param("input mean", input_mean)?;
    check_gain(g)?;
    finite("mean inside", (2.0 * g).cosh() * input_mean + 2.0 * g.sinh().powi(2))
}

/// `<N_p>` with `N_in = |alpha|^2 + nbar_p`.
pub fn n_inside(p: Subtraction, alpha: f64, r: f64, g: f64) -> Result<f64> {
    check_param("alpha", alpha)?;
    mean_inside(alpha * alpha + nbar(p, r)?, g)
}

/// `<N_p^2>` inside the interferometer.
pub fn n_sq_inside(p: Subtraction, alpha: f64, r: f64, g: f64) -> Result<f64> {
    check_param("alpha", alpha)?;
    check_squeeze(r)?;
    check_gain(g)?;
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let n0 = r.sinh().powi(2);
    let c2 = (2.0 * g).cosh().powi(2);
    let c4 = (4.0 * g).cosh();
    let s2 = (2.0 * g).sinh().powi(2);
    let sh4 = g.sinh().powi(4);
    let sinh_2r = (2.0 * r).sinh();
    let n_in = a2 + nbar_from_sinh2(p, n0);
    let v = match p {
        Subtraction::Zero => {
            (a4 + 3.0 * n0 * n0) * c2
                + 4.0 * (n_in + 1.0) * sh4
                + (a2 * (2.0 * r).cosh() + 2.0 * n0) * c4
                + s2 * (a2 * (sinh_2r + 1.0) + 1.0)
        }
        Subtraction::One => {
            c4 * (a2 * (6.0 * n0 + 1.0) + 2.0 * n_in - 1.0)
                + c2 * (15.0 * n0 * n0 + a4 + 6.0 * n0)
                + 4.0 * sh4 * (n_in + 1.0)
                + s2 * (a2 + 2.0 + 3.0 * a2 * sinh_2r)
        }
        Subtraction::Two => {
            let n2 = nbar_from_sinh2(Subtraction::Two, n0);
            let k = 3.0 * n0 + 1.0;
            c4 * (2.0 * n2 + a2 * (2.0 * n2 + 1.0))
                + 4.0 * sh4 * (1.0 + n_in)
                + c2 * (35.0 * n0 * n0 + 40.0 * n0 * n0 / k + a4)
                + s2 * (a2 + 3.0 * (5.0 * n0 + 1.0) / k * a2 * sinh_2r + 1.0)
        }
    };
    finite("second moment", v)
}
