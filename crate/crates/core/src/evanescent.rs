//! Evanescent-wave contributions from the real-frequency representation:
//!
//! ```text
//! P_evan = −(ħ/2π²) ∫₀^∞ dω coth(ħω/2k_BT) ∫₀^∞ dq q² Im[x/(1 − x)],
//! x = r²(ω, q) e^{−2aq}
//! ```
//!
//! Both integrals run in logarithmic variables. The outer window starts at
//! the relaxation frequency and grows downward until the integrand is
//! negligible; the part below the window is a power-law extrapolation of
//! the two lowest samples. For a dissipative model `ω·∫q² Im[…]dq` tends to
//! a nonzero constant as ω → ∞, so the integral diverges logarithmically
//! and the upper end `omega_max_factor·ω_p` is a regularization whose
//! effect is reported as [`EvanescentResult::cutoff_sensitivity`]. The permittivity is always the
//! conduction (Drude or plasma) form of the model, including for tabulated
//! models, whose absorption data lie far above the frequencies that matter
//! here.

use std::f64::consts::{LN_10, PI};
use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{C, HBAR, K_B};
use crate::dielectric::{DielectricModel, DrudeParams};
use crate::error::{Error, Result};
use crate::matsubara::GeometryThermal;
use crate::quadrature::{
    integrate_panels_l1, integrate_panels_par, uniform_breakpoints, Estimate, QuadratureConfig,
};
use crate::reflection::{fresnel, Kinematics, Polarization};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvanescentResult {
    /// Pa.
    pub value: f64,
    /// Pa, including the extrapolated tails outside the window.
    pub est_error: f64,
    /// Lower end of the integrated frequency window, rad/s; 0 when nothing
    /// was integrated.
    pub omega_cutoff_low: f64,
    /// Upper end of the integrated frequency window, rad/s.
    pub omega_cutoff_high: f64,
    /// Change of `value` per e-fold increase of `omega_cutoff_high`, Pa.
    /// It does not vanish for dissipative models, whose integrand tends to
    /// a constant in ln ω at high frequency.
    pub cutoff_sensitivity: f64,
}

impl EvanescentResult {
    pub const ZERO: EvanescentResult = EvanescentResult {
        value: 0.0,
        est_error: 0.0,
        omega_cutoff_low: 0.0,
        omega_cutoff_high: 0.0,
        cutoff_sensitivity: 0.0,
    };
}

/// Inner panels are this many decades wide; surface-plasmon peaks are narrow.
const INNER_DECADES: f64 = 0.1;
/// Upper inner limit in units of 1/a: e^{−2aq} = e^{−60}.
const Q_MAX_TIMES_A: f64 = 30.0;
/// Most frequency steps the window may grow on either side.
const MAX_WINDOW_STEPS: usize = 120;

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// Im[x/(1 − x)] with x = r² e^{−2aq}.
fn spectral_factor(params: DrudeParams, pol: Polarization, a: f64, omega: f64, q: f64) -> f64 {
    let eps = params.eps_real_axis(omega);
    let kin = Kinematics::evanescent_from_q(omega / C, q, eps);
    match fresnel(pol, eps, &kin) {
        Ok(r) => {
            let x = r * r * (-2.0 * a * q).exp();
            (x / (Complex64::new(1.0, 0.0) - x)).im
        }
        Err(_) => f64::NAN,
    }
}

/// ∫ q³ Im[x/(1 − x)] d(ln q) at fixed ω.
fn inner_integral(
    params: DrudeParams,
    pol: Polarization,
    a: f64,
    omega: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Estimate {
    let eps = params.eps_real_axis(omega);
    let skin = (Complex64::new(1.0, 0.0) - eps).norm().sqrt() * omega / C;
    let q_lo = 1e-4 * skin.min(0.5 / a);
    let q_hi = Q_MAX_TIMES_A / a;
    let points = uniform_breakpoints(q_lo.ln(), q_hi.ln(), INNER_DECADES * LN_10);
    integrate_panels_l1(
        |t: f64| {
            let q = t.exp();
            q * q * q * spectral_factor(params, pol, a, omega, q)
        },
        &points,
        0.0,
        rel_tol,
        max_subdivisions,
    )
}

/// Integrand of the double integral with respect to dω dq, prefactor
/// included, so that the pressure is its integral over ω > 0 and q > 0.
pub fn evanescent_integrand(
    model: &DielectricModel,
    pol: Polarization,
    omega: f64,
    q: f64,
    g: GeometryThermal,
) -> Result<f64> {
    g.validate()?;
    if !(omega.is_finite() && omega > 0.0 && q.is_finite() && q > 0.0) {
        return Err(Error::domain(format!(
            "evanescent integrand needs omega > 0 and q > 0, got omega = {omega}, q = {q}"
        )));
    }
    let params = model.conduction();
    if params.gamma == 0.0 || params.omega_p == 0.0 {
        return Ok(0.0);
    }
    let weight = coth(HBAR * omega / (2.0 * K_B * g.temperature));
    Ok(-HBAR / (2.0 * PI * PI) * weight * q * q * spectral_factor(params, pol, g.a, omega, q))
}

/// Integral of `h` over `(−∞, s]` for `h(t) ≈ h(s)·e^{α(t − s)}`, with α
/// fitted to `(s, h)` and `(s2, h2)`. Returns `None` when the samples do not
/// decay away from `s`.
fn power_law_tail(s: f64, h: f64, s2: f64, h2: f64) -> Option<f64> {
    if h == 0.0 {
        return Some(0.0);
    }
    if h.signum() != h2.signum() || h2 == 0.0 {
        return None;
    }
    let alpha = (h2 / h).ln() / (s2 - s);
    (alpha > 0.0).then(|| h / alpha)
}

/// Evanescent contribution of one polarization, Pa.
pub fn evanescent_pressure(
    model: &DielectricModel,
    pol: Polarization,
    g: GeometryThermal,
    cfg: &QuadratureConfig,
) -> Result<EvanescentResult> {
    g.validate()?;
    cfg.validate()?;
    let params = model.conduction();
    // Real reflection coefficients carry no evanescent contribution.
    if params.gamma == 0.0 || params.omega_p == 0.0 {
        return Ok(EvanescentResult::ZERO);
    }

    let thermal = 2.0 * K_B * g.temperature / HBAR;
    let inner_rel = 0.1 * cfg.rel_tol;
    let inner_failed = AtomicBool::new(false);
    let h = |s: f64| -> f64 {
        let omega = s.exp();
        let inner = inner_integral(params, pol, g.a, omega, inner_rel, cfg.max_subdivisions);
        if !inner.converged {
            inner_failed.store(true, Ordering::Relaxed);
        }
        omega * coth(omega / thermal) * inner.value
    };

    let step = cfg.log_grid_decades_per_panel * LN_10;
    let negligible = 1e-3 * cfg.rel_tol;
    let s_start = params.gamma.ln();
    let s_hi = (cfg.omega_max_factor * params.omega_p)
        .ln()
        .max(s_start + step);
    let upper = uniform_breakpoints(s_start, s_hi, step);
    let upper_values: Vec<f64> = upper.par_iter().map(|&s| h(s)).collect();
    let mut peak = upper_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let omega_floor = cfg.omega_min_factor * params.gamma;
    let mut low = vec![(s_start, upper_values[0])];
    for _ in 0..MAX_WINDOW_STEPS {
        let (s, v) = *low.last().unwrap();
        peak = peak.max(v.abs());
        if s.exp() <= omega_floor && v.abs() <= negligible * peak {
            break;
        }
        let s_next = s - step;
        low.push((s_next, h(s_next)));
    }
    let (s_lo, h_lo) = *low.last().unwrap();
    let h_hi = *upper_values.last().unwrap();

    let (tail_value, tail_error) = match low.len() {
        1 => (0.0, h_lo.abs() * step),
        n => match power_law_tail(s_lo, h_lo, low[n - 2].0, low[n - 2].1) {
            Some(t) => (t, t.abs()),
            None => (0.0, h_lo.abs() * step),
        },
    };

    let points = uniform_breakpoints(s_lo, s_hi, step);
    let scale = HBAR / (2.0 * PI * PI);
    let est = integrate_panels_par(
        h,
        &points,
        cfg.abs_tol / scale,
        0.5 * cfg.rel_tol,
        cfg.max_subdivisions,
    )
    .require("evanescent frequency integral")?;
    if inner_failed.load(Ordering::Relaxed) {
        return Err(Error::Convergence {
            what: "evanescent wave-number integral",
            value: -scale * est.value,
            est_error: scale * est.error,
            work: est.evaluations,
        });
    }
    Ok(EvanescentResult {
        value: -scale * (est.value + tail_value),
        est_error: scale * (est.error + tail_error),
        omega_cutoff_low: s_lo.exp(),
        omega_cutoff_high: s_hi.exp(),
        cutoff_sensitivity: -scale * h_hi,
    })
}
