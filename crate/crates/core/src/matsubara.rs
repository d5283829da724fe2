//! Polarized Casimir pressures as sums over Matsubara frequencies.
//!
//! Term `l` of a channel is
//!
//! ```text
//! −(k_B T/π) · ∫₀^∞ k⊥ dk⊥ q_l r² e^{−2a q_l} / (1 − r² e^{−2a q_l})
//! ```
//!
//! with the `l = 0` term halved. It is evaluated in `y = 2a·q_l`, where it
//! reads `(1/8a³) ∫_{y_l}^∞ y² r² e^{−y} / (1 − r² e^{−y}) dy`, and the map
//! `y = y_l − ln u` sends the range onto `u ∈ (0, 1]`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{C, HBAR, K_B, ZETA_3};
use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, Estimate, QuadratureConfig};
use crate::reflection::{
    fresnel, kinematics_imag, r_te_zero_freq, r_tm_zero_freq, Kinematics, Polarization,
};

/// Plate separation and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryThermal {
    /// Separation, m.
    pub a: f64,
    /// Temperature, K.
    pub temperature: f64,
}

impl GeometryThermal {
    pub fn new(a: f64, temperature: f64) -> Result<Self> {
        let g = GeometryThermal { a, temperature };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::validation(format!(
                "separation must be finite and positive, got {}",
                self.a
            )));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::validation(format!(
                "temperature must be finite and positive, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// `2a·ξ_l/c`, the lower end of the substituted integral.
    pub fn y_l(&self, l: usize) -> f64 {
        2.0 * self.a * matsubara_frequency(self.temperature, l) / C
    }
}

/// One polarization channel of the pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedPressure {
    /// Pa; negative means attraction.
    pub value: f64,
    /// Pa, quadrature error plus truncated-tail bound.
    pub est_error: f64,
    /// Number of Matsubara terms summed.
    pub terms_used: usize,
}

impl PolarizedPressure {
    pub const ZERO: PolarizedPressure = PolarizedPressure {
        value: 0.0,
        est_error: 0.0,
        terms_used: 0,
    };
}

/// ξ_l = 2π k_B T l / ħ in rad/s.
pub fn matsubara_frequency(temperature: f64, l: usize) -> f64 {
    2.0 * std::f64::consts::PI * K_B * temperature * l as f64 / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassicalModel {
    Drude,
    Plasma,
}

/// Large-separation limit of the total pressure, Pa.
pub fn classical_limit(kind: ClassicalModel, g: GeometryThermal) -> f64 {
    let drude = -K_B * g.temperature * ZETA_3 / (8.0 * std::f64::consts::PI * g.a.powi(3));
    match kind {
        ClassicalModel::Drude => drude,
        ClassicalModel::Plasma => 2.0 * drude,
    }
}

/// Converts the dimensionless `y`-integral of term `l` into Pa, with the
/// prime on `l = 0`.
fn term_scale(g: GeometryThermal, l: usize) -> f64 {
    let prime = if l == 0 { 0.5 } else { 1.0 };
    -prime * K_B * g.temperature / std::f64::consts::PI / (8.0 * g.a.powi(3))
}

/// Panels in `u` that resolve the logarithmic growth of `y` near `u = 0`.
fn u_breakpoints() -> Vec<f64> {
    let mut pts = vec![0.0];
    pts.extend([64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0].map(|t: f64| (-t).exp()));
    pts.extend([0.6, 0.8, 0.9, 1.0]);
    pts
}

/// r² as a function of `y = 2a·q` for term `l`.
fn reflection_squared(
    model: &DielectricModel,
    pol: Polarization,
    g: GeometryThermal,
    l: usize,
) -> Result<impl Fn(f64) -> f64 + '_> {
    let two_a = 2.0 * g.a;
    let (eps, y_l) = if l == 0 {
        (None, 0.0)
    } else {
        let xi = matsubara_frequency(g.temperature, l);
        (Some(model.eval_imag(xi)?), g.y_l(l))
    };
    Ok(move |y: f64| -> f64 {
        let r = match eps {
            None => {
                let k_perp = y / two_a;
                match pol {
                    Polarization::TM => r_tm_zero_freq(model, k_perp),
                    Polarization::TE => r_te_zero_freq(model, k_perp),
                }
                .unwrap_or(f64::NAN)
            }
            Some(e) => {
                let kin = Kinematics::imag_axis_from_q(y_l, y, e);
                fresnel(pol, Complex64::new(e, 0.0), &kin).map_or(f64::NAN, |r| r.re)
            }
        };
        r * r
    })
}

/// Contribution of Matsubara term `l` to the channel pressure, Pa, with the
/// prime convention applied. Its error is the quadrature error estimate.
pub fn term_contribution(
    model: &DielectricModel,
    pol: Polarization,
    g: GeometryThermal,
    l: usize,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    g.validate()?;
    if model.is_vacuum() {
        return Ok(Estimate::ZERO);
    }
    let r2 = reflection_squared(model, pol, g, l)?;
    let y_l = if l == 0 { 0.0 } else { g.y_l(l) };
    let decay = (-y_l).exp();
    let integrand = |u: f64| {
        let y = y_l - u.ln();
        let r2 = r2(y);
        y * y * r2 * decay / (1.0 - r2 * u * decay)
    };
    let scale = term_scale(g, l);
    let est = integrate_panels(
        integrand,
        &u_breakpoints(),
        cfg.abs_tol / scale.abs() * 1e-3,
        0.1 * cfg.rel_tol,
        cfg.max_subdivisions,
    )
    .require("Matsubara term integral")?;
    Ok(Estimate {
        value: scale * est.value,
        error: scale.abs() * est.error,
        ..est
    })
}

/// Same quantity as [`term_contribution`], integrated directly over k⊥.
pub fn term_by_transverse_wavenumber(
    model: &DielectricModel,
    pol: Polarization,
    g: GeometryThermal,
    l: usize,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    g.validate()?;
    if model.is_vacuum() {
        return Ok(Estimate::ZERO);
    }
    let xi = matsubara_frequency(g.temperature, l);
    let eps = if l == 0 {
        None
    } else {
        Some(model.eval_imag(xi)?)
    };
    let two_a = 2.0 * g.a;
    // k⊥ = κ·w/(1 − w) with κ = 1/2a.
    let kappa = 1.0 / two_a;
    let integrand = |w: f64| -> f64 {
        let k_perp = kappa * w / (1.0 - w);
        let jac = kappa / ((1.0 - w) * (1.0 - w));
        let (q, r) = match eps {
            None => {
                let r = match pol {
                    Polarization::TM => r_tm_zero_freq(model, k_perp),
                    Polarization::TE => r_te_zero_freq(model, k_perp),
                };
                (k_perp, r.unwrap_or(f64::NAN))
            }
            Some(e) => match kinematics_imag(xi, k_perp, e) {
                Ok(kin) => (
                    kin.q.re,
                    fresnel(pol, Complex64::new(e, 0.0), &kin).map_or(f64::NAN, |r| r.re),
                ),
                Err(_) => (f64::NAN, f64::NAN),
            },
        };
        let x = r * r * (-two_a * q).exp();
        if x == 0.0 {
            return 0.0;
        }
        jac * k_perp * q * x / (1.0 - x)
    };
    let pts = [
        0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0,
    ];
    let est = integrate_panels(
        integrand,
        &pts,
        0.0,
        0.1 * cfg.rel_tol,
        cfg.max_subdivisions,
    )
    .require("Matsubara transverse-wavenumber integral")?;
    let prime = if l == 0 { 0.5 } else { 1.0 };
    let scale = -prime * K_B * g.temperature / std::f64::consts::PI;
    Ok(Estimate {
        value: scale * est.value,
        error: scale.abs() * est.error,
        ..est
    })
}

const CHUNK: usize = 16;

/// Total pressure of one polarization channel.
///
/// Terms are evaluated in parallel chunks and summed in ascending `l`. The
/// sum stops once three consecutive terms are at most
/// `matsubara_tail_tol` times the running sum; the remaining tail is bounded
/// geometrically and added to the error.
pub fn pressure_polarized(
    model: &DielectricModel,
    pol: Polarization,
    g: GeometryThermal,
    cfg: &QuadratureConfig,
) -> Result<PolarizedPressure> {
    g.validate()?;
    cfg.validate()?;
    if model.is_vacuum() {
        return Ok(PolarizedPressure::ZERO);
    }
    let mut sum = 0.0;
    let mut quad_error = 0.0;
    let mut small_run = 0;
    let mut previous: Option<f64> = None;
    let mut l = 0;
    while l < cfg.max_matsubara_terms {
        let end = (l + CHUNK).min(cfg.max_matsubara_terms);
        let terms: Vec<Result<Estimate>> = (l..end)
            .into_par_iter()
            .map(|j| term_contribution(model, pol, g, j, cfg))
            .collect();
        for term in terms {
            let term = term?;
            sum += term.value;
            quad_error += term.error;
            l += 1;
            if term.value.abs() <= cfg.matsubara_tail_tol * sum.abs() {
                small_run += 1;
            } else {
                small_run = 0;
            }
            if small_run == 3 {
                let ratio = match previous {
                    Some(p) if p != 0.0 && (term.value / p).abs() < 1.0 => (term.value / p).abs(),
                    _ => (-g.y_l(1)).exp(),
                };
                let tail = term.value.abs() * ratio / (1.0 - ratio);
                return Ok(PolarizedPressure {
                    value: sum,
                    est_error: quad_error + tail,
                    terms_used: l,
                });
            }
            previous = Some(term.value);
        }
    }
    Err(Error::Convergence {
        what: "Matsubara sum",
        value: sum,
        est_error: quad_error,
        work: l,
    })
}

/// TM and TE channel pressures, computed concurrently.
pub fn pressure_tm_te(
    model: &DielectricModel,
    g: GeometryThermal,
    cfg: &QuadratureConfig,
) -> Result<(PolarizedPressure, PolarizedPressure)> {
    let (tm, te) = rayon::join(
        || pressure_polarized(model, Polarization::TM, g, cfg),
        || pressure_polarized(model, Polarization::TE, g, cfg),
    );
    Ok((tm?, te?))
}

/// Sum of both channels, with errors added.
pub fn pressure_total(
    model: &DielectricModel,
    g: GeometryThermal,
    cfg: &QuadratureConfig,
) -> Result<PolarizedPressure> {
    let (tm, te) = pressure_tm_te(model, g, cfg)?;
    Ok(PolarizedPressure {
        value: tm.value + te.value,
        est_error: tm.est_error + te.est_error,
        terms_used: tm.terms_used.max(te.terms_used),
    })
}
