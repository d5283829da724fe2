//! Longitudinal wave numbers and Fresnel reflection coefficients of a
//! semi-infinite plate, on the real and on the imaginary frequency axis.
//!
//! Besides `q` and `p` every [`Kinematics`] carries `p² − q²`, which is known
//! in closed form (`(1 − ε)ω²/c²` or `(ε − 1)ξ²/c²`). The coefficients are
//! evaluated as
//!
//! ```text
//! r_TE = −(p² − q²) / (q + p)²
//! r_TM = ((ε² − 1)q² − (p² − q²)) / (εq + p)²
//! ```
//!
//! which equal `(q − p)/(q + p)` and `(εq − p)/(εq + p)` but stay accurate
//! when `p ≈ q`.

use std::fmt;

use num_complex::Complex64;

use crate::constants::C;
use crate::dielectric::{DielectricModel, ExtrapolationKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Transverse magnetic (p-polarized).
    TM,
    /// Transverse electric (s-polarized).
    TE,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::TM, Polarization::TE];
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::TM => "TM",
            Polarization::TE => "TE",
        })
    }
}

/// Wave numbers at one (frequency, k⊥) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    /// Transverse wave number, 1/m.
    pub k_perp: f64,
    /// Longitudinal factor in the gap.
    pub q: Complex64,
    /// Longitudinal factor inside the plates.
    pub p: Complex64,
    p2_minus_q2: Complex64,
}

impl Kinematics {
    /// Imaginary-axis kinematics parameterized by `q` instead of k⊥.
    /// `xi_over_c` and `q` may be in any common wave-number unit.
    pub fn imag_axis_from_q(xi_over_c: f64, q: f64, eps: f64) -> Self {
        let delta = (eps - 1.0) * xi_over_c * xi_over_c;
        let k_perp = (q * q - xi_over_c * xi_over_c).max(0.0).sqrt();
        Kinematics {
            k_perp,
            q: Complex64::new(q, 0.0),
            p: Complex64::new((q * q + delta).sqrt(), 0.0),
            p2_minus_q2: Complex64::new(delta, 0.0),
        }
    }

    /// Real-axis kinematics in the evanescent sector, parameterized by the
    /// real `q > 0`.
    pub fn evanescent_from_q(omega_over_c: f64, q: f64, eps: Complex64) -> Self {
        let delta = (1.0 - eps) * (omega_over_c * omega_over_c);
        let k_perp = (q * q + omega_over_c * omega_over_c).sqrt();
        Kinematics {
            k_perp,
            q: Complex64::new(q, 0.0),
            p: branch_sqrt(Complex64::new(q * q, 0.0) + delta),
            p2_minus_q2: delta,
        }
    }

    /// `p² − q²` as computed from the permittivity.
    pub fn p2_minus_q2(&self) -> Complex64 {
        self.p2_minus_q2
    }
}

/// Principal square root (Re ≥ 0); purely imaginary results get Im ≤ 0,
/// the convention used for propagating waves.
fn branch_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re == 0.0 && r.im > 0.0 {
        -r
    } else {
        r
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be finite and non-negative, got {v}"
        )))
    }
}

/// q = √(k⊥² − ω²/c²), p = √(k⊥² − ε ω²/c²) at real frequency ω.
pub fn kinematics_real(omega: f64, k_perp: f64, eps: Complex64) -> Result<Kinematics> {
    check_nonneg("omega", omega)?;
    check_nonneg("k_perp", k_perp)?;
    let w2 = (omega / C).powi(2);
    let q2 = k_perp * k_perp - w2;
    let q = if q2 >= 0.0 {
        Complex64::new(q2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -(-q2).sqrt())
    };
    let delta = (1.0 - eps) * w2;
    Ok(Kinematics {
        k_perp,
        q,
        p: branch_sqrt(Complex64::new(q2, 0.0) + delta),
        p2_minus_q2: delta,
    })
}

/// q = √(k⊥² + ξ²/c²), p = √(k⊥² + ε ξ²/c²) at imaginary frequency iξ.
pub fn kinematics_imag(xi: f64, k_perp: f64, eps: f64) -> Result<Kinematics> {
    check_nonneg("xi", xi)?;
    check_nonneg("k_perp", k_perp)?;
    if !eps.is_finite() {
        return Err(Error::domain(format!(
            "permittivity must be finite, got {eps}"
        )));
    }
    let x2 = (xi / C).powi(2);
    let q2 = k_perp * k_perp + x2;
    let delta = (eps - 1.0) * x2;
    Ok(Kinematics {
        k_perp,
        q: Complex64::new(q2.sqrt(), 0.0),
        p: Complex64::new((q2 + delta).sqrt(), 0.0),
        p2_minus_q2: Complex64::new(delta, 0.0),
    })
}

/// Fresnel reflection coefficient for one polarization.
pub fn fresnel(pol: Polarization, eps: Complex64, kin: &Kinematics) -> Result<Complex64> {
    let (num, den) = match pol {
        Polarization::TE => (-kin.p2_minus_q2, (kin.q + kin.p).powi(2)),
        Polarization::TM => (
            (eps * eps - 1.0) * kin.q * kin.q - kin.p2_minus_q2,
            (eps * kin.q + kin.p).powi(2),
        ),
    };
    if num == Complex64::new(0.0, 0.0) {
        return Ok(num);
    }
    if den.norm() == 0.0 || !den.is_finite() {
        return Err(Error::Degenerate(format!(
            "{pol} reflection denominator is {den} at k_perp = {:e}",
            kin.k_perp
        )));
    }
    Ok(num / den)
}

/// TE coefficient at ω = 0.
///
/// Zero for dissipative (Drude-type) conduction; for the plasma model
/// `(ck − √(c²k² + ω_p²)) / (ck + √(c²k² + ω_p²))`.
pub fn r_te_zero_freq(model: &DielectricModel, k_perp: f64) -> Result<f64> {
    check_nonneg("k_perp", k_perp)?;
    let omega_p = match model {
        DielectricModel::Drude(_) => return Ok(0.0),
        DielectricModel::Plasma(p) => p.omega_p,
        DielectricModel::Tabulated { tail, .. } => match tail {
            ExtrapolationKind::DrudeTail(_) => return Ok(0.0),
            ExtrapolationKind::PlasmaTail(p) => p.omega_p,
        },
    };
    if omega_p == 0.0 {
        return Ok(0.0);
    }
    let ck = C * k_perp;
    Ok(-(omega_p * omega_p) / (ck + (ck * ck + omega_p * omega_p).sqrt()).powi(2))
}

/// TM coefficient at ω = 0.
///
/// Every conducting model has ε(iξ)·ξ² → const > 0 as ξ → 0, which drives
/// r_TM to 1 for all k⊥. This value is what makes the l = 0 TM Matsubara
/// term equal the classical result −k_B T ζ(3)/(8π a³).
pub fn r_tm_zero_freq(model: &DielectricModel, k_perp: f64) -> Result<f64> {
    check_nonneg("k_perp", k_perp)?;
    if model.is_vacuum() {
        Ok(0.0)
    } else {
        Ok(1.0)
    }
}
