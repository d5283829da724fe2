//! Dielectric permittivity of the plate material on the real and imaginary
//! frequency axes.
//!
//! Three models are supported: the dissipative Drude model, the
//! dissipationless plasma model, and tabulated optical absorption data
//! continued to low frequencies by one of the two. Tabulated data are mapped
//! to the imaginary axis with the Kramers-Kronig relation
//!
//! ```text
//! ε(iξ) = 1 + (2/π) ∫₀^∞ ω Im ε(ω) / (ω² + ξ²) dω
//! ```
//!
//! evaluated in `ln ω` with one quadrature panel per table interval.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, uniform_breakpoints};

/// Plasma frequency of gold, rad/s.
pub const AU_PLASMA_FREQUENCY: f64 = 1.37e16;

/// Drude relaxation parameter of gold at room temperature, rad/s.
pub const AU_RELAXATION_300K: f64 = 0.53e14;

const SHIPPED_TABLE: &str = include_str!("../data/au_drude_synthetic.txt");

/// Parameters of the free-electron response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    /// Plasma frequency, rad/s.
    pub omega_p: f64,
    /// Relaxation parameter, rad/s. Zero gives the plasma model.
    pub gamma: f64,
}

impl DrudeParams {
    pub const GOLD: DrudeParams = DrudeParams {
        omega_p: AU_PLASMA_FREQUENCY,
        gamma: AU_RELAXATION_300K,
    };

    /// `omega_p = 0` is accepted and describes vacuum.
    pub fn new(omega_p: f64, gamma: f64) -> Result<Self> {
        let p = DrudeParams { omega_p, gamma };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega_p.is_finite() && self.omega_p >= 0.0) {
            return Err(Error::validation(format!(
                "plasma frequency must be finite and non-negative, got {}",
                self.omega_p
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::validation(format!(
                "relaxation parameter must be finite and non-negative, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// 1 − ω_p²/(ω(ω + iγ)), split into real and imaginary parts so that
    /// neither suffers cancellation at small ω.
    pub fn eps_real_axis(&self, omega: f64) -> Complex64 {
        let wp2 = self.omega_p * self.omega_p;
        let d = omega * omega + self.gamma * self.gamma;
        Complex64::new(1.0 - wp2 / d, wp2 * self.gamma / (omega * d))
    }

    /// Im ε(ω) of the Drude model.
    pub fn im_eps(&self, omega: f64) -> f64 {
        if self.gamma == 0.0 {
            return 0.0;
        }
        self.omega_p * self.omega_p * self.gamma
            / (omega * (omega * omega + self.gamma * self.gamma))
    }

    /// 1 + ω_p²/(ξ(ξ + γ)).
    pub fn eps_imag_axis(&self, xi: f64) -> f64 {
        1.0 + self.omega_p * self.omega_p / (xi * (xi + self.gamma))
    }
}

/// How tabulated data are continued below the lowest tabulated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtrapolationKind {
    /// Drude absorption below the table. Requires `gamma > 0`.
    DrudeTail(DrudeParams),
    /// No absorption below the table; the conduction electrons enter
    /// through the pole term ω_p²/ξ². When `gamma > 0` the Drude
    /// absorption with these parameters is removed from the tabulated
    /// data first, so that only the bound-electron part is transformed.
    PlasmaTail(DrudeParams),
}

impl ExtrapolationKind {
    pub fn params(&self) -> DrudeParams {
        match *self {
            ExtrapolationKind::DrudeTail(p) | ExtrapolationKind::PlasmaTail(p) => p,
        }
    }

    pub fn is_dissipative(&self) -> bool {
        matches!(self, ExtrapolationKind::DrudeTail(_))
    }

    fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if let ExtrapolationKind::DrudeTail(p) = self {
            if p.gamma <= 0.0 {
                return Err(Error::validation(
                    "a Drude extrapolation tail needs a positive relaxation parameter",
                ));
            }
        }
        Ok(())
    }
}

/// Samples of Im ε(ω) on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    omega: Vec<f64>,
    im_eps: Vec<f64>,
}

impl OpticalTable {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        let (omega, im_eps): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        let table = OpticalTable { omega, im_eps };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if self.omega.len() < 2 {
            return Err(Error::validation(
                "an optical table needs at least 2 samples",
            ));
        }
        for (i, (&w, &im)) in self.omega.iter().zip(&self.im_eps).enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::validation(format!(
                    "sample {i}: frequency must be positive, got {w}"
                )));
            }
            if !(im.is_finite() && im >= 0.0) {
                return Err(Error::validation(format!(
                    "sample {i}: Im ε must be non-negative, got {im}"
                )));
            }
            if i > 0 && w <= self.omega[i - 1] {
                return Err(Error::validation(format!(
                    "sample {i}: frequencies must be strictly increasing"
                )));
            }
        }
        Ok(())
    }

    /// Parses the text format: `#` comments, an optional
    /// `# columns: omega_rad_s, im_eps` or `# columns: omega_rad_s, n, k`
    /// header, and whitespace- or comma-separated rows in ascending ω.
    /// With `n, k` columns Im ε = 2nk.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::TableParse {
            path: source.to_string(),
            line,
            message,
        };
        let mut n_k_columns = false;
        let mut samples: Vec<(f64, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(spec) = comment.strip_prefix("columns:") {
                    if !samples.is_empty() {
                        return Err(err(line_no, "column header after data rows".into()));
                    }
                    let names: Vec<&str> = spec
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .collect();
                    n_k_columns = match names.as_slice() {
                        ["omega_rad_s", "im_eps"] => false,
                        ["omega_rad_s", "n", "k"] => true,
                        _ => {
                            return Err(err(
                                line_no,
                                format!("unsupported column layout `{}`", spec.trim()),
                            ))
                        }
                    };
                }
                continue;
            }
            let fields = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| err(line_no, format!("not a number: `{s}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let expected = if n_k_columns { 3 } else { 2 };
            if fields.len() != expected {
                return Err(err(
                    line_no,
                    format!("expected {expected} columns, found {}", fields.len()),
                ));
            }
            let omega = fields[0];
            let im = if n_k_columns {
                2.0 * fields[1] * fields[2]
            } else {
                fields[1]
            };
            if !(omega.is_finite() && omega > 0.0) {
                return Err(err(
                    line_no,
                    format!("frequency must be positive, got {omega}"),
                ));
            }
            if !(im.is_finite() && im >= 0.0) {
                return Err(err(line_no, format!("Im ε must be non-negative, got {im}")));
            }
            if let Some(&(prev, _)) = samples.last() {
                if omega <= prev {
                    return Err(err(
                        line_no,
                        format!(
                            "rows must be sorted by ascending frequency ({omega} after {prev})"
                        ),
                    ));
                }
            }
            samples.push((omega, im));
        }
        if samples.len() < 2 {
            return Err(err(
                text.lines().count(),
                format!("need at least 2 data rows, found {}", samples.len()),
            ));
        }
        OpticalTable::new(samples)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        OpticalTable::parse(&text, &path.display().to_string())
    }

    /// Serializes in the `omega_rad_s, im_eps` layout accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = String::from("# columns: omega_rad_s, im_eps\n");
        for (w, im) in self.omega.iter().zip(&self.im_eps) {
            out.push_str(&format!("{w:.16e} {im:.16e}\n"));
        }
        out
    }

    /// Drude absorption sampled log-uniformly on `[omega_lo, omega_hi]`.
    pub fn synthetic_drude(
        params: DrudeParams,
        omega_lo: f64,
        omega_hi: f64,
        points_per_decade: usize,
    ) -> Result<Self> {
        if !(omega_lo > 0.0 && omega_hi > omega_lo && points_per_decade > 0) {
            return Err(Error::validation("invalid synthetic table range"));
        }
        let decades = (omega_hi / omega_lo).log10();
        let n = (decades * points_per_decade as f64).round() as usize;
        let samples = (0..=n)
            .map(|i| {
                let w = omega_lo * 10f64.powf(decades * i as f64 / n as f64);
                (w, params.im_eps(w))
            })
            .collect();
        OpticalTable::new(samples)
    }

    /// The Drude-consistent gold table bundled with the crate
    /// (1e11–1e18 rad/s, 40 samples per decade).
    pub fn shipped_synthetic() -> Self {
        OpticalTable::parse(SHIPPED_TABLE, "au_drude_synthetic.txt")
            .expect("bundled table is valid")
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn im_eps(&self) -> &[f64] {
        &self.im_eps
    }

    pub fn omega_min(&self) -> f64 {
        self.omega[0]
    }

    pub fn omega_max(&self) -> f64 {
        self.omega[self.omega.len() - 1]
    }

    /// Interpolated Im ε inside the tabulated range: log-log linear between
    /// positive neighbours, linear when either neighbour is zero.
    pub fn interpolate(&self, omega: f64) -> Option<f64> {
        if !(omega >= self.omega_min() && omega <= self.omega_max()) {
            return None;
        }
        let i = self
            .omega
            .partition_point(|&w| w <= omega)
            .clamp(1, self.len() - 1)
            - 1;
        let (w0, w1) = (self.omega[i], self.omega[i + 1]);
        let (e0, e1) = (self.im_eps[i], self.im_eps[i + 1]);
        if e0 > 0.0 && e1 > 0.0 {
            let t = (omega / w0).ln() / (w1 / w0).ln();
            Some((e0.ln() + t * (e1 / e0).ln()).exp())
        } else {
            let t = (omega - w0) / (w1 - w0);
            Some(e0 + t * (e1 - e0))
        }
    }

    /// Continuation above the table, Im ε ∝ ω⁻³ matched at the last sample.
    fn high_frequency_tail(&self, omega: f64) -> f64 {
        let w = self.omega_max();
        self.im_eps[self.len() - 1] * (w / omega).powi(3)
    }
}

/// A plate material.
#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    Drude(DrudeParams),
    Plasma(DrudeParams),
    Tabulated {
        table: Arc<OpticalTable>,
        tail: ExtrapolationKind,
    },
}

impl DielectricModel {
    /// Drude model; `gamma = 0` yields the plasma model.
    pub fn drude(params: DrudeParams) -> Result<Self> {
        params.validate()?;
        if params.gamma == 0.0 {
            Ok(DielectricModel::Plasma(params))
        } else {
            Ok(DielectricModel::Drude(params))
        }
    }

    pub fn plasma(omega_p: f64) -> Result<Self> {
        Ok(DielectricModel::Plasma(DrudeParams::new(omega_p, 0.0)?))
    }

    pub fn tabulated(table: OpticalTable, tail: ExtrapolationKind) -> Result<Self> {
        table.validate()?;
        tail.validate()?;
        Ok(DielectricModel::Tabulated {
            table: Arc::new(table),
            tail,
        })
    }

    /// ε ≡ 1.
    pub fn vacuum() -> Self {
        DielectricModel::Plasma(DrudeParams {
            omega_p: 0.0,
            gamma: 0.0,
        })
    }

    pub fn gold_drude() -> Self {
        DielectricModel::Drude(DrudeParams::GOLD)
    }

    pub fn gold_plasma() -> Self {
        DielectricModel::Plasma(DrudeParams {
            gamma: 0.0,
            ..DrudeParams::GOLD
        })
    }

    pub fn is_vacuum(&self) -> bool {
        match self {
            DielectricModel::Drude(p) | DielectricModel::Plasma(p) => p.omega_p == 0.0,
            DielectricModel::Tabulated { table, tail } => {
                tail.params().omega_p == 0.0 && table.im_eps.iter().all(|&e| e == 0.0)
            }
        }
    }

    /// Whether the low-frequency (conduction-electron) response is
    /// dissipative. Decides the zero-frequency TE coefficient and whether
    /// real-frequency evanescent contributions can be nonzero.
    pub fn is_dissipative(&self) -> bool {
        match self {
            DielectricModel::Drude(_) => true,
            DielectricModel::Plasma(_) => false,
            DielectricModel::Tabulated { tail, .. } => tail.is_dissipative(),
        }
    }

    /// Parameters of the conduction-electron response at low frequency.
    pub fn conduction(&self) -> DrudeParams {
        match self {
            DielectricModel::Drude(p) => *p,
            DielectricModel::Plasma(p) => DrudeParams { gamma: 0.0, ..*p },
            DielectricModel::Tabulated { tail, .. } => match tail {
                ExtrapolationKind::DrudeTail(p) => *p,
                ExtrapolationKind::PlasmaTail(p) => DrudeParams { gamma: 0.0, ..*p },
            },
        }
    }

    pub fn eval_real(&self, omega: f64) -> Result<Complex64> {
        eval_real(self, omega)
    }

    pub fn eval_imag(&self, xi: f64) -> Result<f64> {
        eval_imag(self, xi)
    }
}

impl fmt::Display for DielectricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DielectricModel::Drude(p) => {
                write!(f, "drude omega_p={:e} gamma={:e}", p.omega_p, p.gamma)
            }
            DielectricModel::Plasma(p) => write!(f, "plasma omega_p={:e}", p.omega_p),
            DielectricModel::Tabulated { table, tail } => {
                let (kind, p) = match tail {
                    ExtrapolationKind::DrudeTail(p) => ("drude", p),
                    ExtrapolationKind::PlasmaTail(p) => ("plasma", p),
                };
                write!(
                    f,
                    "tabulated samples={} range=[{:e},{:e}] tail={} omega_p={:e} gamma={:e}",
                    table.len(),
                    table.omega_min(),
                    table.omega_max(),
                    kind,
                    p.omega_p,
                    p.gamma
                )
            }
        }
    }
}

/// Permittivity at real frequency `omega > 0`.
///
/// Tabulated models only store absorption, so their real-axis permittivity
/// is available below the lowest tabulated frequency, where it is the
/// extrapolation tail's.
pub fn eval_real(model: &DielectricModel, omega: f64) -> Result<Complex64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!(
            "real-axis permittivity needs omega > 0, got {omega}; use the zero-frequency reflection coefficients for the static limit"
        )));
    }
    match model {
        DielectricModel::Drude(p) => Ok(p.eps_real_axis(omega)),
        DielectricModel::Plasma(p) => Ok(Complex64::new(1.0 - (p.omega_p / omega).powi(2), 0.0)),
        DielectricModel::Tabulated { table, tail } => {
            if omega >= table.omega_min() {
                return Err(Error::Capability(format!(
                    "tabulated model has no real-axis permittivity at {omega:e} rad/s (only below {:e})",
                    table.omega_min()
                )));
            }
            match tail {
                ExtrapolationKind::DrudeTail(p) => Ok(p.eps_real_axis(omega)),
                ExtrapolationKind::PlasmaTail(p) => {
                    Ok(Complex64::new(1.0 - (p.omega_p / omega).powi(2), 0.0))
                }
            }
        }
    }
}

/// Permittivity at imaginary frequency iξ (real, ≥ 1).
pub fn eval_imag(model: &DielectricModel, xi: f64) -> Result<f64> {
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::domain(format!(
            "imaginary-axis permittivity needs finite xi >= 0, got {xi}"
        )));
    }
    match model {
        DielectricModel::Plasma(p) => {
            if p.omega_p == 0.0 {
                Ok(1.0)
            } else {
                Ok(1.0 + (p.omega_p / xi).powi(2))
            }
        }
        _ if xi == 0.0 => Err(Error::domain(
            "ε(0) diverges for this model; use the zero-frequency reflection coefficients",
        )),
        DielectricModel::Drude(p) => Ok(p.eps_imag_axis(xi)),
        DielectricModel::Tabulated { table, tail } => kk_transform(table, *tail, xi),
    }
}

/// ε(iξ) from tabulated absorption by the Kramers-Kronig relation.
pub fn kk_transform(table: &OpticalTable, tail: ExtrapolationKind, xi: f64) -> Result<f64> {
    table.validate()?;
    tail.validate()?;
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::domain(format!(
            "Kramers-Kronig needs xi > 0, got {xi}"
        )));
    }
    kk_with_switch(table, tail, xi, 0)
}

/// Kramers-Kronig integral with the tail used up to `table.omega[switch]`
/// and the table above it.
fn kk_with_switch(
    table: &OpticalTable,
    tail: ExtrapolationKind,
    xi: f64,
    switch: usize,
) -> Result<f64> {
    let params = tail.params();
    let subtract_drude = !tail.is_dissipative();
    let omega_switch = table.omega[switch];

    // Im ε as seen by the transform, minus the Drude part for plasma tails.
    let absorption = |omega: f64| -> f64 {
        let base = if omega < omega_switch {
            if subtract_drude {
                return 0.0;
            }
            params.im_eps(omega)
        } else if omega <= table.omega_max() {
            table.interpolate(omega).unwrap_or(0.0)
        } else {
            table.high_frequency_tail(omega)
        };
        if subtract_drude {
            base - params.im_eps(omega)
        } else {
            base
        }
    };
    let integrand = |s: f64| {
        let omega = s.exp();
        let w2 = omega * omega;
        w2 * absorption(omega) / (w2 + xi * xi)
    };

    const DECADE: f64 = std::f64::consts::LN_10;
    // e^{-46} ≈ 1e-20: below/above this the transform is negligible.
    const SPAN: f64 = 46.0;
    let s_switch = omega_switch.ln();
    let s_max = table.omega_max().ln();

    let mut points = Vec::new();
    if !subtract_drude {
        points.extend(uniform_breakpoints(s_switch - SPAN, s_switch, DECADE));
        points.pop();
    }
    points.extend(table.omega[switch..].iter().map(|w| w.ln()));
    points.pop();
    points.extend(uniform_breakpoints(s_max, s_max + SPAN, DECADE));

    let est = integrate_panels(integrand, &points, 0.0, 1e-11, 20_000)
        .require("Kramers-Kronig integral")?;
    let pole = if subtract_drude && params.omega_p > 0.0 {
        (params.omega_p / xi).powi(2)
    } else {
        0.0
    };
    Ok(1.0 + std::f64::consts::FRAC_2_PI * est.value + pole)
}

/// How much the hard switch between extrapolation tail and table matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionReport {
    /// Im ε of the tail at the lowest tabulated frequency.
    pub tail_im_eps: f64,
    /// Tabulated Im ε at the lowest tabulated frequency.
    pub table_im_eps: f64,
    /// (tail − table)/table at the junction; infinite when the table is 0
    /// there and the tail is not.
    pub relative_jump: f64,
    /// Relative change of ε(iξ) when the switch moves up by one sample.
    pub kk_sensitivity: f64,
}

pub fn junction_diagnostic(
    table: &OpticalTable,
    tail: ExtrapolationKind,
    xi: f64,
) -> Result<JunctionReport> {
    let base = kk_transform(table, tail, xi)?;
    let shifted = kk_with_switch(table, tail, xi, 1)?;
    let w0 = table.omega_min();
    let tail_im = match tail {
        ExtrapolationKind::DrudeTail(p) => p.im_eps(w0),
        ExtrapolationKind::PlasmaTail(_) => 0.0,
    };
    let table_im = table.im_eps[0];
    let relative_jump = if table_im > 0.0 {
        (tail_im - table_im) / table_im
    } else if tail_im == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(JunctionReport {
        tail_im_eps: tail_im,
        table_im_eps: table_im,
        relative_jump,
        kk_sensitivity: (shifted - base) / base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const XI1_300K: f64 = 2.4683e14;

    fn gold_drude_table() -> OpticalTable {
        OpticalTable::synthetic_drude(DrudeParams::GOLD, 1e11, 1e18, 40).unwrap()
    }

    #[test]
    fn drude_real_axis_at_plasma_frequency() {
        let eps = eval_real(&DielectricModel::gold_drude(), AU_PLASMA_FREQUENCY).unwrap();
        // 1 − 1/(1 + ix) with x = γ/ω_p: Re = x²/(1+x²), Im = x/(1+x²)
        let x = AU_RELAXATION_300K / AU_PLASMA_FREQUENCY;
        assert_relative_eq!(eps.re, x * x / (1.0 + x * x), max_relative = 1e-6);
        assert_relative_eq!(eps.re, 1.4966e-5, max_relative = 1e-4);
        assert_relative_eq!(eps.im, 3.868e-3, max_relative = 1e-3);
    }

    #[test]
    fn plasma_real_axis() {
        let m = DielectricModel::gold_plasma();
        assert!(eval_real(&m, AU_PLASMA_FREQUENCY).unwrap().norm() < 1e-15);
        let e = eval_real(&m, 2.0 * AU_PLASMA_FREQUENCY).unwrap();
        assert_relative_eq!(e.re, 0.75, max_relative = 1e-15);
        assert_eq!(e.im, 0.0);
    }

    #[test]
    fn real_axis_rejects_nonpositive_frequency() {
        for w in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                eval_real(&DielectricModel::gold_drude(), w),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn imaginary_axis_values() {
        assert_relative_eq!(
            eval_imag(&DielectricModel::gold_drude(), XI1_300K).unwrap(),
            2537.1,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            eval_imag(&DielectricModel::gold_plasma(), XI1_300K).unwrap(),
            3081.6,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            eval_imag(&DielectricModel::gold_plasma(), AU_PLASMA_FREQUENCY).unwrap(),
            2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn zero_imaginary_frequency() {
        assert!(matches!(
            eval_imag(&DielectricModel::gold_drude(), 0.0),
            Err(Error::Domain(_))
        ));
        let tab = DielectricModel::tabulated(
            gold_drude_table(),
            ExtrapolationKind::DrudeTail(DrudeParams::GOLD),
        )
        .unwrap();
        assert!(matches!(eval_imag(&tab, 0.0), Err(Error::Domain(_))));
        assert_eq!(
            eval_imag(&DielectricModel::gold_plasma(), 0.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(eval_imag(&DielectricModel::vacuum(), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn drude_with_zero_gamma_is_plasma() {
        let m = DielectricModel::drude(DrudeParams::new(1e16, 0.0).unwrap()).unwrap();
        assert!(matches!(m, DielectricModel::Plasma(_)));
        assert!(!m.is_dissipative());
    }

    #[test]
    fn gamma_to_zero_approaches_plasma() {
        let d = DielectricModel::drude(
            DrudeParams::new(AU_PLASMA_FREQUENCY, AU_PLASMA_FREQUENCY * 1e-6).unwrap(),
        )
        .unwrap();
        let p = DielectricModel::gold_plasma();
        let ed = eval_imag(&d, XI1_300K).unwrap();
        let ep = eval_imag(&p, XI1_300K).unwrap();
        assert!((ed - ep).abs() / ep < 1e-4);
    }

    #[test]
    fn kk_reproduces_drude() {
        let table = gold_drude_table();
        let tail = ExtrapolationKind::DrudeTail(DrudeParams::GOLD);
        for (xi, expected) in [(XI1_300K, 2537.1), (1e16, 2.866)] {
            let v = kk_transform(&table, tail, xi).unwrap();
            assert_relative_eq!(v, expected, max_relative = 5e-3);
            let exact = DrudeParams::GOLD.eps_imag_axis(xi);
            assert_relative_eq!(v, exact, max_relative = 1e-3);
        }
    }

    #[test]
    fn kk_vacuum_table_is_one() {
        let table = OpticalTable::new(vec![(1e12, 0.0), (1e13, 0.0), (1e14, 0.0)]).unwrap();
        let tail = ExtrapolationKind::PlasmaTail(DrudeParams::new(0.0, 0.0).unwrap());
        assert_eq!(kk_transform(&table, tail, 1e13).unwrap(), 1.0);
    }

    #[test]
    fn plasma_tail_on_drude_table_recovers_plasma() {
        let table = gold_drude_table();
        let tail = ExtrapolationKind::PlasmaTail(DrudeParams::GOLD);
        for xi in [XI1_300K, 1e15, 1e16] {
            let v = kk_transform(&table, tail, xi).unwrap();
            let plasma = 1.0 + (AU_PLASMA_FREQUENCY / xi).powi(2);
            // Log-log interpolation at 40 samples per decade.
            assert_relative_eq!(v, plasma, max_relative = 1e-3);
        }
    }

    #[test]
    fn drude_tail_needs_gamma() {
        let tail = ExtrapolationKind::DrudeTail(DrudeParams::new(1e16, 0.0).unwrap());
        assert!(DielectricModel::tabulated(gold_drude_table(), tail).is_err());
    }

    #[test]
    fn tabulated_real_axis_only_in_tail() {
        let m = DielectricModel::tabulated(
            gold_drude_table(),
            ExtrapolationKind::DrudeTail(DrudeParams::GOLD),
        )
        .unwrap();
        assert_eq!(
            eval_real(&m, 1e10).unwrap(),
            DrudeParams::GOLD.eps_real_axis(1e10)
        );
        assert!(matches!(eval_real(&m, 1e12), Err(Error::Capability(_))));
    }

    #[test]
    fn parse_two_and_three_columns() {
        let t = OpticalTable::parse("# columns: omega_rad_s, im_eps\n1e12, 2.0\n1e13 1.0\n", "t")
            .unwrap();
        assert_eq!(t.im_eps(), &[2.0, 1.0]);
        let t = OpticalTable::parse(
            "# Au\n# columns: omega_rad_s, n, k\n\n1e12 0.5 2.0\n2e12,1.0,3.0\n",
            "t",
        )
        .unwrap();
        assert_eq!(t.im_eps(), &[2.0, 6.0]);
        assert_eq!(t.omega(), &[1e12, 2e12]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("# columns: omega_rad_s, im_eps\n1e12 1\n1e11 1\n", 3),
            ("1e12 1\nfoo 1\n", 2),
            ("1e12 1 3\n", 1),
            ("# columns: wavelength, n\n", 1),
            ("1e12 -1\n2e12 1\n", 1),
        ];
        for (text, line) in cases {
            match OpticalTable::parse(text, "t.txt") {
                Err(Error::TableParse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(OpticalTable::parse("1e12 1\n", "t").is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = gold_drude_table();
        assert_eq!(OpticalTable::parse(&t.to_text(), "x").unwrap(), t);
    }

    #[test]
    fn shipped_table_is_the_synthetic_gold_table() {
        let shipped = OpticalTable::shipped_synthetic();
        let fresh = gold_drude_table();
        assert_eq!(shipped.len(), fresh.len());
        for (a, b) in shipped.im_eps().iter().zip(fresh.im_eps()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-14);
        }
    }

    #[test]
    fn interpolation_is_exact_for_power_laws() {
        let t = OpticalTable::new(vec![(1.0, 1.0), (10.0, 1e-3), (100.0, 1e-6)]).unwrap();
        assert_relative_eq!(
            t.interpolate(3.0).unwrap(),
            3f64.powi(-3),
            max_relative = 1e-12
        );
        assert_eq!(t.interpolate(0.5), None);
    }

    #[test]
    fn junction_diagnostic_reports_small_jump_for_consistent_tail() {
        let table = gold_drude_table();
        let r = junction_diagnostic(
            &table,
            ExtrapolationKind::DrudeTail(DrudeParams::GOLD),
            XI1_300K,
        )
        .unwrap();
        assert!(r.relative_jump.abs() < 1e-12);
        assert!(r.kk_sensitivity.abs() < 1e-4);
        let mismatched = ExtrapolationKind::DrudeTail(
            DrudeParams::new(AU_PLASMA_FREQUENCY, 4.0 * AU_RELAXATION_300K).unwrap(),
        );
        let r = junction_diagnostic(&table, mismatched, XI1_300K).unwrap();
        assert_relative_eq!(r.relative_jump, -0.75, max_relative = 1e-3);
    }
}
