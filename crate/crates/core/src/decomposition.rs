//! Four-channel decomposition of the pressure and separation sweeps.
//!
//! Channel totals come from the Matsubara sum, evanescent parts from the
//! real-frequency integral, and propagating parts are their difference.

use rayon::prelude::*;

use crate::dielectric::DielectricModel;
use crate::error::{Error, Result};
use crate::evanescent::{evanescent_pressure, EvanescentResult};
use crate::matsubara::{
    classical_limit, pressure_polarized, ClassicalModel, GeometryThermal, PolarizedPressure,
};
use crate::quadrature::QuadratureConfig;
use crate::reflection::Polarization;

/// Absolute error estimates of the four computed inputs, Pa.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelErrors {
    pub tm_total: f64,
    pub tm_evan: f64,
    pub te_total: f64,
    pub te_evan: f64,
}

impl ChannelErrors {
    /// Error of `tm_prop = tm_total − tm_evan`.
    pub fn tm_prop(&self) -> f64 {
        self.tm_total.hypot(self.tm_evan)
    }

    /// Error of `te_prop = te_total − te_evan`.
    pub fn te_prop(&self) -> f64 {
        self.te_total.hypot(self.te_evan)
    }
}

/// Pressures in Pa; negative means attraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureComponents {
    pub tm_prop: f64,
    pub tm_evan: f64,
    pub te_prop: f64,
    pub te_evan: f64,
    pub tm_total: f64,
    pub te_total: f64,
    pub total: f64,
    /// Quadrature sum of the four input errors.
    pub est_error: f64,
    pub errors: ChannelErrors,
}

impl PressureComponents {
    pub const ZERO: PressureComponents = PressureComponents {
        tm_prop: 0.0,
        tm_evan: 0.0,
        te_prop: 0.0,
        te_evan: 0.0,
        tm_total: 0.0,
        te_total: 0.0,
        total: 0.0,
        est_error: 0.0,
        errors: ChannelErrors {
            tm_total: 0.0,
            tm_evan: 0.0,
            te_total: 0.0,
            te_evan: 0.0,
        },
    };

    /// Assembles the components from the channel totals and evanescent parts.
    pub fn from_parts(
        tm: PolarizedPressure,
        te: PolarizedPressure,
        tm_evan: EvanescentResult,
        te_evan: EvanescentResult,
    ) -> Self {
        let errors = ChannelErrors {
            tm_total: tm.est_error,
            tm_evan: tm_evan.est_error,
            te_total: te.est_error,
            te_evan: te_evan.est_error,
        };
        PressureComponents {
            tm_prop: tm.value - tm_evan.value,
            tm_evan: tm_evan.value,
            te_prop: te.value - te_evan.value,
            te_evan: te_evan.value,
            tm_total: tm.value,
            te_total: te.value,
            total: tm.value + te.value,
            est_error: (errors.tm_total.powi(2)
                + errors.tm_evan.powi(2)
                + errors.te_total.powi(2)
                + errors.te_evan.powi(2))
            .sqrt(),
            errors,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Separation, m.
    pub a: f64,
    pub components: PressureComponents,
    /// total / P_D⁰(a, T).
    pub ratio_to_classical: f64,
}

/// Matsubara channel totals at one separation, without the evanescent split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalsRow {
    pub a: f64,
    pub tm: PolarizedPressure,
    pub te: PolarizedPressure,
}

impl TotalsRow {
    pub fn total(&self) -> f64 {
        self.tm.value + self.te.value
    }

    pub fn est_error(&self) -> f64 {
        self.tm.est_error + self.te.est_error
    }
}

pub fn decompose(
    model: &DielectricModel,
    g: GeometryThermal,
    cfg: &QuadratureConfig,
) -> Result<PressureComponents> {
    g.validate()?;
    cfg.validate()?;
    let ((tm, te), (tm_evan, te_evan)) = rayon::join(
        || {
            rayon::join(
                || pressure_polarized(model, Polarization::TM, g, cfg),
                || pressure_polarized(model, Polarization::TE, g, cfg),
            )
        },
        || {
            rayon::join(
                || evanescent_pressure(model, Polarization::TM, g, cfg),
                || evanescent_pressure(model, Polarization::TE, g, cfg),
            )
        },
    );
    Ok(PressureComponents::from_parts(tm?, te?, tm_evan?, te_evan?))
}

/// Total pressure relative to the classical Drude limit −k_BTζ(3)/(8πa³).
pub fn ratio_to_classical(components: &PressureComponents, g: GeometryThermal) -> f64 {
    components.total / classical_limit(ClassicalModel::Drude, g)
}

/// (pD − pP)/pP.
pub fn relative_deviation_models(p_d: f64, p_p: f64) -> Result<f64> {
    if p_p == 0.0 || !p_p.is_finite() || !p_d.is_finite() {
        return Err(Error::domain(format!(
            "relative deviation needs finite values and a nonzero reference, got {p_d} and {p_p}"
        )));
    }
    Ok((p_d - p_p) / p_p)
}

/// Checks that a separation grid is non-empty, positive and strictly
/// increasing.
pub fn validate_grid(a_grid: &[f64]) -> Result<()> {
    if a_grid.is_empty() {
        return Err(Error::validation("separation grid is empty"));
    }
    if let Some(a) = a_grid.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::validation(format!(
            "separation must be positive, got {a}"
        )));
    }
    if let Some(w) = a_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::validation(format!(
            "separation grid must be strictly increasing, got {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// One decomposed row per separation, in grid order.
pub fn sweep(
    model: &DielectricModel,
    a_grid: &[f64],
    temperature: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<SweepRow>> {
    validate_grid(a_grid)?;
    a_grid
        .par_iter()
        .map(|&a| {
            let g = GeometryThermal::new(a, temperature)?;
            let components = decompose(model, g, cfg)?;
            Ok(SweepRow {
                a,
                components,
                ratio_to_classical: ratio_to_classical(&components, g),
            })
        })
        .collect()
}

/// Matsubara channel totals per separation, in grid order.
pub fn sweep_totals(
    model: &DielectricModel,
    a_grid: &[f64],
    temperature: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<TotalsRow>> {
    validate_grid(a_grid)?;
    cfg.validate()?;
    a_grid
        .par_iter()
        .map(|&a| {
            let g = GeometryThermal::new(a, temperature)?;
            let (tm, te) = crate::matsubara::pressure_tm_te(model, g, cfg)?;
            Ok(TotalsRow { a, tm, te })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gt(a: f64) -> GeometryThermal {
        GeometryThermal::new(a, 300.0).unwrap()
    }

    fn ulps_close(a: f64, b: f64, scale: f64) -> bool {
        (a - b).abs() <= 4.0 * f64::EPSILON * scale.abs()
    }

    #[test]
    fn plasma_has_no_evanescent_part() {
        let cfg = QuadratureConfig::default();
        let c = decompose(&DielectricModel::gold_plasma(), gt(1e-6), &cfg).unwrap();
        assert_eq!((c.tm_evan, c.te_evan), (0.0, 0.0));
        assert_eq!(c.tm_prop, c.tm_total);
        assert_eq!(c.te_prop, c.te_total);
    }

    #[test]
    fn drude_tm_is_partially_compensated() {
        let cfg = QuadratureConfig::default();
        let c = decompose(&DielectricModel::gold_drude(), gt(1e-6), &cfg).unwrap();
        assert!(c.tm_evan > 0.0);
        assert!(c.tm_prop < c.tm_total && c.tm_total < 0.0);
        assert!(ulps_close(c.tm_prop + c.tm_evan, c.tm_total, c.tm_prop));
        assert!(ulps_close(c.te_prop + c.te_evan, c.te_total, c.te_prop));
        assert_eq!(c.tm_total + c.te_total, c.total);
    }

    #[test]
    fn vacuum_is_all_zero() {
        let cfg = QuadratureConfig::default();
        let c = decompose(&DielectricModel::vacuum(), gt(1e-6), &cfg).unwrap();
        assert_eq!(c, PressureComponents::ZERO);
    }

    #[test]
    fn classical_ratios_at_large_separation() {
        let cfg = QuadratureConfig::default();
        let g = gt(50e-6);
        let d = decompose(&DielectricModel::gold_drude(), g, &cfg).unwrap();
        let p = decompose(&DielectricModel::gold_plasma(), g, &cfg).unwrap();
        assert_relative_eq!(ratio_to_classical(&d, g), 1.0, max_relative = 1e-2);
        assert_relative_eq!(ratio_to_classical(&p, g), 2.0, max_relative = 1e-2);
    }

    #[test]
    fn relative_deviation() {
        assert_eq!(relative_deviation_models(-2.0, -2.0).unwrap(), 0.0);
        assert_relative_eq!(
            relative_deviation_models(-1.1, -1.0).unwrap(),
            0.1,
            max_relative = 1e-12
        );
        assert!(matches!(
            relative_deviation_models(1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[1e-6]).is_ok());
        for grid in [
            &[][..],
            &[1e-6, 1e-6][..],
            &[2e-6, 1e-6][..],
            &[0.0][..],
            &[f64::NAN][..],
        ] {
            assert!(matches!(validate_grid(grid), Err(Error::Validation(_))));
        }
    }

    #[test]
    fn single_point_sweep_equals_decompose() {
        let cfg = QuadratureConfig::default();
        let model = DielectricModel::gold_drude();
        let rows = sweep(&model, &[3e-6], 300.0, &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            rows[0].components,
            decompose(&model, gt(3e-6), &cfg).unwrap()
        );
    }

    #[test]
    fn sweep_ratios_decrease_with_separation() {
        let cfg = QuadratureConfig::default();
        let grid = [0.5e-6, 1e-6, 2e-6, 4e-6];
        for (model, limit) in [
            (DielectricModel::gold_drude(), 1.0),
            (DielectricModel::gold_plasma(), 2.0),
        ] {
            let rows = sweep_totals(&model, &grid, 300.0, &cfg).unwrap();
            let ratios: Vec<f64> = rows
                .iter()
                .map(|r| r.total() / classical_limit(ClassicalModel::Drude, gt(r.a)))
                .collect();
            assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
            assert!(ratios.iter().all(|&r| r > limit));
        }
    }

    proptest! {
        #[test]
        fn assembly_invariants(
            tm in -1e-3f64..0.0, te in -1e-3f64..0.0,
            tm_e in 0.0f64..1e-3, te_e in -1e-3f64..1e-3,
            err in 0.0f64..1e-9,
        ) {
            let pp = |v| PolarizedPressure { value: v, est_error: err, terms_used: 1 };
            let ev = |v| EvanescentResult { value: v, est_error: 2.0 * err, ..EvanescentResult::ZERO };
            let c = PressureComponents::from_parts(pp(tm), pp(te), ev(tm_e), ev(te_e));
            prop_assert!(ulps_close(c.tm_prop + c.tm_evan, c.tm_total, c.tm_prop.abs().max(tm_e.abs())));
            prop_assert!(ulps_close(c.te_prop + c.te_evan, c.te_total, c.te_prop.abs().max(te_e.abs())));
            prop_assert_eq!(c.tm_total + c.te_total, c.total);
            prop_assert!(c.est_error >= 0.0);
            prop_assert!(c.est_error <= 4.0 * err * 2.0);
        }
    }
}
