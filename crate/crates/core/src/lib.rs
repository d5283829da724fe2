//! Casimir pressure between two parallel metallic plates from the Lifshitz
//! theory, split into TM/TE × propagating/evanescent channels.
//!
//! Channel totals are Matsubara sums over imaginary frequencies
//! ([`matsubara`]). Evanescent parts are real-frequency integrals
//! ([`evanescent`]). Propagating parts are the difference of the two
//! ([`decomposition`]).

pub mod constants;
pub mod decomposition;
pub mod dielectric;
pub mod error;
pub mod evanescent;
pub mod matsubara;
pub mod quadrature;
pub mod reflection;

pub use constants::{PhysicalConstants, C, HBAR, K_B, ZETA_3};
pub use decomposition::{
    decompose, ratio_to_classical, relative_deviation_models, sweep, sweep_totals, validate_grid,
    ChannelErrors, PressureComponents, SweepRow, TotalsRow,
};
pub use dielectric::{
    junction_diagnostic, kk_transform, DielectricModel, DrudeParams, ExtrapolationKind,
    JunctionReport, OpticalTable,
};
pub use error::{Error, Result};
pub use evanescent::{evanescent_integrand, evanescent_pressure, EvanescentResult};
pub use matsubara::{
    classical_limit, matsubara_frequency, pressure_polarized, pressure_tm_te, pressure_total,
    ClassicalModel, GeometryThermal, PolarizedPressure,
};
pub use quadrature::{Estimate, QuadratureConfig};
pub use reflection::{fresnel, Kinematics, Polarization};
