//! Shared fixtures for the benchmarks.

use casimir_core::{DielectricModel, ExtrapolationKind, GeometryThermal, OpticalTable};

/// Separations exercised by the benchmarks, m.
pub const SEPARATIONS: [f64; 3] = [0.5e-6, 1e-6, 4e-6];

pub fn room_temperature(a: f64) -> GeometryThermal {
    GeometryThermal::new(a, 300.0).expect("benchmark geometry is valid")
}

pub fn gold_models() -> [(&'static str, DielectricModel); 2] {
    [
        ("drude", DielectricModel::gold_drude()),
        ("plasma", DielectricModel::gold_plasma()),
    ]
}

pub fn synthetic_tail() -> (OpticalTable, ExtrapolationKind) {
    (
        OpticalTable::shipped_synthetic(),
        ExtrapolationKind::DrudeTail(casimir_core::DrudeParams::GOLD),
    )
}
