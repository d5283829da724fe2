//! Command implementations. Each returns the CSV text it produced.

use std::path::PathBuf;

use anyhow::{Context, Result};
use casimir_core::{
    classical_limit, kk_transform, relative_deviation_models, sweep, sweep_totals, ClassicalModel,
    GeometryThermal, PolarizedPressure, SweepRow, TotalsRow,
};

use crate::config::{GridSpec, ModelKind, ModelSpec, RunConfig, TableSource, TailKind};
use crate::output::{emit, write_atomic, Csv};

/// Default separation for single-point commands.
pub const DEFAULT_POINT: &str = "1e-6:1e-6:1";
/// Default separation grid for sweeps and figures, m.
pub const DEFAULT_SWEEP: &str = "5e-7:4e-6:15";
/// Default imaginary-frequency grid for `kk`, rad/s.
pub const DEFAULT_XI_GRID: &str = "1e13:1e17:20:log";

fn p0(a: f64, temperature: f64) -> Result<f64> {
    Ok(classical_limit(
        ClassicalModel::Drude,
        GeometryThermal::new(a, temperature)?,
    ))
}

pub fn pressure(cfg: &RunConfig) -> Result<String> {
    let grid = cfg.separations(&GridSpec::parse(DEFAULT_POINT)?)?;
    let model = cfg.model.build()?;
    let rows = sweep_totals(&model, &grid, cfg.temperature, &cfg.quadrature)?;
    let mut csv = Csv::new(
        cfg.metadata("pressure", &grid),
        vec!["a_m", "P_total_Pa", "P_TM_Pa", "P_TE_Pa", "est_error_Pa"],
    );
    for r in &rows {
        csv.push(vec![r.a, r.total(), r.tm.value, r.te.value, r.est_error()]);
    }
    finish(cfg, csv)
}

pub fn decompose(cfg: &RunConfig) -> Result<String> {
    let grid = cfg.separations(&GridSpec::parse(DEFAULT_POINT)?)?;
    let model = cfg.model.build()?;
    let rows = sweep(&model, &grid, cfg.temperature, &cfg.quadrature)?;
    let mut csv = Csv::new(
        cfg.metadata("decompose", &grid),
        vec![
            "a_m",
            "tm_prop",
            "tm_evan",
            "te_prop",
            "te_evan",
            "total",
            "ratio_to_classical",
            "est_error",
        ],
    );
    for r in &rows {
        let c = &r.components;
        csv.push(vec![
            r.a,
            c.tm_prop,
            c.tm_evan,
            c.te_prop,
            c.te_evan,
            c.total,
            r.ratio_to_classical,
            c.est_error,
        ]);
    }
    finish(cfg, csv)
}

/// Every channel with its own absolute error estimate.
pub fn sweep_command(cfg: &RunConfig) -> Result<String> {
    let grid = cfg.separations(&GridSpec::parse(DEFAULT_SWEEP)?)?;
    let model = cfg.model.build()?;
    let rows = sweep(&model, &grid, cfg.temperature, &cfg.quadrature)?;
    let mut csv = Csv::new(
        cfg.metadata("sweep", &grid),
        vec![
            "a_m",
            "tm_total",
            "tm_prop",
            "tm_evan",
            "te_total",
            "te_prop",
            "te_evan",
            "total",
            "ratio_to_classical",
            "err_tm_total",
            "err_tm_prop",
            "err_tm_evan",
            "err_te_total",
            "err_te_prop",
            "err_te_evan",
            "est_error",
        ],
    );
    for r in &rows {
        let c = &r.components;
        let e = &c.errors;
        csv.push(vec![
            r.a,
            c.tm_total,
            c.tm_prop,
            c.tm_evan,
            c.te_total,
            c.te_prop,
            c.te_evan,
            c.total,
            r.ratio_to_classical,
            e.tm_total,
            e.tm_prop(),
            e.tm_evan,
            e.te_total,
            e.te_prop(),
            e.te_evan,
            c.est_error,
        ]);
    }
    finish(cfg, csv)
}

/// ε(iξ) of the configured table; the bundled table when none is given.
pub fn kk(cfg: &RunConfig, xi_grid: &GridSpec) -> Result<String> {
    let xi = xi_grid.points()?;
    if let Some(bad) = xi.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        anyhow::bail!("imaginary frequencies must be positive, got {bad}");
    }
    let source = cfg.model.table.clone().unwrap_or(TableSource::Synthetic);
    let table = source.load()?;
    let tail = cfg.model.extrapolation()?;
    let values = xi
        .iter()
        .map(|&x| kk_transform(&table, tail, x))
        .collect::<casimir_core::Result<Vec<f64>>>()?;
    let mut meta = cfg.metadata("kk", &[]);
    meta.truncate(2);
    meta[1] = format!("table: {source} tail: {}", tail_name(cfg.model.tail));
    meta.push(format!("xi_grid_rad_s: {xi_grid}"));
    let mut csv = Csv::new(meta, vec!["xi_rad_s", "eps_imag_axis"]);
    for (x, v) in xi.iter().zip(values) {
        csv.push(vec![*x, v]);
    }
    finish(cfg, csv)
}

fn tail_name(t: TailKind) -> &'static str {
    match t {
        TailKind::Drude => "drude",
        TailKind::Plasma => "plasma",
    }
}

/// Separation-dependence data for the ratio, TM-channel, channel-curve and
/// optical-data comparisons, plus a gnuplot script.
pub fn figures(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.separations(&GridSpec::parse(DEFAULT_SWEEP)?)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;

    let spec = |kind, tail| ModelSpec {
        kind,
        tail,
        table: Some(cfg.model.table.clone().unwrap_or(TableSource::Synthetic)),
        ..cfg.model.clone()
    };
    let drude = spec(ModelKind::Drude, TailKind::Drude).build()?;
    let plasma = spec(ModelKind::Plasma, TailKind::Drude).build()?;
    let tab_drude = spec(ModelKind::Tabulated, TailKind::Drude).build()?;
    let tab_plasma = spec(ModelKind::Tabulated, TailKind::Plasma).build()?;

    let t = cfg.temperature;
    let q = &cfg.quadrature;
    let ((d_rows, p_rows), (td_rows, tp_rows)) = rayon::join(
        || {
            rayon::join(
                || sweep(&drude, &grid, t, q),
                || sweep_totals(&plasma, &grid, t, q),
            )
        },
        || {
            rayon::join(
                || sweep_totals(&tab_drude, &grid, t, q),
                || sweep_totals(&tab_plasma, &grid, t, q),
            )
        },
    );
    let (d_rows, p_rows, td_rows, tp_rows) = (d_rows?, p_rows?, td_rows?, tp_rows?);

    let meta = |name: &str| {
        let mut m = cfg.metadata(&format!("figures {name}"), &grid);
        m[1] = format!(
            "models: drude and plasma with omega_p={:e} gamma={:e}",
            cfg.model.omega_p, cfg.model.gamma
        );
        m
    };

    let mut written = Vec::new();
    let mut write = |name: &str, csv: Csv| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, &csv.render())?;
        written.push(path);
        Ok(())
    };

    write("fig1.csv", fig1(meta("fig1"), &d_rows, &p_rows, t)?)?;

    let synthetic = matches!(cfg.model.table, None | Some(TableSource::Synthetic));
    let mut m2 = meta("fig2");
    m2.push(if synthetic {
        "mode: synthetic-data self-check (bundled Drude table; deviations vanish by construction)"
            .to_string()
    } else {
        format!("mode: optical data from {}", tab_source(cfg))
    });
    let d_totals: Vec<TotalsRow> = d_rows.iter().map(totals_of).collect();
    write(
        "fig2.csv",
        fig2(m2, &d_totals, &p_rows, &td_rows, &tp_rows)?,
    )?;

    write("fig3.csv", fig3(meta("fig3"), &d_rows, &p_rows, t)?)?;
    write("fig45.csv", fig45(meta("fig45"), &d_rows, &p_rows, t)?)?;

    let script = dir.join("plot.gp");
    write_atomic(&script, PLOT_SCRIPT)?;
    written.push(script);
    Ok(written)
}

fn tab_source(cfg: &RunConfig) -> String {
    cfg.model
        .table
        .as_ref()
        .map(|t| t.to_string())
        .unwrap_or_else(|| "synthetic".into())
}

fn totals_of(r: &SweepRow) -> TotalsRow {
    let c = &r.components;
    let e = &c.errors;
    TotalsRow {
        a: r.a,
        tm: PolarizedPressure {
            value: c.tm_total,
            est_error: e.tm_total,
            terms_used: 0,
        },
        te: PolarizedPressure {
            value: c.te_total,
            est_error: e.te_total,
            terms_used: 0,
        },
    }
}

fn fig1(meta: Vec<String>, d: &[SweepRow], p: &[TotalsRow], t: f64) -> Result<Csv> {
    let mut csv = Csv::new(meta, vec!["a_m", "ratio_drude", "ratio_plasma"]);
    for (d, p) in d.iter().zip(p) {
        csv.push(vec![d.a, d.ratio_to_classical, p.total() / p0(p.a, t)?]);
    }
    Ok(csv)
}

fn fig2(
    meta: Vec<String>,
    d: &[TotalsRow],
    p: &[TotalsRow],
    td: &[TotalsRow],
    tp: &[TotalsRow],
) -> Result<Csv> {
    let mut csv = Csv::new(meta, vec!["a_m", "delta_drude", "delta_plasma"]);
    for i in 0..d.len() {
        csv.push(vec![
            d[i].a,
            relative_deviation_models(d[i].total(), td[i].total())?,
            relative_deviation_models(p[i].total(), tp[i].total())?,
        ]);
    }
    Ok(csv)
}

fn fig3(meta: Vec<String>, d: &[SweepRow], p: &[TotalsRow], t: f64) -> Result<Csv> {
    let mut csv = Csv::new(
        meta,
        vec!["a_m", "tm_ratio_drude", "tm_ratio_plasma", "delta_tm"],
    );
    for (d, p) in d.iter().zip(p) {
        let scale = p0(d.a, t)?;
        let tm_d = d.components.tm_total;
        csv.push(vec![
            d.a,
            tm_d / scale,
            p.tm.value / scale,
            relative_deviation_models(tm_d, p.tm.value)?,
        ]);
    }
    Ok(csv)
}

/// Channel pressures over the Drude classical limit. The plasma model has
/// no evanescent part, so its propagating channels equal its totals.
fn fig45(meta: Vec<String>, d: &[SweepRow], p: &[TotalsRow], t: f64) -> Result<Csv> {
    let mut csv = Csv::new(
        meta,
        vec![
            "a_m",
            "tm_prop_drude",
            "tm_evan_drude",
            "tm_total_drude",
            "tm_total_plasma",
            "te_prop_drude",
            "te_evan_drude",
            "te_total_drude",
            "te_total_plasma",
        ],
    );
    for (d, p) in d.iter().zip(p) {
        let s = p0(d.a, t)?;
        let c = &d.components;
        csv.push(vec![
            d.a,
            c.tm_prop / s,
            c.tm_evan / s,
            c.tm_total / s,
            p.tm.value / s,
            c.te_prop / s,
            c.te_evan / s,
            c.te_total / s,
            p.te.value / s,
        ]);
    }
    Ok(csv)
}

const PLOT_SCRIPT: &str = r#"# gnuplot script for the CSV files in this directory
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set xlabel 'a (um)'
set terminal pngcairo size 800,600

set output 'fig1.png'
set ylabel 'P / P_D^0'
plot 'fig1.csv' using ($1*1e6):2 with lines, '' using ($1*1e6):3 with lines

set output 'fig2.png'
set ylabel 'relative deviation from optical-data pressure'
plot 'fig2.csv' using ($1*1e6):2 with lines, '' using ($1*1e6):3 with lines

set output 'fig3.png'
set ylabel 'P_TM / P_D^0'
set y2label 'delta_TM'
set y2tics
plot 'fig3.csv' using ($1*1e6):2 with lines, '' using ($1*1e6):3 with lines, \
     '' using ($1*1e6):4 axes x1y2 with lines
unset y2tics
unset y2label

set output 'fig4.png'
set ylabel 'P_TM channels / P_D^0'
plot 'fig45.csv' using ($1*1e6):2 with lines, '' using ($1*1e6):3 with lines, \
     '' using ($1*1e6):4 with lines, '' using ($1*1e6):5 with lines

set output 'fig5.png'
set ylabel 'P_TE channels / P_D^0'
plot 'fig45.csv' using ($1*1e6):6 with lines, '' using ($1*1e6):7 with lines, \
     '' using ($1*1e6):8 with lines, '' using ($1*1e6):9 with lines
"#;

fn finish(cfg: &RunConfig, csv: Csv) -> Result<String> {
    let text = csv.render();
    emit(cfg.out.as_deref(), &text)?;
    Ok(text)
}

/// Checks that every CSV named in the plot script is produced.
#[cfg(test)]
fn script_references() -> Vec<&'static str> {
    ["fig1.csv", "fig2.csv", "fig3.csv", "fig45.csv"]
        .into_iter()
        .filter(|f| PLOT_SCRIPT.contains(f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_script_references_every_csv() {
        assert_eq!(script_references().len(), 4);
    }

    #[test]
    fn default_grids_parse() {
        for g in [DEFAULT_POINT, DEFAULT_SWEEP, DEFAULT_XI_GRID] {
            assert!(!GridSpec::parse(g).unwrap().points().unwrap().is_empty());
        }
    }
}
