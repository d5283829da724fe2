//! Run configuration: built-in gold defaults, overridden by a TOML file,
//! overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use casimir_core::dielectric::{AU_PLASMA_FREQUENCY, AU_RELAXATION_300K};
use casimir_core::{
    DielectricModel, DrudeParams, ExtrapolationKind, OpticalTable, QuadratureConfig,
};
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Drude,
    Plasma,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailKind {
    Drude,
    Plasma,
}

/// Where tabulated absorption data come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TableSource {
    /// The synthetic Drude table bundled with the library.
    Synthetic,
    File(PathBuf),
}

impl TableSource {
    pub fn parse(s: &str) -> Self {
        if s == "synthetic" {
            TableSource::Synthetic
        } else {
            TableSource::File(PathBuf::from(s))
        }
    }

    pub fn load(&self) -> Result<OpticalTable> {
        match self {
            TableSource::Synthetic => Ok(OpticalTable::shipped_synthetic()),
            TableSource::File(path) => Ok(OpticalTable::load(path)?),
        }
    }
}

impl fmt::Display for TableSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableSource::Synthetic => f.write_str("synthetic"),
            TableSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Separation grid `start:stop:count[:log|:lin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            bail!("grid must look like start:stop:count[:log], got {s:?}");
        }
        let num = |t: &str, what: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid grid {what} {t:?} in {s:?}"))
        };
        let start = num(parts[0], "start")?;
        let stop = num(parts[1], "stop")?;
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .with_context(|| format!("invalid grid count {:?} in {s:?}", parts[2]))?;
        let log = match parts.get(3).map(|t| t.trim()) {
            None | Some("lin") | Some("linear") => false,
            Some("log") => true,
            Some(other) => bail!("grid spacing must be lin or log, got {other:?}"),
        };
        Ok(GridSpec {
            start,
            stop,
            count,
            log,
        })
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            bail!("grid has no points");
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            bail!("grid bounds must be finite");
        }
        if self.log && !(self.start > 0.0 && self.stop > 0.0) {
            bail!("log grid needs positive bounds");
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let n = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                if i + 1 == self.count {
                    self.stop
                } else if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = if self.log { "log" } else { "lin" };
        write!(
            f,
            "{:e}:{:e}:{}:{}",
            self.start, self.stop, self.count, spacing
        )
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub model: Option<ModelKind>,
    /// Plasma frequency, rad/s.
    #[arg(long = "omega-p", global = true)]
    pub omega_p: Option<f64>,
    /// Relaxation frequency, rad/s.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Optical table path, or `synthetic` for the bundled Drude table.
    #[arg(long, global = true)]
    pub table: Option<String>,
    /// Low-frequency extrapolation of the table.
    #[arg(long, value_enum, global = true)]
    pub tail: Option<TailKind>,
    /// Temperature, K.
    #[arg(long = "T", global = true)]
    pub temperature: Option<f64>,
    /// Single separation, m.
    #[arg(long = "a", global = true, conflicts_with = "a_grid")]
    pub a: Option<f64>,
    /// Separation grid start:stop:count[:log], m.
    #[arg(long = "a-grid", global = true)]
    pub a_grid: Option<String>,
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    /// Output file (a directory for `figures`); standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    model: FileModel,
    #[serde(default)]
    run: FileRun,
    #[serde(default)]
    quadrature: FileQuadrature,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileModel {
    kind: Option<ModelKind>,
    omega_p: Option<f64>,
    gamma: Option<f64>,
    table: Option<String>,
    tail: Option<TailKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRun {
    temperature: Option<f64>,
    a: Option<f64>,
    a_grid: Option<String>,
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileQuadrature {
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<usize>,
    matsubara_tail_tol: Option<f64>,
    max_matsubara_terms: Option<usize>,
    omega_min_factor: Option<f64>,
    omega_max_factor: Option<f64>,
    log_grid_decades_per_panel: Option<f64>,
}

/// Dielectric model as configured, before any table is loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub omega_p: f64,
    pub gamma: f64,
    pub table: Option<TableSource>,
    pub tail: TailKind,
}

impl ModelSpec {
    pub fn params(&self) -> Result<DrudeParams> {
        Ok(DrudeParams::new(self.omega_p, self.gamma)?)
    }

    pub fn extrapolation(&self) -> Result<ExtrapolationKind> {
        let p = self.params()?;
        Ok(match self.tail {
            TailKind::Drude => ExtrapolationKind::DrudeTail(p),
            TailKind::Plasma => ExtrapolationKind::PlasmaTail(p),
        })
    }

    pub fn build(&self) -> Result<DielectricModel> {
        let p = self.params()?;
        match self.kind {
            ModelKind::Drude => Ok(DielectricModel::drude(p)?),
            ModelKind::Plasma => Ok(DielectricModel::plasma(p.omega_p)?),
            ModelKind::Tabulated => {
                let source = self
                    .table
                    .as_ref()
                    .context("the tabulated model needs --table")?;
                let table = source.load()?;
                Ok(DielectricModel::tabulated(table, self.extrapolation()?)?)
            }
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ModelKind::Drude => "drude",
            ModelKind::Plasma => "plasma",
            ModelKind::Tabulated => "tabulated",
        };
        write!(
            f,
            "{kind} omega_p={:e} gamma={:e}",
            self.omega_p, self.gamma
        )?;
        if self.kind == ModelKind::Tabulated {
            let tail = match self.tail {
                TailKind::Drude => "drude",
                TailKind::Plasma => "plasma",
            };
            let table = self
                .table
                .as_ref()
                .map(|t| t.to_string())
                .unwrap_or_default();
            write!(f, " table={table} tail={tail}")?;
        }
        Ok(())
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub temperature: f64,
    /// Explicit single separation, if given.
    pub a: Option<f64>,
    pub a_grid: Option<GridSpec>,
    pub quadrature: QuadratureConfig,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let q = &file.quadrature;
        let d = QuadratureConfig::default();
        let quadrature = QuadratureConfig {
            rel_tol: args.rel_tol.or(q.rel_tol).unwrap_or(d.rel_tol),
            abs_tol: q.abs_tol.unwrap_or(d.abs_tol),
            max_subdivisions: q.max_subdivisions.unwrap_or(d.max_subdivisions),
            matsubara_tail_tol: q.matsubara_tail_tol.unwrap_or(d.matsubara_tail_tol),
            max_matsubara_terms: q.max_matsubara_terms.unwrap_or(d.max_matsubara_terms),
            omega_min_factor: q.omega_min_factor.unwrap_or(d.omega_min_factor),
            omega_max_factor: q.omega_max_factor.unwrap_or(d.omega_max_factor),
            log_grid_decades_per_panel: q
                .log_grid_decades_per_panel
                .unwrap_or(d.log_grid_decades_per_panel),
        };
        quadrature.validate()?;

        let model = ModelSpec {
            kind: args.model.or(file.model.kind).unwrap_or(ModelKind::Drude),
            omega_p: args
                .omega_p
                .or(file.model.omega_p)
                .unwrap_or(AU_PLASMA_FREQUENCY),
            gamma: args
                .gamma
                .or(file.model.gamma)
                .unwrap_or(AU_RELAXATION_300K),
            table: args
                .table
                .as_deref()
                .or(file.model.table.as_deref())
                .map(TableSource::parse),
            tail: args.tail.or(file.model.tail).unwrap_or(TailKind::Drude),
        };
        model.params()?;

        // A flag for one of a/a-grid hides both file values.
        let (a, grid) = if args.a.is_some() || args.a_grid.is_some() {
            (args.a, args.a_grid.clone())
        } else {
            (file.run.a, file.run.a_grid.clone())
        };
        if a.is_some() && grid.is_some() {
            bail!("give either a single separation or a separation grid, not both");
        }
        let a_grid = grid.as_deref().map(GridSpec::parse).transpose()?;

        Ok(RunConfig {
            model,
            temperature: args.temperature.or(file.run.temperature).unwrap_or(300.0),
            a,
            a_grid,
            quadrature,
            out: args.out.clone().or(file.run.out),
        })
    }

    /// Separations to compute, falling back to `default` when none are
    /// configured.
    pub fn separations(&self, default: &GridSpec) -> Result<Vec<f64>> {
        let grid = match (self.a, &self.a_grid) {
            (Some(a), _) => vec![a],
            (None, Some(g)) => g.points()?,
            (None, None) => default.points()?,
        };
        casimir_core::validate_grid(&grid)?;
        Ok(grid)
    }

    /// Header lines describing the resolved configuration.
    pub fn metadata(&self, command: &str, grid: &[f64]) -> Vec<String> {
        let q = &self.quadrature;
        vec![
            format!("casimir {} {command}", env!("CARGO_PKG_VERSION")),
            format!("model: {}", self.model),
            format!("temperature_K: {:e}", self.temperature),
            format!(
                "separations_m: {} points from {:e} to {:e}",
                grid.len(),
                grid.first().copied().unwrap_or(f64::NAN),
                grid.last().copied().unwrap_or(f64::NAN)
            ),
            format!(
                "quadrature: rel_tol={:e} abs_tol={:e} max_subdivisions={} matsubara_tail_tol={:e} max_matsubara_terms={} omega_min_factor={:e} omega_max_factor={:e} log_grid_decades_per_panel={:e}",
                q.rel_tol,
                q.abs_tol,
                q.max_subdivisions,
                q.matsubara_tail_tol,
                q.max_matsubara_terms,
                q.omega_min_factor,
                q.omega_max_factor,
                q.log_grid_decades_per_panel
            ),
        ]
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = GridSpec::parse("1e-6:4e-6:4").unwrap();
        assert_eq!(g.points().unwrap(), vec![1e-6, 2e-6, 3e-6, 4e-6]);
        let g = GridSpec::parse("1e-7:1e-5:3:log").unwrap();
        let p = g.points().unwrap();
        assert!((p[1] - 1e-6).abs() < 1e-18);
        assert_eq!(p[2], 1e-5);
        assert_eq!(
            GridSpec::parse("2e-6:9:1").unwrap().points().unwrap(),
            vec![2e-6]
        );
        for bad in ["1:2", "a:2:3", "1:2:x", "1:2:3:cubic", "1:2:3:log:5"] {
            assert!(GridSpec::parse(bad).is_err(), "{bad}");
        }
        assert!(GridSpec::parse("1:2:0").unwrap().points().is_err());
        assert!(GridSpec::parse("0:2:3:log").unwrap().points().is_err());
    }

    #[test]
    fn defaults_are_gold_at_room_temperature() {
        let cfg = RunConfig::resolve(&CommonArgs::default()).unwrap();
        assert_eq!(cfg.model.kind, ModelKind::Drude);
        assert_eq!(cfg.model.omega_p, 1.37e16);
        assert_eq!(cfg.model.gamma, 0.53e14);
        assert_eq!(cfg.temperature, 300.0);
        assert_eq!(cfg.quadrature, QuadratureConfig::default());
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "[model]\nkind = \"plasma\"\ngamma = 1e13\n[run]\ntemperature = 77.0\na = 2e-6\n[quadrature]\nrel_tol = 1e-5\nomega_max_factor = 20.0\n",
        )
        .unwrap();
        let args = CommonArgs {
            config: Some(path),
            temperature: Some(10.0),
            ..CommonArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!(cfg.model.kind, ModelKind::Plasma);
        assert_eq!(cfg.model.gamma, 1e13);
        assert_eq!(cfg.model.omega_p, 1.37e16);
        assert_eq!(cfg.temperature, 10.0);
        assert_eq!(cfg.a, Some(2e-6));
        assert_eq!(cfg.quadrature.rel_tol, 1e-5);
        assert_eq!(cfg.quadrature.omega_max_factor, 20.0);

        let args = CommonArgs {
            a_grid: Some("1e-6:2e-6:2".into()),
            ..args
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!(cfg.a, None);
        assert_eq!(
            cfg.separations(&GridSpec::parse("1:2:2").unwrap()).unwrap(),
            vec![1e-6, 2e-6]
        );
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "[model]\nkind = \"drude\"\nomegap = 1.0\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve(&args).is_err());
    }

    #[test]
    fn invalid_values_fail_before_computation() {
        let args = CommonArgs {
            rel_tol: Some(-1.0),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve(&args).is_err());
        let args = CommonArgs {
            omega_p: Some(-1.0),
            ..CommonArgs::default()
        };
        assert!(RunConfig::resolve(&args).is_err());
    }

    #[test]
    fn tabulated_model_needs_a_table() {
        let args = CommonArgs {
            model: Some(ModelKind::Tabulated),
            ..CommonArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert!(cfg.model.build().is_err());
        let args = CommonArgs {
            table: Some("synthetic".into()),
            ..args
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert!(matches!(
            cfg.model.build().unwrap(),
            DielectricModel::Tabulated { .. }
        ));
    }
}
