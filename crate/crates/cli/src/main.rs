//! `casimir`: Casimir pressure between parallel metallic plates.
//!
//! Exit status: 0 on success, 2 for configuration, validation or I/O
//! errors, 3 when a sum or integral fails to converge.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{CommonArgs, GridSpec, RunConfig};

/// Thread count override for the parallel pool.
const THREADS_ENV: &str = "CASIMIR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "casimir",
    version,
    about = "Casimir pressure between parallel metallic plates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Total, TM and TE pressure per separation.
    Pressure,
    /// Four-channel split per separation.
    Decompose,
    /// Four-channel split with per-channel error estimates.
    Sweep,
    /// Permittivity at imaginary frequencies from tabulated absorption.
    Kk {
        /// Imaginary frequencies start:stop:count[:log], rad/s.
        #[arg(long = "xi-grid", default_value = commands::DEFAULT_XI_GRID)]
        xi_grid: String,
    },
    /// Data files and a gnuplot script for the separation-dependence figures.
    Figures,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot configure the thread pool")
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let cfg = RunConfig::resolve(&cli.common)?;
    match cli.command {
        Command::Pressure => commands::pressure(&cfg).map(drop),
        Command::Decompose => commands::decompose(&cfg).map(drop),
        Command::Sweep => commands::sweep_command(&cfg).map(drop),
        Command::Kk { xi_grid } => commands::kk(&cfg, &GridSpec::parse(&xi_grid)?).map(drop),
        Command::Figures => {
            for path in commands::figures(&cfg)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<casimir_core::Error>())
        .any(casimir_core::Error::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let conv = anyhow::Error::new(casimir_core::Error::Convergence {
            what: "sum",
            value: 0.0,
            est_error: 1.0,
            work: 10,
        });
        assert_eq!(exit_code(&conv), 3);
        assert_eq!(exit_code(&conv.context("while sweeping")), 3);
        let val = anyhow::Error::new(casimir_core::Error::Validation("bad".into()));
        assert_eq!(exit_code(&val), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("plain")), 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    fn run_args(args: &[&str]) -> Result<()> {
        let mut argv = vec!["casimir"];
        argv.extend_from_slice(args);
        run(Cli::try_parse_from(argv).unwrap())
    }

    fn run_to_file(args: &[&str]) -> (tempfile::TempDir, Vec<Vec<f64>>, String) {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out.csv");
        let mut all = args.to_vec();
        all.extend(["--out", out.to_str().unwrap()]);
        run_args(&all).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        (dir, parse_rows(&text), text)
    }

    fn parse_rows(text: &str) -> Vec<Vec<f64>> {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    }

    #[test]
    fn pressure_row_is_additive() {
        let (_d, rows, text) =
            run_to_file(&["pressure", "--model", "drude", "--a", "1e-6", "--T", "300"]);
        assert!(text.starts_with("# casimir "));
        assert!(text.contains("\na_m,P_total_Pa,P_TM_Pa,P_TE_Pa,est_error_Pa\n"));
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!((r[1] - (r[2] + r[3])).abs() <= 1e-8 * r[1].abs());
        assert!(r[4] > 0.0 && r[4] < 1e-4 * r[1].abs());
    }

    #[test]
    fn plasma_pressure_at_large_separation_is_the_ideal_metal_limit() {
        let (_d, rows, _) = run_to_file(&[
            "pressure", "--model", "plasma", "--a", "50e-6", "--T", "300",
        ]);
        let a: f64 = 50e-6;
        let limit = -casimir_core::K_B * 300.0 * casimir_core::ZETA_3
            / (4.0 * std::f64::consts::PI * a.powi(3));
        assert!((rows[0][1] / limit - 1.0).abs() < 1e-2);
    }

    #[test]
    fn decompose_rows_ascend_and_plasma_evanescent_is_zero() {
        let (_d, rows, _) =
            run_to_file(&["decompose", "--model", "plasma", "--a-grid", "1e-6:3e-6:3"]);
        assert_eq!(
            rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
            vec![1e-6, 2e-6, 3e-6]
        );
        assert!(rows.iter().all(|r| r[2] == 0.0 && r[4] == 0.0));
    }

    #[test]
    fn decompose_drude_signs() {
        let (_d, rows, _) = run_to_file(&["decompose", "--a", "1e-6"]);
        let r = &rows[0];
        assert!(r[2] > 0.0, "tm_evan {}", r[2]);
        assert!(r[5] < 0.0 && r[1] < r[5]);
    }

    #[test]
    fn kk_synthetic_table_matches_drude() {
        let (_d, rows, _) = run_to_file(&["kk", "--table", "synthetic"]);
        assert_eq!(rows.len(), 20);
        let p = casimir_core::DrudeParams::GOLD;
        for r in &rows {
            assert!((r[1] / p.eps_imag_axis(r[0]) - 1.0).abs() < 5e-3, "{r:?}");
        }
    }

    #[test]
    fn kk_of_a_transparent_table_is_one() {
        let dir = tempfile::tempdir().unwrap();
        let table = dir.path().join("vacuum.txt");
        std::fs::write(&table, "1e10 0\n1e20 0\n").unwrap();
        let (_d, rows, _) =
            run_to_file(&["kk", "--table", table.to_str().unwrap(), "--omega-p", "0"]);
        assert!(rows.iter().all(|r| r[1] == 1.0), "{rows:?}");
    }

    #[test]
    fn configuration_errors_exit_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("absent.txt");
        let err = run_args(&[
            "pressure",
            "--model",
            "tabulated",
            "--table",
            missing.to_str().unwrap(),
        ])
        .unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(format!("{err:#}").contains("absent.txt"));

        let unsorted = dir.path().join("unsorted.txt");
        std::fs::write(&unsorted, "2e14 1\n1e14 1\n").unwrap();
        let err = run_args(&["kk", "--table", unsorted.to_str().unwrap()]).unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(format!("{err:#}").contains(":2:"));

        for grid in ["1e-6:2e-6:0", "2e-6:1e-6:2"] {
            let err = run_args(&[
                "figures",
                "--a-grid",
                grid,
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .unwrap_err();
            assert_eq!(exit_code(&err), 2, "{grid}");
        }
        let err = run_args(&["pressure", "--rel-tol", "0"]).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn convergence_failure_exits_with_three() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("tight.toml");
        std::fs::write(&cfg, "[quadrature]\nmax_matsubara_terms = 3\n").unwrap();
        let err =
            run_args(&["pressure", "--config", cfg.to_str().unwrap(), "--a", "1e-6"]).unwrap_err();
        assert_eq!(exit_code(&err), 3, "{err:#}");
    }

    #[test]
    fn figures_write_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("figs");
        run_args(&[
            "figures",
            "--a-grid",
            "0.5e-6:4e-6:3",
            "--out",
            out.to_str().unwrap(),
        ])
        .unwrap();
        for f in ["fig1.csv", "fig2.csv", "fig3.csv", "fig45.csv", "plot.gp"] {
            assert!(out.join(f).is_file(), "{f}");
        }
        let fig2 = std::fs::read_to_string(out.join("fig2.csv")).unwrap();
        assert!(fig2.contains("synthetic-data self-check"));
        assert!(parse_rows(&fig2)
            .iter()
            .all(|r| r[1].abs() < 1e-3 && r[2].abs() < 1e-3));

        let fig1 = parse_rows(&std::fs::read_to_string(out.join("fig1.csv")).unwrap());
        assert!((fig1[0][2] / fig1[0][1] - 1.09).abs() < 0.02);
        assert!((fig1[2][2] / fig1[2][1] - 1.86).abs() < 0.02);
        let fig3 = parse_rows(&std::fs::read_to_string(out.join("fig3.csv")).unwrap());
        assert!((fig3[0][3].abs() - 0.0038).abs() < 5e-4);
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "casimir", "pressure", "--model", "plasma", "--a", "1e-6", "--T", "77",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Pressure));
        assert_eq!(cli.common.a, Some(1e-6));
        assert_eq!(cli.common.temperature, Some(77.0));
        assert!(
            Cli::try_parse_from(["casimir", "pressure", "--a", "1e-6", "--a-grid", "1:2:2"])
                .is_err()
        );
    }
}
