mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dfcert::{
    certify, df_spectrum_via_symmetrization, enumerate_fixed_points, full_jacobian, rate_estimate, reduced_jacobian,
    split_zero_eigenvalue, DfMap, SimplexPoint, Verdict,
};

use crate::config::{parse_coords, ConfigFile, Coords, FlagOverrides, RunConfig};
use crate::error::{CliError, EXIT_INCONCLUSIVE, EXIT_INCONSISTENT, EXIT_OK};
use crate::report::{
    to_json, trajectory_csv, CertificateReport, FixedPointReport, RateReport, SpectrumReport, TrajectoryReport,
    SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "dfcert",
    version,
    about = "Certify uniqueness and local exponential stability of DeGroot-Friedkin fixed points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the map from x0 and write the trajectory.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = parse_coords)]
        x0: Coords,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Enumerate fixed points and assemble the Lefschetz certificate.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Jacobians and spectra at an interior point.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluation point (alias: --x0).
        #[arg(long, alias = "x0", value_parser = parse_coords)]
        point: Coords,
    },
    /// Enumerate fixed points only.
    FixedPoint {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare the empirical contraction rate with the spectral radius at the fixed point.
    Rate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = parse_coords)]
        x0: Coords,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline influence weights, e.g. 0.4,0.35,0.25.
    #[arg(long, value_parser = parse_coords)]
    gamma: Option<Coords>,
    #[arg(long)]
    seed: Option<u64>,
    /// Corner-exclusion margin.
    #[arg(long)]
    delta: Option<f64>,
    /// Number of random multistart points.
    #[arg(long)]
    multistarts: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

impl CommonArgs {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let file = self.config.as_deref().map(ConfigFile::load).transpose()?;
        RunConfig::resolve(
            file,
            FlagOverrides {
                gamma: self.gamma.clone().map(|c| c.0),
                seed: self.seed,
                delta: self.delta,
                multistarts: self.multistarts,
            },
        )
    }

    fn json_only(&self) -> Result<(), CliError> {
        if self.format == Some(Format::Csv) {
            return Err(CliError::Parse("csv output is only available for simulate".into()));
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn point_for(map: &DfMap, Coords(raw): Coords) -> Result<SimplexPoint, CliError> {
    if raw.len() != map.dim() {
        return Err(CliError::Invariant(format!(
            "point has {} entries but the model has {}",
            raw.len(),
            map.dim()
        )));
    }
    SimplexPoint::new(raw).map_err(|e| CliError::Invariant(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Simulate { common, x0, steps } => {
            let cfg = common.run_config()?;
            let map = cfg.build_map()?;
            let x0 = point_for(&map, x0)?;
            let traj = map.simulate(&x0, steps);
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => trajectory_csv(&traj),
                Format::Json => to_json(&TrajectoryReport::new(map.gamma(), &traj)),
            };
            common.emit(&text)?;
            Ok(EXIT_OK)
        }
        Command::Certify { common } => {
            common.json_only()?;
            let cfg = common.run_config()?;
            let map = cfg.build_map()?;
            let cert = certify(&map, &cfg.solver).map_err(|e| CliError::Invariant(e.to_string()))?;
            common.emit(&to_json(&CertificateReport::new(map.gamma(), &cert, cfg.solver.seed)))?;
            Ok(match cert.verdict {
                Verdict::UniqueExpStable => EXIT_OK,
                Verdict::Inconsistent => EXIT_INCONSISTENT,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
        Command::Spectrum { common, point } => {
            common.json_only()?;
            let cfg = common.run_config()?;
            let map = cfg.build_map()?;
            let x = point_for(&map, point)?;
            let invariant = |e: &dyn std::fmt::Display| CliError::Invariant(e.to_string());
            let full = full_jacobian(&map, &x, cfg.solver.delta).map_err(|e| invariant(&e))?;
            let reduced = reduced_jacobian(&full);
            let full_eigenvalues = df_spectrum_via_symmetrization(&full, &x).map_err(|e| invariant(&e))?;
            let (_, reduced_eigenvalues) = split_zero_eigenvalue(&full_eigenvalues).map_err(|e| invariant(&e))?;
            let report = SpectrumReport {
                schema_version: SCHEMA_VERSION,
                gamma: map.gamma().to_vec(),
                point: x.coords().to_vec(),
                full_jacobian: full.to_rows(),
                reduced_jacobian: reduced.to_rows(),
                full_eigenvalues,
                reduced_eigenvalues,
                column_sum_max_abs: full.column_sum_max_abs(),
            };
            common.emit(&to_json(&report))?;
            Ok(EXIT_OK)
        }
        Command::FixedPoint { common } => {
            common.json_only()?;
            let cfg = common.run_config()?;
            let map = cfg.build_map()?;
            let e = enumerate_fixed_points(&map, &cfg.solver).map_err(|e| CliError::Invariant(e.to_string()))?;
            common.emit(&to_json(&FixedPointReport::new(map.gamma(), &e, cfg.solver.seed)))?;
            Ok(EXIT_OK)
        }
        Command::Rate { common, x0, steps } => {
            common.json_only()?;
            let cfg = common.run_config()?;
            let map = cfg.build_map()?;
            let x0 = point_for(&map, x0)?;
            let e = enumerate_fixed_points(&map, &cfg.solver).map_err(|e| CliError::Invariant(e.to_string()))?;
            let interior: Vec<_> = e.interior().collect();
            let xbar = match interior.as_slice() {
                [only] => only.location.clone(),
                [] => {
                    eprintln!("dfcert: no interior fixed point located");
                    return Ok(EXIT_INCONCLUSIVE);
                }
                _ => {
                    eprintln!("dfcert: {} interior fixed points located", interior.len());
                    return Ok(EXIT_INCONSISTENT);
                }
            };
            let est = rate_estimate(&map, &xbar, &x0, steps, cfg.solver.delta)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            let report = RateReport::new(map.gamma(), xbar.coords(), x0.coords(), steps, &est, cfg.solver.seed);
            common.emit(&to_json(&report))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dfcert: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
