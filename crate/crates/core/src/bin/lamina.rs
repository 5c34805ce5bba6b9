use clap::{Args, Parser, Subcommand, ValueEnum};
use lamina::bench::{self, StudyReport, SweepAxis};
use lamina::config::RunConfig;
use lamina::iga::Variant;
use lamina::pagano::build_oracle;
use lamina::recovery::RecoveryMode;
use lamina::{Error, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lamina", version, about = "Spline analysis and stress recovery for cross-ply plates")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,

    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of the config file (or the defaults).
#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n_layers: Option<usize>,
    #[arg(long, global = true)]
    slenderness: Option<f64>,
    #[arg(long, global = true)]
    sigma0: Option<f64>,
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, global = true)]
    degree_inplane: Option<usize>,
    #[arg(long, global = true)]
    elements_inplane: Option<usize>,
    #[arg(long, global = true)]
    degree_z: Option<usize>,
    /// Gauss points per ply through the thickness.
    #[arg(long, global = true)]
    quad_per_layer: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true)]
    stations: Option<usize>,
    #[arg(long, global = true)]
    samples_per_layer: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Layerwise,
    SingleElement,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FromBottom,
    TwoSidedAverage,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one case and write its spline coefficients.
    Solve {
        /// Coefficient file (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raw, recovered and exact stress profiles at one station.
    Profile {
        #[arg(long, default_value_t = 0.25)]
        x_rel: f64,
        #[arg(long, default_value_t = 0.25)]
        y_rel: f64,
        /// Write stresses in physical units instead of normalized ones.
        #[arg(long)]
        physical: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recovery errors over one parameter axis.
    Sweep {
        /// S, n_layers, q or n_elements.
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Run cases concurrently (timings become unreliable).
        #[arg(long)]
        parallel: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wall times of the layerwise and single-element schemes.
    Timing {
        #[arg(long, value_delimiter = ',', default_value = "3,11,34")]
        layers: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact-solution profile at one station.
    OracleDump {
        #[arg(long, default_value_t = 0.25)]
        x_rel: f64,
        #[arg(long, default_value_t = 0.25)]
        y_rel: f64,
        #[arg(long)]
        physical: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let overridden = self.n_layers.is_some()
            || self.slenderness.is_some()
            || self.sigma0.is_some()
            || self.variant.is_some()
            || self.degree_inplane.is_some()
            || self.elements_inplane.is_some()
            || self.degree_z.is_some()
            || self.quad_per_layer.is_some()
            || self.mode.is_some()
            || self.stations.is_some()
            || self.samples_per_layer.is_some();
        if let Some(v) = self.n_layers {
            c.plate.n_layers = v;
        }
        if let Some(v) = self.slenderness {
            c.plate.slenderness = v;
        }
        if let Some(v) = self.sigma0 {
            c.plate.sigma0 = v;
        }
        if let Some(v) = self.variant {
            c.discretization.variant = match v {
                VariantArg::Layerwise => Variant::Layerwise,
                VariantArg::SingleElement => Variant::SingleElement,
            };
        }
        if let Some(v) = self.degree_inplane {
            c.discretization.degree_inplane = v;
        }
        if let Some(v) = self.elements_inplane {
            c.discretization.elements_inplane = v;
        }
        if let Some(v) = self.degree_z {
            c.discretization.degree_z = v;
        }
        if let Some(v) = self.quad_per_layer {
            c.discretization.quad_per_layer = v;
        }
        if let Some(v) = self.mode {
            c.recovery.mode = match v {
                ModeArg::FromBottom => RecoveryMode::FromBottom,
                ModeArg::TwoSidedAverage => RecoveryMode::TwoSidedAverage,
            };
        }
        if let Some(v) = self.stations {
            c.recovery.stations = v;
        }
        if let Some(v) = self.samples_per_layer {
            c.recovery.samples_per_layer = v;
        }
        if overridden {
            c = c.validated()?;
        }
        Ok(c)
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    case_id: String,
    config: &'a RunConfig,
    scalar_dofs: usize,
    free_dofs: usize,
    residual: f64,
    assembly_s: f64,
    solve_s: f64,
}

#[derive(Serialize)]
struct CoefficientFile<'a> {
    case_id: String,
    config: &'a RunConfig,
    /// Scalar basis functions per direction; coefficient `3 (i + nx (j + ny k)) + c`.
    shape: [usize; 3],
    coefficients: &'a [f64],
}

fn write_report(report: &StudyReport, format: Format, out: &Option<PathBuf>) -> Result<()> {
    let mut w = output(out)?;
    match format {
        Format::Csv => report.write_csv(&mut w)?,
        Format::Json => writeln!(w, "{}", report.to_json())?,
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = cli.run.resolve()?;
    match cli.command {
        Command::Solve { out } => {
            let solved = bench::solve_case(&config, 1)?;
            let summary = SolveSummary {
                case_id: config.case_id(),
                config: &config,
                scalar_dofs: solved.scalar_dofs,
                free_dofs: solved.free_dofs,
                residual: solved.residual,
                assembly_s: solved.timings.assembly,
                solve_s: solved.timings.solve,
            };
            let mut w = output(&None)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?)?;
            w.flush()?;
            if let Some(path) = out.or_else(|| config.output.coefficients.clone()) {
                let file = CoefficientFile {
                    case_id: config.case_id(),
                    config: &config,
                    shape: solved.field.space().shape(),
                    coefficients: solved.field.coefficients(),
                };
                let mut w = output(&Some(path))?;
                serde_json::to_writer(&mut w, &file).map_err(|e| Error::Io(e.to_string()))?;
                w.flush()?;
            }
        }
        Command::Profile { x_rel, y_rel, physical, out } => {
            let solved = bench::solve_case(&config, 1)?;
            let oracle = build_oracle(&solved.case)?;
            let rows = bench::profile_rows(&solved, &oracle, x_rel, y_rel, !physical)?;
            bench::write_profile_csv(output(&out.or_else(|| config.output.profile.clone()))?, &rows)?;
        }
        Command::Sweep { axis, values, parallel, format, out } => {
            let out = out.or_else(|| config.output.report.clone());
            write_report(&bench::sweep(&config, axis, &values, parallel), format, &out)?;
        }
        Command::Timing { layers, repeats, format, out } => {
            let out = out.or_else(|| config.output.report.clone());
            write_report(&bench::timing_study(&config, &layers, repeats), format, &out)?;
        }
        Command::OracleDump { x_rel, y_rel, physical, out } => {
            let rows = bench::oracle_rows(&config, x_rel, y_rel, !physical)?;
            bench::write_profile_csv(output(&out)?, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Error::Config { line: 0, message, .. } => eprintln!("error kind=config message={message:?}"),
                Error::Config { line, column, message } => {
                    eprintln!("error kind=config line={line} column={column} message={message:?}")
                }
                other => eprintln!("error kind={} message={:?}", other.kind(), other.to_string()),
            }
            ExitCode::FAILURE
        }
    }
}
