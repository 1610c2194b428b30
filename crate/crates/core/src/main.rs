use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use paracontact::hypersurface::SyntheticConfig;
use paracontact::models::{builtin_models, manifest_json, resolve_model, Model};
use paracontact::report::CheckReport;
use paracontact::suite::{run_suite, run_synthetic, HypersurfacePart, RunConfig, Suite};

/// Numerical verification of (ε)-almost paracontact metric structures.
#[derive(Debug, Parser)]
#[command(name = "paracontact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, clap::Args)]
struct Output {
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct Sampling {
    /// Sample points per suite.
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

impl Sampling {
    fn config(&self) -> RunConfig {
        RunConfig {
            points: self.points,
            seed: self.seed,
            tol_scale: self.tol_scale,
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List builtin models.
    ListModels,
    /// Run a check suite on a builtin model or a manifest file.
    Check {
        /// Builtin model name or path to a manifest.
        model: String,
        /// structure, sasakian, curvature, einstein, lie, hypersurface,
        /// synthetic or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Run the hypersurface suite on a bundle.
    Hypersurface {
        /// Builtin bundle name or path to a bundle manifest.
        bundle: String,
        /// induced, gauss, characterization or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Tangent-space check of the almost-constant-curvature Gauss equation.
    Synthetic {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Add a random self-adjoint perturbation of this size to A.
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Print the manifest of a builtin model.
    ExportModel {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure before any report exists: bad input, unknown names, I/O.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), InputError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(report: &CheckReport, output: &Output) -> Result<u8, InputError> {
    let mut text = match output.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    emit(&text, output.out.as_ref())?;
    Ok(report.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8, InputError> {
    match cli.command {
        Command::ListModels => {
            let text: String = builtin_models().iter().map(|m| format!("{m}\n")).collect();
            emit(&text, None)?;
            Ok(0)
        }
        Command::Check {
            model,
            suite,
            sampling,
            output,
        } => {
            let suite: Suite = suite.parse()?;
            let model = resolve_model(&model)?;
            let report = run_suite(&model, suite, &sampling.config())?;
            emit_report(&report, &output)
        }
        Command::Hypersurface {
            bundle,
            suite,
            sampling,
            output,
        } => {
            let part: HypersurfacePart = suite.parse()?;
            let model = resolve_model(&bundle)?;
            if !matches!(model, Model::Hypersurface(_)) {
                return Err(InputError(format!("`{}` is not a hypersurface bundle", model.name())));
            }
            let report = run_suite(&model, Suite::Hypersurface(part), &sampling.config())?;
            emit_report(&report, &output)
        }
        Command::Synthetic {
            epsilon,
            dim,
            trials,
            seed,
            perturb,
            tol_scale,
            output,
        } => {
            if epsilon != 1.0 && epsilon != -1.0 {
                return Err(InputError(format!("--epsilon must be +1 or -1, got {epsilon}")));
            }
            if dim < 2 {
                return Err(InputError("--dim must be at least 2".into()));
            }
            let cfg = SyntheticConfig {
                epsilon,
                dim,
                trials,
                seed,
                perturb,
            };
            emit_report(&run_synthetic(&cfg, tol_scale), &output)
        }
        Command::ExportModel { name, out } => {
            let model = resolve_model(&name)?;
            emit(&(manifest_json(&model) + "\n"), out.as_ref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
