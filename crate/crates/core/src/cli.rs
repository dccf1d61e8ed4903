//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation or I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::forward::{assemble_dtn_matrix, build_kernel_spectrum, KernelSpectrum, MaterialParams};
use crate::parameters::{compute_mu0, fit_parameters};
use crate::pipeline::{run_experiment, ExperimentConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "shtomo", version, arg_required_else_help = true)]
#[command(about = "Antiplane shear inclusion imaging with strain-gradient interfaces")]
struct Cli {
    /// Noise seed, overrides the configuration file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment configuration (TOML) or a previous run manifest.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Material {
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    mu: f64,
    #[arg(long = "mu_s", alias = "mu-s")]
    mu_s: f64,
    #[arg(long)]
    ell2: f64,
}

impl Material {
    fn params(&self) -> Result<MaterialParams> {
        MaterialParams::new(self.mu, self.mu_s, self.ell2, self.rho)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Bin,
    Csv,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the kernel coefficients as `n,kappa_n` CSV.
    Kernel {
        #[command(flatten)]
        material: Material,
        #[arg(long = "n-modes", default_value_t = 100)]
        n_modes: usize,
    },
    /// Assemble the collocation matrix and save it.
    Matrix {
        #[command(flatten)]
        material: Material,
        #[arg(long = "n-modes", default_value_t = 100)]
        n_modes: usize,
        #[arg(long = "n-boundary", default_value_t = 128)]
        n_boundary: usize,
        #[arg(long, value_enum, default_value = "bin")]
        format: MatrixFormat,
    },
    /// Run the full imaging pipeline described by `--config`.
    Reconstruct,
    /// Fit (mu, mu_s, ell2) to a kernel CSV.
    FitParams {
        /// `n,kappa_n` CSV as written by `kernel`.
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long)]
        rho: f64,
    },
    /// Coercivity threshold for the given interface.
    Mu0 {
        #[arg(long)]
        rho: f64,
        #[arg(long = "mu_s", alias = "mu-s")]
        mu_s: f64,
        #[arg(long)]
        ell2: f64,
        /// Only used to complete the parameter set; the threshold does not depend on it.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long = "b-norm", default_value_t = 0.0)]
        b_norm: f64,
    },
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Kernel { material, n_modes } => {
            let spec = build_kernel_spectrum(&material.params()?, n_modes)?;
            match &cli.out {
                Some(dir) => write_file(&dir.join("kernel.csv"), spec.to_csv().as_bytes())?,
                None => emit(stdout, &spec.to_csv())?,
            }
        }
        Command::Matrix {
            material,
            n_modes,
            n_boundary,
            format,
        } => {
            let spec = build_kernel_spectrum(&material.params()?, n_modes)?;
            let a = assemble_dtn_matrix(&spec, n_boundary)?;
            match &cli.out {
                Some(dir) => {
                    if matches!(format, MatrixFormat::Bin | MatrixFormat::Both) {
                        write_file(&dir.join("matrix.bin"), &a.to_bytes())?;
                    }
                    if matches!(format, MatrixFormat::Csv | MatrixFormat::Both) {
                        write_file(&dir.join("matrix.csv"), a.to_csv().as_bytes())?;
                    }
                }
                None => emit(stdout, &a.to_csv())?,
            }
        }
        Command::Reconstruct => {
            let path = cli
                .config
                .ok_or_else(|| Failure::Usage("reconstruct requires --config <PATH>".into()))?;
            let mut config = ExperimentConfig::load(&path)?;
            if let Some(seed) = cli.seed {
                config.noise.seed = seed;
            }
            if let Some(out) = cli.out {
                config.outputs.dir = out;
            }
            let manifest = run_experiment(&config)?;
            let mut summary = format!(
                "noise_ratio={:e}\nretained_singular_values={}\ndegenerate_points={}\n",
                manifest.noise_ratio, manifest.retained_singular_values, manifest.degenerate_points
            );
            for p in &manifest.outputs {
                summary.push_str(&format!("output={}\n", p.display()));
            }
            emit(stdout, &summary)?;
        }
        Command::FitParams { input, rho } => {
            let text = fs::read_to_string(&input).map_err(|e| Error::io(&input, e))?;
            let data = KernelSpectrum::parse_csv(&text)?;
            let fit = fit_parameters(&data, rho, None)?;
            if let Some(dir) = &cli.out {
                write_file(&dir.join("fit.csv"), fit.to_csv().as_bytes())?;
            }
            emit(stdout, &fit.to_key_value())?;
        }
        Command::Mu0 {
            rho,
            mu_s,
            ell2,
            mu,
            b_norm,
        } => {
            let params = MaterialParams::new(mu, mu_s, ell2, rho)?;
            let report = compute_mu0(&params, b_norm)?;
            if let Some(dir) = &cli.out {
                write_file(&dir.join("mu0.csv"), report.to_csv().as_bytes())?;
            }
            emit(stdout, &report.to_key_value())?;
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs the selected subcommand.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

pub fn cli_main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
