use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kg_breather::io::commands::{
    self, classification_report, exit_code, load_params, PlotKind, EXIT_FAILURE, EXIT_OK,
    EXIT_USAGE,
};
use kg_breather::io::manifest::RunManifest;
use kg_breather::Error;

#[derive(Parser)]
#[command(
    name = "kg-breather",
    version,
    about = "Nonlinear Klein-Gordon breather solver"
)]
struct Cli {
    /// Configuration file (`key = value` lines); defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: out]. For classify and plot it names the
    /// run directory when no path is given.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one run and write CSVs plus a manifest.
    Simulate {
        /// Take parameters from an existing manifest instead of --config.
        #[arg(long)]
        from_manifest: Option<PathBuf>,
    },
    /// Simulate and classify one run per amplitude.
    Sweep {
        /// Strictly increasing amplitudes, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        amplitudes: Vec<f64>,
    },
    /// Re-derive the mode label of a finished run from its files.
    Classify { dir: Option<PathBuf> },
    /// Render SVG plots from a finished run.
    Plot {
        dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "waveform")]
        kind: Kind,
        /// Snapshot times to render (all when omitted).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        times: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Waveform,
    Phase,
}

fn run(cli: Cli) -> Result<i32, Error> {
    let default_out = PathBuf::from("out");
    let out = cli.out.as_deref().unwrap_or(&default_out);
    match cli.command {
        Command::Simulate { from_manifest } => {
            let params = match from_manifest {
                Some(path) => {
                    let path = if path.is_dir() {
                        path.join(kg_breather::io::manifest::MANIFEST_FILE)
                    } else {
                        path
                    };
                    RunManifest::read_file(&path)?.params
                }
                None => load_params(cli.config.as_deref())?,
            };
            let outcome = commands::simulate(&params, out)?;
            if let Some(err) = &outcome.failure {
                eprintln!("error: {err}");
                eprintln!("partial outputs kept in {}", out.display());
                return Ok(EXIT_FAILURE);
            }
            let m = &outcome.manifest;
            println!("wrote {}", out.display());
            println!("max |energy drift|: {:.3e}", m.max_energy_drift);
            println!("max stage residual: {:.3e}", m.max_stage_residual);
            if let Some(label) = &outcome.label {
                print!("{}", classification_report(label));
            }
            Ok(EXIT_OK)
        }
        Command::Sweep { amplitudes } => {
            let params = load_params(cli.config.as_deref())?;
            let rows = commands::sweep(&params, &amplitudes, out)?;
            for r in &rows {
                match &r.note {
                    Some(note) => println!("A = {}: {} ({note})", r.amplitude, r.mode.as_str()),
                    None => println!("A = {}: {}", r.amplitude, r.mode.as_str()),
                }
            }
            Ok(if rows.iter().any(|r| r.note.is_none()) {
                EXIT_OK
            } else {
                EXIT_FAILURE
            })
        }
        Command::Classify { dir } => {
            let label = commands::classify_dir(dir.as_deref().unwrap_or(out))?;
            print!("{}", classification_report(&label));
            Ok(EXIT_OK)
        }
        Command::Plot { dir, kind, times } => {
            let run_dir = dir.as_deref().unwrap_or(out);
            let kind = match kind {
                Kind::Waveform => PlotKind::Waveform,
                Kind::Phase => PlotKind::Phase,
            };
            // plots land next to the data unless --out was given explicitly
            let target: &Path = cli.out.as_deref().unwrap_or(run_dir);
            for path in commands::plot(run_dir, kind, &times, target)? {
                println!("{}", path.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
