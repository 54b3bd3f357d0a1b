use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use msi_cli::{compare, cooling, spectrum, verify, CliError, OutputTarget, RunConfig};

#[derive(Parser)]
#[command(name = "msi", version, about = "Michelson-Sagnac interferometer noise and back-action")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Force-noise spectra, rigidity and optical damping over the sweep.
    Spectrum(Common),
    /// Relative errors of the closed forms against the exact model.
    Compare(Common),
    /// Phonon occupancy of the mechanical mode.
    Cooling {
        #[command(flatten)]
        common: Common,
        /// Search the pump over fixed optical budget.
        #[arg(long)]
        optimize: bool,
    },
    /// Seeded invariant suite.
    Verify {
        /// Optional config supplying tolerance overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
}

fn load(c: &Common) -> Result<(RunConfig, OutputTarget), CliError> {
    let cfg = RunConfig::from_path(&c.config)?;
    let out = OutputTarget::resolve(Some(&cfg), c.out.as_deref());
    Ok((cfg, out))
}

fn report(files: Vec<PathBuf>) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config("--threads", e.to_string()))?;
    }
    match cli.command {
        Command::Spectrum(c) => {
            let (cfg, out) = load(&c)?;
            report(spectrum::cmd_spectrum(&cfg, &out)?);
        }
        Command::Compare(c) => {
            let (cfg, out) = load(&c)?;
            report(compare::cmd_compare(&cfg, &out)?);
        }
        Command::Cooling { common, optimize } => {
            let (cfg, out) = load(&common)?;
            report(cooling::cmd_cooling(&cfg, &out, optimize)?);
        }
        Command::Verify { config, seed } => {
            let overrides = match config {
                Some(p) => RunConfig::from_path(&p)?.tolerances.verify,
                None => Default::default(),
            };
            let r = verify::run_suite(seed, &overrides)?;
            print!("{r}");
            let failed = r.failures().len();
            if failed > 0 {
                for c in r.failures() {
                    eprintln!("invariant failed: {}", c.name);
                }
                return Err(CliError::VerifyFailed { failed });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
