use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use zbnoise_cli::config::RunConfig;
use zbnoise_cli::presets::{preset, PRESET_NAMES};
use zbnoise_cli::{gnuplot_script, run, Command};

/// Channels induced by zero-bandwidth classical noise on qubits.
#[derive(Parser)]
#[command(name = "zbnoise", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Contraction factors Λx, Λy, Λz on the time grid.
    Lambda(RunArgs),
    /// Kraus coefficients k0..k3 on the time grid.
    Kraus(RunArgs),
    /// Closed-form fidelities next to the general Uhlmann value.
    Fidelity(RunArgs),
    /// Monte-Carlo average against the analytic channel output.
    Oracle(RunArgs),
    /// Exact, Lindblad and memory-kernel traces plus semigroup residuals.
    Dynamics(RunArgs),
    /// Prints a preset configuration as JSON, or lists presets.
    Preset {
        /// Preset to print; omit to list names.
        name: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration (see `zbnoise preset`).
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also writes a gnuplot script next to the CSV output file.
    #[arg(long)]
    gnuplot: bool,
    /// Worker threads for Monte-Carlo sampling.
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                RunConfig::from_json(&text)?
            }
            (None, Some(name)) => match preset(name) {
                Some(cfg) => cfg,
                None => bail!("unknown preset {name:?}; available: {}", PRESET_NAMES.join(", ")),
            },
            (None, None) => bail!("either --config or --preset is required"),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(samples) = self.samples {
            cfg.samples = samples;
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sibling(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn execute(command: Command, args: &RunArgs) -> Result<bool> {
    let cfg = args.config()?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let passed = match &cfg.output {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            let passed = if command == Command::Dynamics {
                let div_path = sibling(path, ".divisibility.csv");
                let mut div = BufWriter::new(File::create(&div_path)?);
                let passed = run(command, &cfg, &mut out, &mut div)?;
                div.flush()?;
                passed
            } else {
                run(command, &cfg, &mut out, &mut io::sink())?
            };
            out.flush()?;
            if args.gnuplot {
                let script = gnuplot_script(command, &cfg, &path.to_string_lossy());
                fs::write(sibling(path, ".gp"), script)?;
            }
            passed
        }
        None if args.gnuplot => bail!("--gnuplot needs an output file (--out or \"output\" in the config)"),
        None => {
            let mut out = Vec::new();
            let mut div = Vec::new();
            let passed = run(command, &cfg, &mut out, &mut div)?;
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&out)?;
            if !div.is_empty() {
                writeln!(lock)?;
                lock.write_all(&div)?;
            }
            passed
        }
    };
    if !passed {
        eprintln!("zbnoise: {} cross-checks failed", command.name());
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Lambda(a) => (Command::Lambda, a),
        Cmd::Kraus(a) => (Command::Kraus, a),
        Cmd::Fidelity(a) => (Command::Fidelity, a),
        Cmd::Oracle(a) => (Command::Oracle, a),
        Cmd::Dynamics(a) => (Command::Dynamics, a),
        Cmd::Preset { name } => {
            return match name.as_deref() {
                None => {
                    PRESET_NAMES.iter().for_each(|n| println!("{n}"));
                    ExitCode::SUCCESS
                }
                Some(n) => match preset(n) {
                    Some(cfg) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&cfg).expect("configuration serializes")
                        );
                        ExitCode::SUCCESS
                    }
                    None => {
                        eprintln!("zbnoise: unknown preset {n:?}");
                        ExitCode::from(2)
                    }
                },
            };
        }
    };
    match execute(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("zbnoise: {e:#}");
            ExitCode::from(2)
        }
    }
}
