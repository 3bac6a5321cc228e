use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nls_atlas::commands::{self, CommandOutput};
use nls_atlas::config::{Experiment, Family, Suite};
use nls_atlas::rundir::read_manifest;
use nls_atlas::selftest::Fault;
use nls_atlas::{Failure, RunConfig};

/// Potential-well atlas for the focusing NLS  i u_t + Δu + |u|^{p-1} u = 0.
#[derive(Parser, Debug)]
#[command(name = "nls-atlas", version)]
struct Cli {
    /// TOML configuration, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps (0: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Default)]
struct InitialArgs {
    /// scaledQ, scaledQ-natural, gaussian or file.
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Field file for `--family file`.
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the exponent set for (N, p).
    Exponents,
    /// Solve for the ground state and report its norms.
    Groundstate,
    /// Locate the initial data relative to the potential well.
    Classify(InitialArgs),
    /// Evolve the initial data and classify the trajectory.
    Evolve(InitialArgs),
    /// Evolve a λ-family and write the dichotomy atlas.
    Sweep {
        /// Comma-separated λ values (replaces the configured list).
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        family: Option<Family>,
    },
    /// Sample the localized virial quantities along an evolution.
    Virial(InitialArgs),
    /// Run the property suites.
    Selftest {
        /// Suite to run (repeatable); default: the configured list.
        #[arg(long)]
        suite: Vec<Suite>,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<Fault>,
    },
}

fn apply_initial(cfg: &mut RunConfig, a: &InitialArgs) {
    if let Some(f) = a.family {
        cfg.initial.family = f;
    }
    if let Some(l) = a.lambda {
        cfg.initial.lambda = l;
    }
    if let Some(p) = &a.field {
        cfg.initial.family = Family::File;
        cfg.initial.path = Some(p.clone());
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) if path.extension().is_some_and(|e| e == "json") => read_manifest(path)?.config,
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    if let Some(d) = cli.dim {
        cfg.dim = d;
    }
    if let Some(p) = cli.p {
        cfg.p = p;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<CommandOutput, Failure> {
    let mut cfg = load_config(&cli)?;
    let out = cfg.output_dir.clone();
    let command = cli.command.unwrap_or(match cfg.experiment {
        Experiment::Groundstate => Command::Groundstate,
        Experiment::Classify => Command::Classify(InitialArgs::default()),
        Experiment::Evolve => Command::Evolve(InitialArgs::default()),
        Experiment::Sweep => Command::Sweep {
            lambdas: None,
            family: None,
        },
        Experiment::Virial => Command::Virial(InitialArgs::default()),
        Experiment::GronwallSelftest => Command::Selftest {
            suite: vec![Suite::Gronwall],
            inject_fault: None,
        },
        Experiment::CutoffSelftest => Command::Selftest {
            suite: vec![Suite::Cutoff],
            inject_fault: None,
        },
    });
    match command {
        Command::Exponents => commands::exponents(&cfg, &out),
        Command::Groundstate => {
            cfg.experiment = Experiment::Groundstate;
            commands::groundstate(&cfg, &out)
        }
        Command::Classify(a) => {
            cfg.experiment = Experiment::Classify;
            apply_initial(&mut cfg, &a);
            commands::classify(&cfg, &out)
        }
        Command::Evolve(a) => {
            cfg.experiment = Experiment::Evolve;
            apply_initial(&mut cfg, &a);
            commands::evolve_cmd(&cfg, &out)
        }
        Command::Sweep { lambdas, family } => {
            cfg.experiment = Experiment::Sweep;
            if let Some(l) = lambdas {
                cfg.sweep.lambdas = l;
                cfg.sweep.range = None;
            }
            if let Some(f) = family {
                cfg.initial.family = f;
            }
            commands::sweep(&cfg, &out)
        }
        Command::Virial(a) => {
            cfg.experiment = Experiment::Virial;
            apply_initial(&mut cfg, &a);
            commands::virial(&cfg, &out)
        }
        Command::Selftest {
            suite,
            inject_fault,
        } => {
            let suites = if suite.is_empty() {
                cfg.selftest.suites.clone()
            } else {
                suite
            };
            // a replayed manifest must rerun the same suites
            cfg.selftest.suites = suites.clone();
            match suites.as_slice() {
                [Suite::Gronwall] => cfg.experiment = Experiment::GronwallSelftest,
                [Suite::Cutoff] => cfg.experiment = Experiment::CutoffSelftest,
                _ => {}
            }
            commands::selftest(&cfg, &out, &suites, inject_fault)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let mut w = std::io::stdout().lock();
            let _ = writeln!(w, "{}", o.stdout);
            let _ = writeln!(
                w,
                "wrote {}",
                o.manifest.config.output_dir.join("manifest.json").display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
