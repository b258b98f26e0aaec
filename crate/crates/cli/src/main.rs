use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ssgd_cli::checks::{self, CheckReport, Lemma2Options, SurveyOptions, VarianceOptions};
use ssgd_cli::experiment::{build_generators, prepare_metastable_tfim, Model};
use ssgd_cli::{output, run_basis_sweep, run_comparison, Ablation, ExperimentConfig, Label, ModelConfig, SweepMode};
use ssgd_core::SsgdConfig;

#[derive(Parser)]
#[command(name = "ssgd", version, about = "State-space gradient descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AblationArg {
    WithAncilla,
    UnitaryOnly,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run from one initial state, or the configured states if none is given.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        initial: Option<String>,
        #[arg(long, value_enum)]
        ablation: Option<AblationArg>,
    },
    /// Run the configured sweep and write all result files.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Prepare the TFIM metastable reference state.
    Quench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Paired with-ancilla / unitary-only energy curves from one state.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        initial: String,
    },
    /// Lindbladian identity for random instances.
    CheckLemma2 {
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long, default_value_t = 2)]
        n_system: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest unitary gradient on Haar-random states versus chain length.
    HaarSurvey {
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy variance of random brickwall circuits against the lower bound.
    BpVariance {
        #[arg(long, value_delimiter = ',', default_value = "4,6")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        layers: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks that the system step lowers the energy on random instances.
    SignCheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn report(r: CheckReport, out: Option<PathBuf>) -> Result<bool> {
    let text = r.render();
    print!("{text}");
    if let Some(dir) = out {
        output::emit_report(&dir, r.name, &text)?;
    }
    Ok(r.passed)
}

fn sweep(cfg: &ExperimentConfig) -> Result<bool> {
    let dir = cfg.output_dir();
    let result = run_basis_sweep(cfg)?;
    output::emit_results(cfg, &result, &dir)?;
    let (g, m, o) = (
        result.count(Label::Ground),
        result.count(Label::Metastable),
        result.count(Label::Other),
    );
    println!("runs\t{}", result.entries.len());
    println!("ground\t{g}\nmetastable\t{m}\nother\t{o}");
    println!("output\t{}", dir.display());
    Ok(true)
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            initial,
            ablation,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = initial {
                cfg.sweep.mode = SweepMode::SingleState;
                cfg.sweep.states = vec![s];
            }
            if let Some(a) = ablation {
                cfg.sweep.ablation = match a {
                    AblationArg::WithAncilla => Ablation::WithAncilla,
                    AblationArg::UnitaryOnly => Ablation::UnitaryOnly,
                    AblationArg::Both => Ablation::Both,
                };
            }
            cfg.validate()?;
            sweep(&cfg)
        }
        Command::Sweep { config } => sweep(&load(&config)?),
        Command::Quench { config } => {
            let cfg = load(&config)?;
            let ModelConfig::Tfim(p) = cfg.model else {
                bail!("quench preparation is defined for the TFIM only");
            };
            let gens = build_generators(&cfg)?;
            let qcfg = SsgdConfig {
                max_iters: cfg.quench.max_iters,
                ..cfg.ssgd.clone()
            };
            let q = prepare_metastable_tfim(&p, &gens, &qcfg)?;
            let model = Model::build(&cfg.model)?;
            let path = output::emit_quench(&cfg, &q, &cfg.output_dir())?;
            println!("energy_plus_hz\t{}", q.energy);
            println!("metastable_energy\t{}", q.metastable_energy);
            println!("ground_energy\t{}", model.ground_energy);
            println!("iterations\t{}", q.iterations);
            println!("converged\t{}", q.converged);
            println!("output\t{}", path.display());
            Ok(true)
        }
        Command::Compare { config, initial } => {
            let cfg = load(&config)?;
            let c = run_comparison(&cfg, &initial)?;
            let path = output::emit_comparison(&cfg, &c, &cfg.output_dir())?;
            println!("rows\t{}", c.aligned().len());
            println!("output\t{}", path.display());
            Ok(true)
        }
        Command::CheckLemma2 {
            draws,
            n_system,
            seed,
            tol,
            out,
        } => {
            let opts = Lemma2Options {
                draws,
                n_system,
                seed,
                tol,
                ..Default::default()
            };
            report(checks::lemma2(&opts)?, out)
        }
        Command::HaarSurvey {
            n_min,
            n_max,
            samples,
            seed,
            out,
        } => {
            let opts = SurveyOptions {
                n_min,
                n_max,
                samples,
                seed,
                ..Default::default()
            };
            report(checks::haar_survey(&opts)?, out)
        }
        Command::BpVariance {
            sizes,
            layers,
            samples,
            seed,
            out,
        } => {
            let opts = VarianceOptions {
                sizes,
                layers,
                samples,
                seed,
                ..Default::default()
            };
            report(checks::bp_variance(&opts)?.0, out)
        }
        Command::SignCheck { trials, seed } => report(checks::sign_check(trials, seed)?, None),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
