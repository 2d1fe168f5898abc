use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ubeas::config::{stream_rng, Stream};
use ubeas::experiment::run_experiment;
use ubeas::fit::{fit_pdr_params, read_samples_csv};
use ubeas::link::{Modulation, ModulationParams};
use ubeas::output::emit_outputs;
use ubeas::topology::generate_topology;
use ubeas::verify::{certify_final_stage, check_pareto_convergence, SETTLE_STAGES};
use ubeas::{load_config, Error, GameConfig, GameKind};

#[derive(Parser)]
#[command(name = "ubeas", version, about = "Behavior-aware Stackelberg D2D power control simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment and write CSV results.
    Run(RunArgs),
    /// Fit the PDR curve parameters (a_c, b_c) to (sinr, pdr) samples.
    Fit {
        /// CSV file with `sinr,pdr` rows (header optional).
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value = "16QAM")]
        modulation: Modulation,
    },
    /// Dump the cell layout of one repetition.
    Topology {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        rep: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Game {
    Ubeas,
    Npc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Verify {
    Nash,
    Pareto,
    None,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Game::Ubeas)]
    game: Game,
    #[arg(long)]
    stages: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    priority: Option<Switch>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Hold the fading channel constant over all stages.
    #[arg(long)]
    freeze_fading: bool,
    #[arg(long, value_enum, default_value_t = Verify::None)]
    verify: Verify,
    /// Utility slack allowed by the ε-Nash check.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Grid points per player for the ε-Nash check.
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
}

enum Failure {
    Invalid(Error),
    Runtime(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Validation(_) => Failure::Invalid(e),
            other => Failure::Runtime(other),
        }
    }
}

fn read_config(path: Option<&Path>) -> Result<GameConfig, Failure> {
    match path {
        None => Ok(GameConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| {
                Failure::Invalid(Error::Io {
                    path: p.to_path_buf(),
                    source,
                })
            })?;
            Ok(load_config(&text)?)
        }
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut config = read_config(args.config.as_deref())?;
    if let Some(n) = args.stages {
        config.stages = n;
    }
    if let Some(n) = args.reps {
        config.repetitions = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(p) = args.priority {
        config.priority = p == Switch::On;
    }
    if args.freeze_fading {
        config.doppler_spread = 0.0;
    }
    config.validate()?;

    let kind = match args.game {
        Game::Ubeas => GameKind::Ubeas,
        Game::Npc => GameKind::Npc,
    };
    let (summary, trajectories) = run_experiment(&config, kind)?;
    let files = emit_outputs(&summary, &trajectories, &args.out)?;
    for f in &files {
        println!("wrote {}", f.display());
    }

    let mut failures = Vec::new();
    match args.verify {
        Verify::None => {}
        Verify::Nash => {
            for tr in &trajectories {
                let Some(result) = certify_final_stage(tr, &config, args.epsilon, args.grid) else {
                    continue;
                };
                let (report, _) = result?;
                if !report.passed {
                    failures.push(format!(
                        "rep {}: max follower gain {:e}, leader gain {:?}, violators {:?}",
                        tr.rep, report.max_gain, report.leader_gain, report.violators
                    ));
                }
            }
        }
        Verify::Pareto => {
            if kind == GameKind::Npc {
                return Err(Failure::Verification("the baseline game has no leader to converge".into()));
            }
            for tr in &trajectories {
                let report = check_pareto_convergence(tr, &config, SETTLE_STAGES)?;
                if !report.converged() {
                    failures.push(format!("rep {}: not converged", tr.rep));
                } else if !report.passed {
                    failures.push(format!(
                        "rep {}: satisfaction monotone {}, non-minimal pairs {:?}",
                        tr.rep, report.satisfaction_monotone, report.non_minimal
                    ));
                }
            }
        }
    }
    if failures.is_empty() {
        if args.verify != Verify::None {
            println!("verification passed for {} repetitions", trajectories.len());
        }
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("\n")))
    }
}

fn fit(samples: &Path, modulation: Modulation) -> Result<(), Failure> {
    let file = fs::File::open(samples).map_err(|source| {
        Failure::Invalid(Error::Io {
            path: samples.to_path_buf(),
            source,
        })
    })?;
    let data = read_samples_csv(BufReader::new(file)).map_err(Failure::Invalid)?;
    let f = fit_pdr_params(&data).map_err(Failure::Runtime)?;
    let p = ModulationParams::from_fit(modulation, f.a_c, f.b_c);
    println!("a_c,b_c,a,b,sse,iterations");
    println!("{},{},{},{},{},{}", f.a_c, f.b_c, p.a, p.b, f.sse, f.iterations);
    Ok(())
}

fn topology(config: Option<&Path>, seed: Option<u64>, rep: usize, out: Option<&Path>) -> Result<(), Failure> {
    let mut config = read_config(config)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    let cell = generate_topology(&config, &mut stream_rng(config.seed, rep, Stream::Topology))?;
    let io_err = |path: PathBuf| move |source| Failure::Runtime(Error::Io { path, source });
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(io_err(path.to_path_buf()))?;
            cell.write_csv(io::BufWriter::new(file)).map_err(io_err(path.to_path_buf()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            cell.write_csv(&mut stdout)
                .and_then(|_| stdout.flush())
                .map_err(io_err(PathBuf::from("<stdout>")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Fit { samples, modulation } => fit(&samples, modulation),
        Command::Topology { config, seed, rep, out } => topology(config.as_deref(), seed, rep, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed:\n{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
