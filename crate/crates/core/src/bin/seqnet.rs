use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seqnet::harness::{
    gradcheck, run_dir, run_experiment, task_csv, task_samples, vanish_probe, ExperimentConfig,
};
use seqnet::topology::LstmLayout;
use seqnet::{Error, NetworkSpec, UnitRole};

const EXIT_USAGE: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_INVALID: u8 = 4;

#[derive(Parser)]
#[command(
    name = "seqnet",
    version,
    about = "Train and probe recurrent sequence learners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on a synthetic task and write metrics and checkpoints.
    Train(Common),
    /// Compare the configured trainer's gradient with finite differences.
    Gradcheck(Common),
    /// Write the error-flow decay curve of a random recurrent net.
    Vanish(Common),
    /// Write task sequences as CSV.
    GenTask(Common),
    /// Summarise a topology file, or the configured network.
    Inspect {
        #[command(flatten)]
        common: Common,
        /// Topology file to read instead of the configuration.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Runs executed concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Extra `key=value` settings applied after the file.
    overrides: Vec<String>,
}

impl Common {
    fn config(&self) -> seqnet::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply_overrides(&self.overrides)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self) -> seqnet::Result<PathBuf> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

enum Failure {
    Error(Error),
    Diverged,
    Invalid,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn train(c: &Common) -> Outcome {
    let cfg = c.config()?;
    let out = c.out_dir()?;
    let results = run_experiment(&cfg, &out, c.jobs)?;
    let mut diverged = false;
    for r in &results {
        match &r.diverged {
            Some(why) => {
                diverged = true;
                eprintln!("seed {}: diverged at {why}", r.seed);
            }
            None => println!(
                "seed {}: {} epochs, {} sequences, mse {}, accuracy {} -> {}",
                r.seed,
                r.epochs,
                r.presentations,
                r.mse,
                r.accuracy,
                run_dir(&out, r.seed).display()
            ),
        }
    }
    if diverged {
        Err(Failure::Diverged)
    } else {
        Ok(())
    }
}

fn grad(c: &Common) -> Outcome {
    let cfg = c.config()?;
    let report = gradcheck(&cfg, cfg.seed)?;
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("gradcheck.csv"), report.to_csv())?;
    }
    println!(
        "{} parameters, max relative error {:e} (tolerance {:e}): {}",
        report.entries.len(),
        report.max_rel_err,
        report.tolerance,
        if report.pass { "pass" } else { "FAIL" }
    );
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Invalid)
    }
}

fn vanish(c: &Common) -> Outcome {
    let cfg = c.config()?;
    let report = vanish_probe(&cfg, cfg.seed)?;
    let path = c.out_dir()?.join("vanish.csv");
    std::fs::write(&path, report.curve_csv())?;
    println!(
        "factor over {} steps: {:e}; dominant path {}, Jacobian norms {} -> {}",
        report.curve.len() - 1,
        report.factor,
        report.regime,
        report.norm_regime,
        path.display()
    );
    Ok(())
}

fn gen_task(c: &Common) -> Outcome {
    let cfg = c.config()?;
    let csv = task_csv(&task_samples(&cfg, cfg.seed)?);
    match &c.out {
        Some(_) => std::fs::write(c.out_dir()?.join("task.csv"), csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn summarize(spec: &NetworkSpec) -> String {
    let mut roles: Vec<(&str, usize)> = Vec::new();
    for u in &spec.units {
        let name = match u.role {
            UnitRole::Input => "input",
            UnitRole::Hidden => "hidden",
            UnitRole::Output => "output",
            UnitRole::GruUnit => "gru",
            UnitRole::Cell(_) => "cell",
            UnitRole::InputGate(_) => "input gate",
            UnitRole::OutputGate(_) => "output gate",
            UnitRole::ForgetGate(_) => "forget gate",
        };
        match roles.iter_mut().find(|(n, _)| *n == name) {
            Some((_, k)) => *k += 1,
            None => roles.push((name, 1)),
        }
    }
    let delayed = spec
        .connections
        .iter()
        .filter(|c| c.delay.steps() > 0)
        .count();
    let mut s = format!("units: {}\n", spec.units.len());
    for (name, k) in roles {
        s.push_str(&format!("  {name}: {k}\n"));
    }
    s.push_str(&format!(
        "connections: {} ({} delayed)\nblocks: {}\n",
        spec.connections.len(),
        delayed,
        spec.blocks.len()
    ));
    if let Ok(cc) = spec.count_connections() {
        if !spec.blocks.is_empty() {
            s.push_str(&format!(
                "complexity terms: block {}, input side {}, output side {}\n",
                cc.block_internal, cc.input_side, cc.output_side
            ));
        }
    }
    s
}

fn inspect(c: &Common, spec_path: Option<&Path>) -> Outcome {
    let cfg = c.config()?;
    let spec = match spec_path.or(cfg.spec.as_deref()) {
        Some(p) => NetworkSpec::from_text(&std::fs::read_to_string(p)?)?,
        None => LstmLayout::new(
            cfg.task.input_width(),
            cfg.blocks,
            cfg.cells,
            cfg.task.output_width(),
        )
        .hidden(cfg.hidden)
        .forget_bias(cfg.forget_bias)
        .build(),
    };
    print!("{}", summarize(&spec));
    let violations = spec.validate();
    if violations.is_empty() {
        println!("valid");
        Ok(())
    } else {
        for v in &violations {
            println!("violation: {v}");
        }
        Err(Failure::Invalid)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Train(c) => train(c),
        Command::Gradcheck(c) => grad(c),
        Command::Vanish(c) => vanish(c),
        Command::GenTask(c) => gen_task(c),
        Command::Inspect { common, spec } => inspect(common, spec.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Diverged) => ExitCode::from(EXIT_DIVERGED),
        Err(Failure::Invalid) => ExitCode::from(EXIT_INVALID),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Divergence(_) | Error::Domain(_) => EXIT_DIVERGED,
                Error::InvalidSpec(_) => EXIT_INVALID,
                _ => EXIT_USAGE,
            })
        }
    }
}
