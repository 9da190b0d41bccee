use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rendezvous::adversary::SchedulerSpec;
use rendezvous::checker::{verify_all, VerifyBudget};
use rendezvous::engine::{run_any, AnyScenario, TerminalStatus};

mod sweep;

const VIOLATION: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "rendezvous", version, about = "Two-robot rendezvous simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace as JSON lines.
    Run(RunArgs),
    /// Run a scenario under the impossibility scheduler.
    Adversary(RunArgs),
    /// Run a template many times with varied seeds and starting points.
    Sweep(SweepArgs),
    /// Run every checker suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Overrides {
    /// Replace the scenario's round limit.
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Replace the scenario's gathering tolerance.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Trace destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the scenario's master seed.
    #[arg(long, env = "RENDEZVOUS_SEED")]
    seed: Option<u64>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    #[arg(long, env = "RENDEZVOUS_SEED", default_value_t = 0)]
    seed: u64,
    /// Summary destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, env = "RENDEZVOUS_SEED", default_value_t = 0)]
    seed: u64,
    /// Smaller sample counts for a quick check.
    #[arg(long)]
    quick: bool,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(INPUT_ERROR)
}

fn load(path: &Path, overrides: &Overrides) -> Result<AnyScenario, ExitCode> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_error(format_args!("{}: {e}", path.display())))?;
    let mut scenario = AnyScenario::from_json(&text)
        .map_err(|e| input_error(format_args!("{}: {e}", path.display())))?;
    match &mut scenario {
        AnyScenario::Line(s) => {
            s.max_rounds = overrides.max_rounds.unwrap_or(s.max_rounds);
            s.epsilon = overrides.epsilon.unwrap_or(s.epsilon);
        }
        AnyScenario::Plane(s) => {
            s.max_rounds = overrides.max_rounds.unwrap_or(s.max_rounds);
            s.epsilon = overrides.epsilon.unwrap_or(s.epsilon);
        }
    }
    scenario
        .validate()
        .map_err(|e| input_error(format_args!("{}: {e}", path.display())))?;
    Ok(scenario)
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_run(args: RunArgs, force_adversary: bool) -> ExitCode {
    let mut scenario = match load(&args.scenario, &args.overrides) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match &mut scenario {
        AnyScenario::Line(s) => {
            s.seed = args.seed.unwrap_or(s.seed);
            if force_adversary {
                s.scheduler = SchedulerSpec::Impossibility;
            }
        }
        AnyScenario::Plane(s) => {
            s.seed = args.seed.unwrap_or(s.seed);
            if force_adversary {
                s.scheduler = SchedulerSpec::Impossibility;
            }
        }
    }
    let trace = match run_any(&scenario) {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let written = output(args.out.as_deref()).and_then(|mut out| {
        trace.write_jsonl(&mut out)?;
        out.flush()
    });
    if let Err(e) = written {
        return input_error(format_args!("writing trace: {e}"));
    }
    let status = trace.status();
    match status {
        TerminalStatus::Gathered { round } => eprintln!("gathered after round {round}"),
        TerminalStatus::RoundLimit { rounds } => eprintln!("not gathered within {rounds} rounds"),
    }
    if sweep::is_violation(&scenario, status.gathered().is_some()) {
        eprintln!("violation: outcome contradicts the scenario's claim or expectation");
        return ExitCode::from(VIOLATION);
    }
    ExitCode::SUCCESS
}

fn cmd_sweep(args: SweepArgs) -> ExitCode {
    let template = match load(&args.scenario, &args.overrides) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let name = args
        .scenario
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let summary = match sweep::sweep(&name, &template, args.seeds, args.seed) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let written = output(args.out.as_deref()).and_then(|mut out| {
        serde_json::to_writer_pretty(&mut out, &summary)?;
        writeln!(out)?;
        out.flush()
    });
    if let Err(e) = written {
        return input_error(format_args!("writing summary: {e}"));
    }
    if summary.violations > 0 {
        return ExitCode::from(VIOLATION);
    }
    ExitCode::SUCCESS
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let budget = if args.quick {
        VerifyBudget {
            f_bound_samples: 10_000,
            case_fuzz: 4,
            decrease_traces: 20,
            reduction_runs: 10,
        }
    } else {
        VerifyBudget::default()
    };
    let reports = match verify_all(args.seed, budget) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(VIOLATION);
        }
    };
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VIOLATION)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args, false),
        Command::Adversary(args) => cmd_run(args, true),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    }
}
