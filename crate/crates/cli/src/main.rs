use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use otoc_sim::experiments::{
    run_spreading, run_state_comparison, run_synthesis_check, run_trotter_tradeoff, EvolutionKind, ExperimentReport,
    RunConfig, StateRecipe, TimeGrid,
};
use otoc_sim::{Error, Method, Split, TrotterOrder};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CHECKS: u8 = 3;
const EXIT_RUNTIME: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "otoc", version, about = "OTOC experiments on the transverse-field Ising chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// C_ij(t) over all j, integrable and chaotic
    Spreading,
    /// C_ij(t) for several initial states against exact evolution
    States,
    /// Accuracy and depth of several product formulas
    Tradeoff,
    /// Synthesized exponentials against dense matrix exponentials
    Synthcheck,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON run configuration; flags given here take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "J", global = true, allow_hyphen_values = true)]
    coupling: Option<f64>,
    #[arg(long = "hZ", global = true, allow_hyphen_values = true)]
    hz: Option<f64>,
    #[arg(long = "hX", global = true, allow_hyphen_values = true)]
    hx: Option<f64>,
    #[arg(long, global = true, value_parser = ["1", "2", "4"])]
    order: Option<String>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    split: Option<Split>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,
    /// Output time stride
    #[arg(long, global = true)]
    stride: Option<f64>,
    #[arg(long, global = true)]
    i: Option<usize>,
    /// One or more V sites, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    j: Option<Vec<usize>>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    method: Option<Method>,
    #[arg(long, global = true, value_parser = ["trotter", "exact"])]
    evolution: Option<String>,
    /// Initial states, e.g. `all-up,ghz,random-pm-y:8`
    #[arg(long, global = true, value_delimiter = ',')]
    states: Option<Vec<StateRecipe>>,
    /// Oracle agreement threshold; exceeding it exits with status 3
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

fn default_grid(command: Command) -> TimeGrid {
    match command {
        Command::Tradeoff => otoc_sim::experiments::tradeoff::TRADEOFF_GRID,
        _ => otoc_sim::experiments::DEFAULT_GRID,
    }
}

fn build_config(command: Command, f: Flags) -> Result<RunConfig, Error> {
    let mut c = match &f.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = f.n {
        c.n = v;
    }
    if let Some(v) = f.coupling {
        c.coupling = v;
    }
    if let Some(v) = f.hz {
        c.hz = v;
    }
    if f.hx.is_some() {
        c.hx = f.hx;
    }
    if let Some(v) = f.order {
        c.order = TrotterOrder::try_from(v.parse::<u8>().expect("restricted by clap"))?;
    }
    if let Some(v) = f.dt {
        c.dt = v;
    }
    if let Some(v) = f.split {
        c.split = v;
    }
    if f.t_max.is_some() || f.stride.is_some() {
        let base = c.times.unwrap_or_else(|| default_grid(command));
        c.times = Some(TimeGrid { start: base.start, stop: f.t_max.unwrap_or(base.stop), step: f.stride.unwrap_or(base.step) });
    }
    if let Some(v) = f.i {
        c.i = v;
    }
    if f.j.is_some() {
        c.j = f.j;
    }
    if let Some(v) = f.seed {
        c.seed = v;
    }
    if let Some(v) = f.out {
        c.out = v;
    }
    if let Some(v) = f.method {
        c.method = v;
    }
    if let Some(v) = f.evolution {
        c.evolution = if v == "exact" { EvolutionKind::Exact } else { EvolutionKind::Trotter };
    }
    if let Some(v) = f.states {
        c.states = v;
    }
    if f.tolerance.is_some() {
        c.tolerance = f.tolerance;
    }
    c.validate()?;
    Ok(c)
}

fn is_validation(e: &Error) -> bool {
    !matches!(e, Error::Io(_) | Error::Csv(_) | Error::Eigensolver(_) | Error::Consistency(_))
}

fn print_checks(report: &ExperimentReport) {
    println!("{:<48} {:>12} {:>12}  result", "check", "value", "threshold");
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{:<48} {:>12.3e} {:>12.3e}  {verdict}", c.name, c.value, c.threshold);
    }
}

fn run(command: Command, config: &RunConfig) -> Result<ExperimentReport, Error> {
    info!("running {command:?} into {}", config.out.display());
    let report = match command {
        Command::Spreading => run_spreading(config)?.report,
        Command::States => run_state_comparison(config)?.report,
        Command::Tradeoff => {
            let out = run_trotter_tradeoff(config)?;
            println!("{:<24} {:>12} {:>10} {:>10} {:>12}", "variant", "max|dC|", "step gates", "step depth", "total depth");
            for s in &out.summary {
                let show = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
                println!(
                    "{:<24} {:>12.3e} {:>10} {:>10} {:>12}",
                    s.name,
                    s.max_abs_dc,
                    show(s.step.map(|d| d.gate_count)),
                    show(s.step.map(|d| d.depth)),
                    show(s.total.map(|d| d.depth))
                );
            }
            out.report
        }
        Command::Synthcheck => {
            let (report, rows) = run_synthesis_check(config)?;
            let tol = report.checks[0].threshold;
            for n in 1..=rows.iter().map(|r| r.word.len()).max().unwrap_or(0) {
                let sized: Vec<_> = rows.iter().filter(|r| r.word.len() == n).collect();
                let worst = sized.iter().map(|r| r.error).fold(0.0, f64::max);
                let failed = sized.iter().filter(|r| r.error > tol).count();
                println!("n={n} cases={:<4} max_error={worst:.3e} failed={failed}", sized.len());
            }
            report
        }
    };
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = match build_config(cli.command, cli.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match run(cli.command, &config) {
        Ok(report) => {
            print_checks(&report);
            println!("wrote {} files to {}", report.files.len() + 2, config.out.display());
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECKS)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_validation(&e) { EXIT_VALIDATION } else { EXIT_RUNTIME })
        }
    }
}
