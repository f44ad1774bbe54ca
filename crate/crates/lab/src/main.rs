use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use unsieved::error::{config_err, LabResult, EXIT_OK};
use unsieved::{run, ExperimentConfig, Format, Report, EXPERIMENTS};

/// Exact counts of unsieved integers and checkers for the weighted-sum
/// hypotheses.
///
/// Parameters are given as KEY=VALUE after the subcommand; `unsieved list`
/// shows them with their defaults. Exit codes: 0 success, 1 I/O or format
/// error, 2 invalid input or precondition not met, 3 budget or resolution
/// exceeded, 4 invariant violated.
#[derive(Parser)]
#[command(name = "unsieved", version)]
struct Cli {
    /// key=value file; command-line parameters override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the report, its echoed config and the timing sidecar.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated prime=,sieve=,dfs=,segment= ceilings.
    #[arg(long, global = true)]
    budget: Option<String>,
    /// Worker threads for independent x-points.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Also write (x, ratio) pairs for plotting; needs --out.
    #[arg(long, global = true)]
    emit_plot_data: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Params {
    #[arg(value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Count integers <= x with all prime factors in P.
    Psi(Params),
    /// Compare counts with the classical benchmarks.
    Benchmark(Params),
    /// Power-interval counterexample family across x.
    Counterexample(Params),
    /// Primes in one residue class across a t-grid.
    Congruence(Params),
    /// Small and large primes against u rho(u) (1 - 1/v).
    Friedlander(Params),
    /// Weighted integer sums landing near N.
    HypA(Params),
    /// Prime products in a window below x.
    HypP(Params),
    /// Simplex integrals of an open set with measure dt/t.
    HypT(Params),
    /// One instance through the integer, continuous and prime checkers.
    Pipeline(Params),
    /// Dickman rho table and its delay equation residual.
    Dickman(Params),
    /// Run the experiment named in --config (e.g. an echoed config).
    Run(Params),
    /// List experiments and their parameters.
    List,
}

impl Command {
    fn split(&self) -> Option<(Option<&'static str>, &Params)> {
        Some(match self {
            Command::Psi(p) => (Some("psi"), p),
            Command::Benchmark(p) => (Some("benchmark"), p),
            Command::Counterexample(p) => (Some("counterexample"), p),
            Command::Congruence(p) => (Some("congruence"), p),
            Command::Friedlander(p) => (Some("friedlander"), p),
            Command::HypA(p) => (Some("hyp-a"), p),
            Command::HypP(p) => (Some("hyp-p"), p),
            Command::HypT(p) => (Some("hyp-t"), p),
            Command::Pipeline(p) => (Some("pipeline"), p),
            Command::Dickman(p) => (Some("dickman"), p),
            Command::Run(p) => (None, p),
            Command::List => return None,
        })
    }
}

fn build_config(cli: &Cli, name: Option<&str>, params: &Params) -> LabResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(name.unwrap_or(""));
    if let Some(path) = &cli.config {
        cfg.merge_text(&fs::read_to_string(path)?)?;
        if let Some(name) = name {
            if cfg.experiment != name {
                if !cfg.experiment.is_empty() {
                    return Err(config_err(format!(
                        "config is for {:?}, not {name:?}",
                        cfg.experiment
                    )));
                }
                cfg.experiment = name.to_string();
            }
        }
    }
    if cfg.experiment.is_empty() {
        return Err(config_err("no experiment named; pass one in --config"));
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = &cli.budget {
        cfg.set_budget(b)?;
    }
    for p in &params.params {
        cfg.set_pair(p)?;
    }
    cfg.jobs = cli.jobs.max(1);
    Ok(cfg)
}

fn plot_data(report: &Report) -> LabResult<String> {
    let (Some(x), Some(ratio)) = (report.column("x"), report.column_f64("ratio")) else {
        return Err(config_err("this report has no (x, ratio) columns"));
    };
    let mut s = String::from("x,ratio\n");
    for (x, r) in x.iter().zip(ratio) {
        s.push_str(&format!("{x},{r}\n"));
    }
    Ok(s)
}

fn write_outputs(
    dir: &Path,
    report: &Report,
    rendered: &str,
    seconds: f64,
    plot: bool,
) -> LabResult<()> {
    fs::create_dir_all(dir)?;
    let cfg = ExperimentConfig::from_echo(&report.config)?;
    let stem = dir.join(&report.experiment);
    fs::write(stem.with_extension(cfg.format.extension()), rendered)?;
    fs::write(stem.with_extension("config"), cfg.to_text())?;
    let timing =
        serde_json::json!({ "experiment": report.experiment, "wall_clock_seconds": seconds });
    fs::write(stem.with_extension("timing.json"), format!("{timing}\n"))?;
    if plot {
        fs::write(stem.with_extension("plot.csv"), plot_data(report)?)?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> LabResult<i32> {
    let Some((name, params)) = cli.command.split() else {
        for e in EXPERIMENTS {
            println!("{:<15} {}", e.name, e.about);
            for (k, d) in e.keys {
                println!("{:<15}   {k}={d}", "");
            }
        }
        return Ok(EXIT_OK);
    };
    let cfg = build_config(cli, name, params)?;
    if cli.emit_plot_data && cli.out.is_none() {
        return Err(config_err("--emit-plot-data needs --out"));
    }
    let start = Instant::now();
    let report = run(&cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let rendered = report.render(cfg.format)?;
    match &cli.out {
        Some(dir) => write_outputs(dir, &report, &rendered, seconds, cli.emit_plot_data)?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    eprintln!(
        "{}: {:?} in {seconds:.3} s",
        report.experiment, report.status
    );
    for n in &report.notes {
        eprintln!("note: {n}");
    }
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
