use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use repeater_cli::commands::{self, Table};
use repeater_cli::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "repeater",
    version,
    about = "Encoded quantum repeater chain model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key=value config file; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed for Monte Carlo runs
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output CSV path (default: <command>.csv)
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "stdout")]
    out: Option<PathBuf>,

    /// Write CSV to standard output
    #[arg(long, global = true)]
    stdout: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resources and maximum distance for every registered code
    Table1(Table1Args),
    /// L* against the effective error rate q
    Lstar(LstarArgs),
    /// Purification failure probability against the raw pair count
    Pfail(PfailArgs),
    /// Monte Carlo chain simulation checked against the analytic model
    Simulate(SimulateArgs),
    /// Cycle time and key rate for one code
    Rate(RateArgs),
}

#[derive(Debug, Args)]
struct Table1Args {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    f_star: Option<f64>,
    #[arg(long)]
    l0_km: Option<f64>,
}

#[derive(Debug, Args)]
struct LstarArgs {
    /// Comma-separated code names
    #[arg(long, value_delimiter = ',')]
    codes: Option<Vec<String>>,
    #[arg(long)]
    q_min: Option<f64>,
    #[arg(long)]
    q_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    f_star: Option<f64>,
}

#[derive(Debug, Args)]
struct PhysArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    f0: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
}

#[derive(Debug, Args)]
struct PfailArgs {
    #[command(flatten)]
    phys: PhysArgs,
    /// Block sizes for the N0 sweep
    #[arg(long = "n", value_delimiter = ',')]
    n_values: Option<Vec<u64>>,
    /// Sweep N0 up to this multiple of n
    #[arg(long)]
    n0_ratio_max: Option<u64>,
    /// Failure targets for the minimal-N0 table
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<f64>>,
    #[arg(long)]
    n_min: Option<u64>,
    #[arg(long)]
    n_max: Option<u64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    stations: Option<usize>,
    #[arg(long)]
    q_b: Option<f64>,
    #[arg(long)]
    q_p: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads (0: one per core)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[command(flatten)]
    phys: PhysArgs,
    #[arg(long)]
    code: Option<String>,
    /// Purification failure target
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    l0_km: Option<f64>,
    #[arg(long)]
    l_att_km: Option<f64>,
    #[arg(long)]
    v_km_s: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    n_eng: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    stations: Option<Vec<usize>>,
}

fn set<T>(slot: &mut T, v: &Option<T>)
where
    T: Clone,
{
    if let Some(v) = v {
        *slot = v.clone();
    }
}

impl PhysArgs {
    fn apply(&self, c: &mut RunConfig) {
        set(&mut c.beta, &self.beta);
        set(&mut c.delta, &self.delta);
        set(&mut c.f0, &self.f0);
        set(&mut c.levels, &self.levels);
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Table1(_) => "table1",
            Command::Lstar(_) => "lstar",
            Command::Pfail(_) => "pfail",
            Command::Simulate(_) => "simulate",
            Command::Rate(_) => "rate",
        }
    }

    fn apply(&self, c: &mut RunConfig) {
        match self {
            Command::Table1(a) => {
                set(&mut c.q, &a.q);
                set(&mut c.f_star, &a.f_star);
                set(&mut c.l0_km, &a.l0_km);
            }
            Command::Lstar(a) => {
                set(&mut c.codes, &a.codes);
                set(&mut c.q_min, &a.q_min);
                set(&mut c.q_max, &a.q_max);
                set(&mut c.points, &a.points);
                set(&mut c.f_star, &a.f_star);
            }
            Command::Pfail(a) => {
                a.phys.apply(c);
                set(&mut c.n_values, &a.n_values);
                set(&mut c.n0_ratio_max, &a.n0_ratio_max);
                set(&mut c.targets, &a.targets);
                set(&mut c.n_min, &a.n_min);
                set(&mut c.n_max, &a.n_max);
            }
            Command::Simulate(a) => {
                set(&mut c.sim_code, &a.code);
                set(&mut c.stations, &a.stations);
                set(&mut c.q_b, &a.q_b);
                set(&mut c.q_p, &a.q_p);
                set(&mut c.trials, &a.trials);
                set(&mut c.threads, &a.threads);
            }
            Command::Rate(a) => {
                a.phys.apply(c);
                set(&mut c.rate_code, &a.code);
                set(&mut c.target, &a.target);
                set(&mut c.l0_km, &a.l0_km);
                set(&mut c.l_att_km, &a.l_att_km);
                set(&mut c.v_km_s, &a.v_km_s);
                set(&mut c.eta, &a.eta);
                set(&mut c.gamma, &a.gamma);
                set(&mut c.rate_stations, &a.stations);
                if a.n_eng.is_some() {
                    c.n_eng = a.n_eng;
                }
            }
        }
    }
}

fn emit(cli: &Cli, tables: &[Table]) -> Result<()> {
    if cli.stdout {
        let parts = tables
            .iter()
            .map(Table::to_csv)
            .collect::<Result<Vec<_>>>()?;
        print!("{}", parts.join("\n"));
        return Ok(());
    }
    let base = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));
    for t in tables {
        let path = with_suffix(&base, t.suffix);
        fs::write(&path, t.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return base.to_path_buf();
    }
    let stem = base.file_stem().unwrap_or_default().to_string_lossy();
    let name = match base.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    base.with_file_name(name)
}

/// Runs the command; `Ok(true)` means the regression gate tripped.
fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    set(&mut cfg.seed, &cli.seed);
    cli.command.apply(&mut cfg);

    let mut gate = false;
    let tables = match &cli.command {
        Command::Table1(_) => vec![commands::table1(&cfg)?],
        Command::Lstar(_) => vec![commands::lstar(&cfg)?],
        Command::Pfail(_) => {
            let (a, b) = commands::pfail(&cfg)?;
            vec![a, b]
        }
        Command::Simulate(_) => {
            let r = commands::simulate(&cfg)?;
            gate = r.gate_failed();
            if gate {
                eprintln!(
                    "regression gate: max |z| = {:.2} exceeds {}",
                    r.max_abs_z,
                    commands::Z_GATE
                );
            }
            vec![r.table]
        }
        Command::Rate(_) => vec![commands::rate(&cfg)?],
    };
    emit(cli, &tables)?;
    Ok(gate)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
