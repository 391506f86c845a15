use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Deserialize;

use potgame_bench::{
    emit_plot, estimate_reference_optimum, fig1_suite, fig2_suite, fit_loglog_slope, read_csv, run_case, write_csv,
    BenchError, CaseSpec, ReferenceOptimum, Result, Trace,
};
use potgame_core::ingest::{read_scenario, read_tntp, sample_scenario, write_scenario, ScenarioConfig};
use potgame_core::routing::{grid_network, RoutingGame};

#[derive(Parser)]
#[command(name = "potgame", version, about = "Delayed accelerated mirror descent on routing games")]
struct Cli {
    /// Default directory for outputs not given explicitly.
    #[arg(long, global = true, env = "POTGAME_OUT", default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a scenario and write it as JSON.
    Sample(SampleArgs),
    /// Estimate the reference optimum of a scenario.
    Oracle(OracleArgs),
    /// Run one case or a built-in suite and write one CSV per case.
    Run(RunArgs),
    /// Fit the envelope log-log slope of a metrics CSV.
    Slope(SlopeArgs),
    /// Plot metrics CSVs on log-log axes.
    Plot(PlotArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// TNTP network file.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    network: Option<PathBuf>,
    /// Use a bidirectional grid instead of a network file.
    #[arg(long)]
    synthetic: bool,
    #[arg(long, default_value_t = 5)]
    rows: usize,
    #[arg(long, default_value_t = 5)]
    cols: usize,
    /// Scenario configuration JSON; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    players: Option<usize>,
    #[arg(long)]
    routes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Keep the network file's own BPR columns.
    #[arg(long)]
    native_bpr: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Fig1,
    Fig2,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Case spec JSON: one case or a list of cases.
    #[arg(long, conflicts_with = "suite", required_unless_present = "suite")]
    case: Option<PathBuf>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Horizon of the built-in suites.
    #[arg(long, default_value_t = 100_000)]
    horizon: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repeat every case with seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    /// Reference optimum; overrides `--oracle`.
    #[arg(long)]
    phi_star: Option<f64>,
    /// Oracle metadata JSON written by `oracle`. Without it and without
    /// `--phi-star` the oracle runs first with ten times the largest horizon.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SlopeArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    kmin: u64,
    #[arg(long)]
    kmax: u64,
    /// Envelope values at or below this are dropped.
    #[arg(long, default_value_t = 0.0)]
    floor: f64,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long, num_args = 1.., required = true)]
    csv: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CaseFile {
    One(CaseSpec),
    Many(Vec<CaseSpec>),
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    ensure_parent(path)?;
    std::fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
        }
        _ => Ok(()),
    }
}

fn load_game(path: &Path) -> Result<RoutingGame> {
    read_scenario(path).map_err(|e| match e {
        potgame_core::Error::Io(source) => BenchError::io(path, source),
        other => BenchError::Invalid(format!("{}: {other}", path.display())),
    })
}

fn sample(args: SampleArgs, out_dir: &Path) -> Result<()> {
    let mut config: ScenarioConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(n) = args.players {
        config.player_count = n;
    }
    if let Some(r) = args.routes {
        config.routes_per_player = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.native_bpr |= args.native_bpr;
    let network = match &args.network {
        Some(path) => {
            let tntp = read_tntp(path).map_err(|e| BenchError::Invalid(format!("{}: {e}", path.display())))?;
            if config.native_bpr {
                tntp.native_network()?
            } else {
                tntp.topology()?
            }
        }
        None => grid_network(args.rows, args.cols)?,
    };
    let game = sample_scenario(&network, &config)?;
    let out = args.out.unwrap_or_else(|| out_dir.join("scenario.json"));
    ensure_parent(&out)?;
    write_scenario(&game, &out).map_err(|e| BenchError::Invalid(format!("{}: {e}", out.display())))?;
    println!("{}", out.display());
    Ok(())
}

fn oracle(args: OracleArgs, out_dir: &Path) -> Result<()> {
    let game = load_game(&args.scenario)?;
    let orc = estimate_reference_optimum(&game, args.budget)?;
    let out = args.out.unwrap_or_else(|| out_dir.join("oracle.json"));
    write_json(&out, &orc)?;
    println!("phi_star = {}\nepsilon_oracle = {}", orc.phi_star, orc.epsilon_oracle);
    Ok(())
}

fn run(args: RunArgs, out_dir: &Path) -> Result<()> {
    let game = load_game(&args.scenario)?;
    let bundle = game.smoothness();
    let cases = match (&args.case, args.suite) {
        (Some(p), _) => match read_json::<CaseFile>(p)? {
            CaseFile::One(c) => vec![c],
            CaseFile::Many(cs) => cs,
        },
        (None, Some(Suite::Fig1)) => fig1_suite(bundle, args.horizon)?,
        (None, Some(Suite::Fig2)) => fig2_suite(bundle, args.horizon)?,
        (None, None) => unreachable!("clap requires a case or a suite"),
    };
    for c in &cases {
        c.validate(bundle)?;
    }
    let out = args.out.unwrap_or_else(|| out_dir.to_path_buf());
    std::fs::create_dir_all(&out).map_err(|e| BenchError::io(&out, e))?;

    let phi_star = match (args.phi_star, &args.oracle) {
        (Some(v), _) => v,
        (None, Some(p)) => read_json::<ReferenceOptimum>(p)?.phi_star,
        (None, None) => {
            let budget = 10 * cases.iter().map(|c| c.horizon).max().unwrap_or(1).max(1);
            info!("estimating the reference optimum with {budget} iterations");
            let orc = estimate_reference_optimum(&game, budget)?;
            write_json(&out.join("oracle.json"), &orc)?;
            orc.phi_star
        }
    };

    let jobs: Vec<(&CaseSpec, u64)> = cases
        .iter()
        .flat_map(|c| (0..args.seeds).map(move |j| (c, args.seed + j)))
        .collect();
    let results: Vec<Result<PathBuf>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(case, seed)| {
                let (game, out) = (&game, &out);
                let name = if args.seeds > 1 {
                    format!("{}_seed{seed}.csv", case.label)
                } else {
                    format!("{}.csv", case.label)
                };
                s.spawn(move || {
                    let records = run_case(game, case, seed, phi_star)?;
                    let path = out.join(name);
                    write_csv(&path, &records)?;
                    Ok(path)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("case thread panicked")).collect()
    });
    for r in results {
        println!("{}", r?.display());
    }
    Ok(())
}

fn slope(args: SlopeArgs) -> Result<()> {
    let records = read_csv(&args.csv)?;
    let points: Vec<(u64, f64)> = records.iter().map(|r| (r.k, r.gap)).collect();
    let s = fit_loglog_slope(&points, args.kmin, args.kmax, args.floor)?;
    println!("{s}");
    Ok(())
}

fn plot(args: PlotArgs, out_dir: &Path) -> Result<()> {
    let traces = args
        .csv
        .iter()
        .map(|p| {
            let records = read_csv(p)?;
            let label = records
                .first()
                .map(|r| r.case.clone())
                .unwrap_or_else(|| p.file_stem().unwrap_or_default().to_string_lossy().into_owned());
            Ok(Trace {
                label,
                points: records.iter().map(|r| (r.k, r.gap)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = args.out.unwrap_or_else(|| out_dir.join("gap.svg"));
    ensure_parent(&out)?;
    let csv = emit_plot(&traces, &out)?;
    println!("{}\n{}", out.display(), csv.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let out_dir = cli.out_dir;
    let result = match cli.command {
        Command::Sample(a) => sample(a, &out_dir),
        Command::Oracle(a) => oracle(a, &out_dir),
        Command::Run(a) => run(a, &out_dir),
        Command::Slope(a) => slope(a),
        Command::Plot(a) => plot(a, &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
