//! `corridor-sim`: single runs, parameter sweeps, structural checks and
//! report rendering.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use chrono::Utc;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use corridor_sim::output::write_run_artifacts;
use corridor_sim::reporter::{pdf, render_text};
use corridor_sim::sim::{fixed_epoch, run_to_completion};
use corridor_sim::spawner::Catalog;
use corridor_sim::sweep::{run_row, run_rows_csv, spawn_sweep, RunSweepRow, SpawnSweepRow};
use corridor_sim::verify::verify;
use corridor_sim::{FrameClock, ReportCache, RunConfig, SimOptions, World};
use rayon::prelude::*;

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "corridor-sim",
    version,
    about = "Endless-corridor generation and playtesting simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one run and write its artifacts.
    Run(RunArgs),
    /// Repeat runs over spawn percentages and seeds.
    Sweep(SweepArgs),
    /// Recompute the structural checks for a configuration.
    Verify(VerifyArgs),
    /// Render a saved reports.json as text or PDF.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    auto_remove: bool,
    /// Output directory.
    #[arg(long, env = "CORRIDOR_SIM_OUT", default_value = "out")]
    out: PathBuf,
    /// Stamp reports with a fixed epoch instead of the current time.
    #[arg(long)]
    fixed_timestamp: bool,
    #[arg(long, value_enum, default_value_t = ClockArg::Modeled)]
    frame_clock: ClockArg,
    /// Prefab catalog JSON replacing the built-in one.
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Modeled,
    Wall,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    /// Full simulations.
    Run,
    /// Spawner only, on isolated tiles.
    Spawn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Spawn percentages.
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0])]
    values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64])]
    seeds: Vec<u64>,
    #[arg(long, value_enum, default_value_t = SweepMode::Run)]
    mode: SweepMode,
    /// Tiles per row in spawn mode.
    #[arg(long, default_value_t = 1000)]
    tiles: usize,
    #[arg(long)]
    auto_remove: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Configuration to check; defaults when omitted.
    config: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("render").required(true).args(["pdf", "text"])))]
struct ReportArgs {
    reports: PathBuf,
    #[arg(long)]
    pdf: bool,
    #[arg(long)]
    text: bool,
    /// Output file; defaults to report.pdf or report.txt next to the input.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))
        .map_err(|e| Failure::new(EXIT_USAGE, e))?;
    RunConfig::from_json(&text)
        .with_context(|| format!("config {}", path.display()))
        .map_err(|e| Failure::new(EXIT_USAGE, e))
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog, Failure> {
    match path {
        None => Ok(Catalog::builtin()),
        Some(p) => Catalog::load(p)
            .with_context(|| format!("catalog {}", p.display()))
            .map_err(|e| Failure::new(EXIT_INPUT, e)),
    }
}

fn write_output(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.auto_remove |= args.auto_remove;
    let options = SimOptions {
        epoch: if args.fixed_timestamp {
            fixed_epoch()
        } else {
            Utc::now()
        },
        // Wall-clock frame times are never reproducible.
        frame_clock: match (args.fixed_timestamp, args.frame_clock) {
            (false, ClockArg::Wall) => FrameClock::Wall,
            _ => FrameClock::Modeled,
        },
        catalog: load_catalog(args.catalog.as_deref())?,
    };
    let world = World::new(cfg, options).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let out = run_to_completion(world);
    let files = write_run_artifacts(&out, &args.out).context("writing artifacts")?;
    let s = &out.summary;
    println!(
        "distance {:.1} m, finished {}, game over {}, segments {}, blocked {}, detected {}, removed {}, removed within detected {}",
        s.distance,
        s.finished,
        s.game_over,
        s.blockage.s_total,
        s.blockage.s_blocked,
        s.blockage.b_detected,
        s.blockage.b_removed,
        s.blockage.removed_subset_of_detected
    );
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut cfg = load_config(&args.config)?;
    cfg.auto_remove |= args.auto_remove;
    if let Some(bad) = args.values.iter().find(|v| !(0.0..=100.0).contains(*v)) {
        return Err(Failure::new(
            EXIT_USAGE,
            anyhow::anyhow!("spawn percentage {bad} outside [0, 100]"),
        ));
    }
    let jobs: Vec<(f64, u64)> = args
        .values
        .iter()
        .flat_map(|&p| args.seeds.iter().map(move |&s| (p, s)))
        .collect();
    let body = match args.mode {
        SweepMode::Run => {
            let rows: Vec<RunSweepRow> = jobs
                .par_iter()
                .map(|&(p, seed)| run_row(&cfg, p, seed))
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::new(EXIT_USAGE, e))?;
            match args.format {
                Format::Csv => run_rows_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows).context("serializing rows")? + "\n",
            }
        }
        SweepMode::Spawn => {
            let catalog = load_catalog(args.catalog.as_deref())?;
            let rows: Vec<SpawnSweepRow> = jobs
                .par_iter()
                .map(|&(p, seed)| spawn_sweep(&RunConfig { seed, ..cfg.clone() }, p, args.tiles, &catalog))
                .collect();
            match args.format {
                Format::Csv => spawn_rows_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows).context("serializing rows")? + "\n",
            }
        }
    };
    write_output(args.out.as_deref(), &body)
}

fn spawn_rows_csv(rows: &[SpawnSweepRow]) -> String {
    let mut s = String::from("p_spawn,seed,k,tiles,mean_realized,max_realized,saturation_bound,rho_spawn\n");
    for r in rows {
        let rho = r.rho_spawn.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"));
        s.push_str(&format!(
            "{},{},{},{},{:.6},{},{},{}\n",
            r.p_spawn, r.seed, r.k, r.tiles, r.mean_realized, r.max_realized, r.saturation_bound, rho
        ));
    }
    s
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    let report = verify(&cfg);
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).context("serializing report")?
        );
    } else {
        print!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_VERIFY,
            anyhow::anyhow!("structural verification failed"),
        ))
    }
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    let cache = ReportCache::load_json(&args.reports).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let text = render_text(&cache);
    let default_name = if args.pdf { "report.pdf" } else { "report.txt" };
    let out = args
        .out
        .unwrap_or_else(|| args.reports.parent().unwrap_or(Path::new(".")).join(default_name));
    if args.pdf {
        pdf::export_pdf(&text, &out).with_context(|| format!("cannot write {}", out.display()))?;
    } else {
        fs::write(&out, &text).with_context(|| format!("cannot write {}", out.display()))?;
    }
    println!("wrote {} ({} reports)", out.display(), cache.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            if f.code == EXIT_USAGE {
                eprintln!("usage: corridor-sim <run|sweep|verify|report> [OPTIONS]; see --help");
            }
            ExitCode::from(f.code)
        }
    }
}
