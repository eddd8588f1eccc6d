use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use fairchess::config::RunConfig;
use fairchess::engine::EngineConfig;
use fairchess::movegen::DEFAULT_MAX_PERFT_DEPTH;
use fairchess::notation::parse_line;
use fairchess::schedule::BUILTIN_IDS;
use fairchess::solver::{bundled_suite, compare_schedules, parse_instances, SolveLimits, SolveValue};
use fairchess::study::run_study;
use fairchess::{MoveSchedule, VariantState, WaiverMode};

#[derive(Parser)]
#[command(name = "fairchess", version, about = "Chess under arbitrary move-order schedules")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Builtin schedule id or a spec such as `WBBWW/BW`.
    #[arg(long, global = true)]
    schedule: Option<String>,
    #[arg(long, global = true)]
    waiver_mode: Option<WaiverMode>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count legal play sequences, with a per-move breakdown.
    Perft {
        /// `startpos` or an xFEN.
        #[arg(default_value = "startpos")]
        position: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Refuse depths above this.
        #[arg(long, default_value_t = DEFAULT_MAX_PERFT_DEPTH)]
        limit: u32,
    },
    /// Replay an annotated line and print the reached xFEN.
    Line {
        text: String,
        /// Start from this xFEN instead of the initial position.
        #[arg(long)]
        from: Option<String>,
    },
    /// Solve reduced-board instances under several schedules.
    Solve {
        /// Instance file; the bundled 4x4 suite when omitted.
        instances: Option<PathBuf>,
        /// Comma-separated schedule ids or specs; all builtins when omitted.
        #[arg(long)]
        schedules: Option<String>,
        /// `nodes=N,memo=N,depth=N`.
        #[arg(long)]
        limits: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the opening study with a UCI engine.
    Study {
        #[arg(long)]
        engine: Option<PathBuf>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        tolerance: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List builtin schedules with their first 16 plies.
    Schedules,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.schedule {
        config.schedule = s;
    }
    if let Some(w) = cli.waiver_mode {
        config.waiver_mode = w;
    }
    config.validate()?;

    match cli.command {
        Cmd::Perft { position, depth, limit } => perft(&config, &position, depth, limit),
        Cmd::Line { text, from } => line(&config, &text, from.as_deref()),
        Cmd::Solve { instances, schedules, limits, out } => {
            solve(&config, instances.as_deref(), schedules.as_deref(), limits.as_deref(), out)
        }
        Cmd::Study { engine, depth, tolerance, out } => study(config, engine, depth, tolerance, out),
        Cmd::Schedules => {
            for id in BUILTIN_IDS {
                let s = MoveSchedule::builtin(id)?;
                let flag = if s.is_approximation() { "  (16-ply approximation)" } else { "" };
                println!("{id:<20} {:<14} {}{flag}", s.spec(), s.letters(16));
            }
            Ok(())
        }
    }
}

fn start_state(config: &RunConfig, position: &str) -> Result<VariantState> {
    let state = if position == "startpos" {
        VariantState::initial(config.schedule())
    } else {
        VariantState::decode_xfen(position)?
    };
    Ok(state.with_waiver_mode(config.waiver_mode))
}

fn perft(config: &RunConfig, position: &str, depth: u32, limit: u32) -> Result<()> {
    if depth > limit {
        bail!("depth {depth} exceeds the limit {limit} (raise it with --limit)");
    }
    let state = start_state(config, position)?;
    let mut total = 0;
    if depth == 0 {
        total = 1;
    } else {
        for (m, n) in state.perft_divide(depth) {
            println!("{m}: {n}");
            total += n;
        }
        println!();
    }
    println!("schedule {} depth {depth}: {total}", state.schedule().id());
    Ok(())
}

fn line(config: &RunConfig, text: &str, from: Option<&str>) -> Result<()> {
    let start = start_state(config, from.unwrap_or("startpos"))?;
    let parsed = parse_line(text, &start)?;
    for step in &parsed.steps {
        let waived = if step.waived { "  restriction waived" } else { "" };
        println!("{:>4}  {}  {:<16} {}{waived}", step.ply, step.mover.letter(), step.phase.to_string(), step.san);
    }
    for note in &parsed.notes {
        println!("note: {note}");
    }
    println!("legal");
    println!("{}", parsed.final_state.encode_xfen());
    Ok(())
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn solve(
    config: &RunConfig,
    instances: Option<&Path>,
    schedules: Option<&str>,
    limits: Option<&str>,
    out: Option<PathBuf>,
) -> Result<()> {
    let instances = match instances {
        Some(p) => parse_instances(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => bundled_suite(),
    };
    let schedules: Vec<MoveSchedule> = match schedules {
        Some(list) => list.split(',').map(|s| MoveSchedule::resolve(s.trim())).collect::<Result<_, _>>()?,
        None => BUILTIN_IDS.iter().map(|id| MoveSchedule::builtin(id)).collect::<Result<_, _>>()?,
    };
    let limits = match limits {
        Some(spec) => SolveLimits::parse(spec)?,
        None => config.limits(),
    };
    let instances: Vec<_> = instances
        .into_iter()
        .map(|mut i| {
            i.state = i.state.with_waiver_mode(config.waiver_mode);
            i
        })
        .collect();
    let table = compare_schedules(&instances, &schedules, &limits);

    let width = table.instances.iter().map(String::len).max().unwrap_or(8).max(8);
    print!("{:width$}", "");
    for s in &table.schedules {
        print!("  {s:>20}");
    }
    println!();
    for row in table.cells.chunks(table.schedules.len().max(1)) {
        print!("{:width$}", row[0].instance);
        for cell in row {
            let text = match (&cell.error, cell.value) {
                (Some(_), _) | (None, None) => "error".to_string(),
                (None, Some(SolveValue::Known(v))) if v.distance > 0 => format!("{} {}", v.verdict, v.distance),
                (None, Some(SolveValue::Known(v))) => v.verdict.to_string(),
                (None, Some(SolveValue::Unknown { .. })) => "unknown".into(),
            };
            print!("  {text:>20}");
        }
        println!();
    }
    println!();
    for f in &table.favorability {
        println!(
            "{:<20} +{} ={} -{} ?{}  score {:+.3}",
            f.schedule, f.white_wins, f.draws, f.black_wins, f.unknown, f.score
        );
    }
    println!("ordering (White-favorable first): {}", table.ordering.join(" > "));
    match table.balanced_between {
        Some(b) => println!("balanced between standard and black-favorable: {b}"),
        None => println!("balanced between standard and black-favorable: not compared"),
    }
    for note in &table.notes {
        println!("note: {note}");
    }
    for cell in table.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!("{} under {}: {}", cell.instance, cell.schedule, cell.error.as_deref().unwrap_or_default());
    }

    if let Some(dir) = out.or_else(|| config_out(config)) {
        write_out(&dir, "solve.csv", &table.to_csv()?)?;
        write_out(&dir, "solve.json", &table.to_json())?;
    }
    Ok(())
}

/// The configured output directory, only when a config file set one.
fn config_out(config: &RunConfig) -> Option<PathBuf> {
    (config.output_dir != RunConfig::default().output_dir).then(|| config.output_dir.clone())
}

fn study(
    mut config: RunConfig,
    engine: Option<PathBuf>,
    depth: Option<u32>,
    tolerance: Option<u32>,
    out: Option<PathBuf>,
) -> Result<()> {
    if let Some(e) = engine {
        config.engine.path = Some(e);
    }
    if let Some(d) = depth {
        config.study.depth = d;
    }
    if let Some(t) = tolerance {
        config.study.tolerance_cp = t;
    }
    config.validate()?;
    let dir = out.unwrap_or_else(|| config.output_dir.clone());
    let lines = config.study_lines()?;
    let engine: Option<EngineConfig> = config.engine_config();
    let report = run_study(&lines, &config.study_settings(), engine.as_ref())?;

    if report.skipped {
        println!("skipped: no engine configured (set --engine, [engine] path, or FAIRCHESS_ENGINE)");
        write_out(&dir, "study.skipped", "skipped: no engine configured\n")?;
        return Ok(());
    }
    for r in &report.rows {
        let eval = match (&r.eval, &r.error) {
            (Some(e), _) => format!("{:+} cp (depth {})", e.centipawns, e.depth),
            (None, Some(err)) => format!("error: {}", err.lines().next().unwrap_or_default()),
            (None, None) => "-".into(),
        };
        let flag = match r.within_tolerance {
            Some(true) => "ok",
            Some(false) => "DEVIATES",
            None => "",
        };
        println!("{:<24} expected {:+4}  {eval}  {flag}", r.label, r.expected_cp);
    }
    println!(
        "{} of {} lines within ±{} cp at depth {}",
        report.lines_within_tolerance,
        report.rows.len(),
        report.tolerance_cp,
        report.depth
    );
    write_out(&dir, "study.json", &report.to_json())?;
    write_out(&dir, "study.csv", &report.to_csv()?)?;
    Ok(())
}
