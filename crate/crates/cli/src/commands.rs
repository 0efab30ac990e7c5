use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hygame_core::bisim::{verify_stages, ChainCheck};
use hygame_core::rational;
use hygame_core::semantics::{play, RandomStrategy};
use hygame_core::solver::synthesize;
use hygame_core::strategy::pull_back_strategy;
use hygame_core::{
    classify_flavor, validate_game, Chain, Flavor, Game, Move, Objective, Run, Stage, Strategy,
};
use serde_json::{json, Map, Value};

use crate::format::{emit_game, location_text, parse_game, ParseError};
use crate::strategy_file::{game_hash, strategy_kind, HistoryTable, RegionStrategyFile};

#[derive(Debug, Parser)]
#[command(name = "hygame", version, about = "Singular hybrid games: reduction to timed games and strategy synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    Stopwatch,
    Annotated,
    Updatable,
    Timed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a game file against the invariants of its declared flavor.
    Validate { game: PathBuf },
    /// Print the most specific flavor the game belongs to.
    Classify { game: PathBuf },
    /// Translate a singular game along the reduction chain.
    Transform {
        game: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check every link of the chain on sampled reachable configurations.
    CheckBisim {
        game: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the timed game of the chain for a reachability or safety
    /// objective, such as `reach:GOAL` or `safe:A,B`.
    Solve {
        game: PathBuf,
        #[arg(long)]
        objective: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Record the pulled-back strategy of a singular game on the histories
    /// explored by seeded random environments.
    PullBack {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Length of the recorded histories.
        #[arg(long, default_value_t = 10)]
        bound: usize,
        /// Number of environment plays explored.
        #[arg(long, default_value_t = 20)]
        plays: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Play a strategy against a seeded random environment and print the
    /// run as JSON lines.
    Simulate {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Rejected(String),
    #[error("{0}")]
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Rejected(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Rejected(e.to_string())
    }
}

/// Runs the command line `argv` (program name first). Artifacts go to
/// `out` or to the files named by `-o`; diagnostics go to `err`.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match run(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    parse_game(&read(path)?).map_err(|e| Failure::Rejected(format!("{}: {e}", path.display())))
}

fn write_artifact(output: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Internal(e.to_string())),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// The chain of a game of any flavor, the game being read as a singular
/// one.
fn chain_of(g: &Game) -> Result<Chain, Failure> {
    let mut isr = g.clone();
    isr.flavor = Flavor::Isr;
    Chain::build(&isr).map_err(|e| Failure::Rejected(e.to_string()))
}

fn check_valid(g: &Game) -> Result<(), Failure> {
    let v = validate_game(g);
    if v.is_empty() {
        Ok(())
    } else {
        let lines: Vec<String> = v.iter().map(|v| format!("{}: {v}", v.kind())).collect();
        Err(Failure::Rejected(lines.join("\n")))
    }
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::Internal(e.to_string());
    match command {
        Command::Validate { game } => {
            let g = load_game(&game)?;
            let v = validate_game(&g);
            for v in &v {
                writeln!(err, "{}: {v}", v.kind()).map_err(io)?;
            }
            if v.is_empty() {
                writeln!(out, "valid {} game", g.flavor).map_err(io)?;
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Command::Classify { game } => {
            let g = load_game(&game)?;
            let f = classify_flavor(&g).map_err(|e| Failure::Rejected(e.to_string()))?;
            writeln!(out, "{f}").map_err(io)?;
            Ok(0)
        }
        Command::Transform { game, to, output } => {
            let g = load_game(&game)?;
            let chain = chain_of(&g)?;
            let stage = match to {
                Target::Stopwatch => Stage::Stopwatch,
                Target::Annotated => Stage::Annotated,
                Target::Updatable => Stage::Updatable,
                Target::Timed => Stage::Timed,
            };
            write_artifact(&output, &emit_game(chain.stage(stage)), out)?;
            Ok(0)
        }
        Command::CheckBisim { game, samples, depth, seed } => {
            let g = load_game(&game)?;
            let chain = chain_of(&g)?;
            let report = verify_stages(&chain, ChainCheck::new(samples, depth, seed));
            for w in &report.warnings {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            for l in &report.links {
                let mut line = Map::new();
                line.insert("link".into(), json!(l.link.name()));
                line.insert("checked".into(), json!(l.checked));
                line.insert("passed".into(), json!(l.passed));
                line.insert("verdict".into(), json!(if l.counterexamples.is_empty() { "pass" } else { "fail" }));
                if let Some(c) = l.counterexamples.first() {
                    let (a, b) = l.link.stages();
                    line.insert(
                        "counterexample".into(),
                        json!({
                            "kind": format!("{:?}", c.kind),
                            "left": configuration_value(chain.stage(a), &c.left),
                            "right": configuration_value(chain.stage(b), &c.right),
                            "move": c.mv.as_ref().map(|(side, m)| json!({
                                "side": format!("{side:?}").to_lowercase(),
                                "edge": m.edge.0,
                                "delay": rational::format(&m.delay),
                            })),
                        }),
                    );
                }
                writeln!(out, "{}", Value::Object(line)).map_err(io)?;
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Solve { game, objective, output } => {
            let objective = Objective::parse(&objective)
                .ok_or_else(|| Failure::Usage(format!("bad objective {objective:?}; expected reach:OBS or safe:OBS")))?;
            let g = load_game(&game)?;
            check_valid(&g)?;
            let timed = if g.flavor == Flavor::Timed { g } else { chain_of(&g)?.timed };
            let syn = synthesize(&timed, &objective).map_err(|e| Failure::Internal(e.to_string()))?;
            let file = RegionStrategyFile::from_synthesis(&timed, &syn);
            write_artifact(&output, &json_text(&file.to_value(&timed)), out)?;
            if syn.initial_winning() {
                writeln!(err, "Pl1 wins {objective} ({} region nodes, {} strategy entries)", syn.graph.len(), file.entries.len()).map_err(io)?;
                Ok(0)
            } else {
                writeln!(err, "Pl1 does not win {objective} from the initial configuration").map_err(io)?;
                Ok(1)
            }
        }
        Command::PullBack { game, strategy, output, bound, plays, seed } => {
            let g = load_game(&game)?;
            check_valid(&g)?;
            let chain = chain_of(&g)?;
            let (v, kind) = strategy_kind(&read(&strategy)?)?;
            if kind != "region-positional" {
                return Err(Failure::Rejected(format!("pull-back needs a region-positional strategy, got {kind}")));
            }
            let file = RegionStrategyFile::from_value(&v, &chain.timed)?;
            if file.game != game_hash(&chain.timed) {
                return Err(Failure::Rejected("strategy was not computed for the timed game of this chain".into()));
            }
            let inner = file.player(&chain.timed);
            let sigma = pull_back_strategy(&chain, inner);
            let mut entries: BTreeMap<Vec<Move>, Option<Move>> = BTreeMap::new();
            let isr = &chain.isr;
            for p in 0..plays {
                let env = RandomStrategy::new(seed.wrapping_add(p));
                let run = play(isr, &sigma, &env, bound).map_err(|e| Failure::Internal(e.to_string()))?;
                for i in 0..=run.len() {
                    let h = run.prefix(i);
                    if h.last().owner(isr) == hygame_core::Owner::Pl1 {
                        let m = sigma.try_choose(&h).map_err(|e| Failure::Internal(e.to_string()))?;
                        entries.insert(h.moves().cloned().collect(), m);
                    }
                }
            }
            let table = HistoryTable {
                game: game_hash(isr),
                source: file.game.clone(),
                objective: file.objective.clone(),
                bound,
                seed,
                entries,
            };
            write_artifact(&output, &json_text(&table.to_value()), out)?;
            Ok(0)
        }
        Command::Simulate { game, strategy, seed, steps } => {
            let g = load_game(&game)?;
            check_valid(&g)?;
            let (v, kind) = strategy_kind(&read(&strategy)?)?;
            let env = RandomStrategy::new(seed);
            let hash = game_hash(&g);
            let (played, run, objective) = match kind.as_str() {
                "region-positional" if g.flavor == Flavor::Timed => {
                    let file = RegionStrategyFile::from_value(&v, &g)?;
                    if file.game != hash {
                        return Err(Failure::Rejected("strategy was computed for a different game".into()));
                    }
                    let run = play(&g, &file.player(&g), &env, steps).map_err(|e| Failure::Internal(e.to_string()))?;
                    (g, run, file.objective)
                }
                "region-positional" => {
                    let chain = chain_of(&g)?;
                    let file = RegionStrategyFile::from_value(&v, &chain.timed)?;
                    if file.game != game_hash(&chain.timed) {
                        return Err(Failure::Rejected("strategy was computed for a different game".into()));
                    }
                    let sigma = pull_back_strategy(&chain, file.player(&chain.timed));
                    let run = play(&chain.isr, &sigma, &env, steps).map_err(|e| Failure::Internal(e.to_string()))?;
                    (g, run, file.objective)
                }
                "history-table" => {
                    let table = HistoryTable::from_value(&v)?;
                    if table.game != hash {
                        return Err(Failure::Rejected("strategy was recorded for a different game".into()));
                    }
                    let run = play(&g, &table as &dyn Strategy, &env, steps).map_err(|e| Failure::Internal(e.to_string()))?;
                    (g, run, table.objective)
                }
                other => return Err(Failure::Rejected(format!("unknown strategy kind {other:?}"))),
            };
            print_run(&played, &run, out).map_err(io)?;
            let obs: Vec<&str> = run.configurations().map(|q| q.obs(&played)).collect();
            let met = match &objective {
                Objective::Reach(t) => obs.iter().any(|o| t.contains(*o)),
                Objective::Safe(s) => obs.iter().all(|o| s.contains(*o)),
            };
            if !met {
                writeln!(err, "the run does not satisfy {objective}").map_err(io)?;
            }
            Ok(if met { 0 } else { 1 })
        }
    }
}

fn configuration_value(g: &Game, q: &hygame_core::Configuration) -> Value {
    let val: Map<String, Value> = g
        .vars
        .iter()
        .zip(&q.val)
        .map(|(x, v)| (x.clone(), json!(rational::format(v))))
        .collect();
    json!({"location": location_text(&q.loc, &g.vars), "valuation": val})
}

fn print_run(g: &Game, run: &Run, out: &mut dyn Write) -> std::io::Result<()> {
    let configs: Vec<_> = run.configurations().collect();
    let moves: Vec<_> = run.moves().collect();
    for (i, q) in configs.iter().enumerate() {
        let mut line = Map::new();
        line.insert("step".into(), json!(i));
        line.insert("location".into(), json!(location_text(&q.loc, &g.vars)));
        line.insert("obs".into(), json!(q.obs(g)));
        line.insert("owner".into(), json!(match q.owner(g) {
            hygame_core::Owner::Pl1 => 1,
            hygame_core::Owner::Pl2 => 2,
        }));
        let val: Map<String, Value> = g
            .vars
            .iter()
            .zip(&q.val)
            .map(|(x, v)| (x.clone(), json!(rational::format(v))))
            .collect();
        line.insert("valuation".into(), Value::Object(val));
        let mv = moves
            .get(i)
            .map_or(Value::Null, |m| json!({"edge": m.edge.0, "delay": rational::format(&m.delay)}));
        line.insert("move".into(), mv);
        writeln!(out, "{}", Value::Object(line))?;
    }
    Ok(())
}
