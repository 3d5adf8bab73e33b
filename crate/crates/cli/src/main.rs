mod cache;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use wallkit::coxeter::{CayleyBall, CoxeterSystem};
use wallkit::dynamics::{NS_DOMAIN_MARGIN, NS_REGRESSION_BOUND};
use wallkit::export::Format;
use wallkit::fixtures;
use wallkit::graph::BallGraph;
use wallkit::scenario::{self, Command, Input, Params};
use wallkit::{Error, Result};

use cache::{sha256_hex, BallCache, VERSION};

#[derive(Parser)]
#[command(name = "wallkit", version, about = "Hyperplanes, orders and boundary dynamics on finite balls")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cayley ball or graph ball.
    Ball(CommandArgs),
    /// Hyperplanes with sectors and truncation status.
    Hyperplanes(CommandArgs),
    /// Relation and common transversals of every hyperplane pair.
    Pairs(CommandArgs),
    /// Graph order and meets from the root.
    Order(CommandArgs),
    /// Strongly separated pair certificate for `--element`.
    Certify(CommandArgs),
    /// Admissible path from `--letters` and connector `--candidates`.
    Admissible(CommandArgs),
    /// Seeded north-south dynamics of `--element`.
    Nsdyn(CommandArgs),
    /// Recurrence profile of `--ray` against `--axes`.
    Myrberg(CommandArgs),
    /// Paraclique report and type of a fixture.
    FixtureCheck(CommandArgs),
    /// Runs scenario files; scenarios run concurrently.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct CommandArgs {
    /// Coxeter system JSON file, or a fixture name.
    #[arg(long, conflicts_with = "graph")]
    system: Option<String>,
    /// Graph file (JSON or edge list), or `rose`.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    radius: Option<u32>,
    #[arg(long)]
    element: Option<String>,
    #[arg(long)]
    ray: Option<String>,
    #[arg(long, value_delimiter = ',')]
    axes: Vec<String>,
    /// Neighbourhood size for recurrence profiles.
    #[arg(long = "R")]
    neighbourhood: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    iters: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Admissible path letters, `word^n`.
    #[arg(long, value_delimiter = ',')]
    letters: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    candidates: Vec<String>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long)]
    tau: Option<u32>,
    /// Shade DOT vertices by the sectors of this hyperplane.
    #[arg(long)]
    shade: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    no_cache: bool,
}

/// A scenario file holds one of these or a list of them. Paths are relative
/// to the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    command: Command,
    #[serde(default)]
    system: Option<String>,
    #[serde(default)]
    graph: Option<String>,
    out: PathBuf,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    no_cache: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScenarioBatch {
    One(ScenarioFile),
    Many(Vec<ScenarioFile>),
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    code: &'a str,
    module: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ArtifactEntry {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct NsSettings {
    regression_bound: f64,
    domain_margin: u32,
}

#[derive(Serialize)]
struct Manifest {
    command: Command,
    version: &'static str,
    inputs_digest: String,
    seed: u64,
    artifacts: Vec<ArtifactEntry>,
    runtime_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    north_south: Option<NsSettings>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BraidClosureOverflow { .. } | Error::BallTooLarge { .. } | Error::PrecisionExhausted { .. } => 3,
        Error::InternalInconsistency(_) => 4,
        _ => 2,
    }
}

fn load_system(spec: &str, base: &Path) -> Result<CoxeterSystem> {
    let path = base.join(spec);
    match fs::read_to_string(&path) {
        Ok(text) => CoxeterSystem::parse(&text),
        Err(e) => match fixtures::named_system(spec) {
            Ok(sys) => Ok(sys),
            Err(_) => Err(Error::Io(format!("{}: {e}", path.display()))),
        },
    }
}

fn load_graph(spec: &str, base: &Path, radius: Option<u32>) -> Result<BallGraph> {
    if spec == "rose" {
        let r = radius.ok_or_else(|| Error::BadScenario("the rose fixture needs --radius".into()))?;
        return Ok(fixtures::rose_cover(r));
    }
    let path = base.join(spec);
    let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let rec = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        BallGraph::from_record(&rec)
    } else {
        BallGraph::parse_edge_list(&text)
    }
}

fn run_one(s: &ScenarioFile, base: &Path) -> Result<()> {
    let start = Instant::now();
    let (input, source) = match (&s.system, &s.graph) {
        (Some(spec), None) => {
            let sys = load_system(spec, base)?;
            let rec = serde_json::to_value(sys.to_record()).expect("record serialises");
            (Input::System(sys), rec)
        }
        (None, Some(spec)) => {
            let g = load_graph(spec, base, s.params.radius)?;
            let rec = serde_json::to_value(g.to_record()).expect("record serialises");
            (Input::Graph(g), rec)
        }
        _ => return Err(Error::BadScenario("give exactly one of --system and --graph".into())),
    };
    let cache = if s.no_cache { None } else { cache::default_dir().map(BallCache::new) };
    let balls = |sys: &CoxeterSystem, r: u32| -> Result<CayleyBall> {
        match &cache {
            Some(c) => c.get(sys, r),
            None => sys.cayley_ball(r),
        }
    };
    let artifacts = scenario::run(s.command, &input, &s.params, &balls)?;
    let out = base.join(&s.out);
    fs::create_dir_all(&out)?;
    let mut entries = Vec::new();
    for a in &artifacts {
        fs::write(out.join(&a.name), &a.bytes)?;
        entries.push(ArtifactEntry {
            name: a.name.clone(),
            sha256: sha256_hex(&a.bytes),
        });
    }
    let digest_input = serde_json::json!({
        "command": s.command,
        "source": source,
        "params": s.params,
    });
    let manifest = Manifest {
        command: s.command,
        version: VERSION,
        inputs_digest: sha256_hex(digest_input.to_string().as_bytes()),
        seed: s.params.seed,
        artifacts: entries,
        runtime_ms: start.elapsed().as_millis(),
        north_south: (s.command == Command::Nsdyn).then_some(NsSettings {
            regression_bound: NS_REGRESSION_BOUND,
            domain_margin: NS_DOMAIN_MARGIN,
        }),
    };
    fs::write(out.join("manifest.json"), wallkit::export::to_json(&manifest)?)?;
    Ok(())
}

fn report(e: &Error, out: Option<&Path>) {
    let rec = ErrorRecord {
        code: e.code(),
        module: e.module(),
        message: e.to_string(),
    };
    let line = serde_json::to_string(&rec).expect("error records serialise");
    eprintln!("{line}");
    if let Some(dir) = out {
        if fs::create_dir_all(dir).is_ok() {
            let _ = fs::write(dir.join("error.json"), format!("{line}\n"));
        }
    }
}

fn from_args(command: Command, a: CommandArgs) -> Result<ScenarioFile> {
    let d = Params::default();
    let params = Params {
        radius: a.radius,
        element: a.element,
        ray: a.ray,
        axes: a.axes,
        neighbourhood: a.neighbourhood.unwrap_or(d.neighbourhood),
        samples: a.samples.unwrap_or(d.samples),
        iters: a.iters.unwrap_or(d.iters),
        seed: a.seed.unwrap_or(d.seed),
        letters: a.letters,
        candidates: a.candidates,
        l: a.l.unwrap_or(d.l),
        tau: a.tau.unwrap_or(d.tau),
        shade: a.shade,
        format: a.format.as_deref().map(str::parse::<Format>).transpose()?,
    };
    Ok(ScenarioFile {
        command,
        system: a.system,
        graph: a.graph,
        out: a.out,
        params,
        no_cache: a.no_cache,
    })
}

fn run_batch(files: &[PathBuf]) -> u8 {
    let mut jobs: Vec<(ScenarioFile, PathBuf)> = Vec::new();
    let mut worst = 0;
    for f in files {
        let base = f.parent().map(Path::to_path_buf).unwrap_or_default();
        let parsed = fs::read_to_string(f)
            .map_err(Error::from)
            .and_then(|t| serde_json::from_str::<ScenarioBatch>(&t).map_err(|e| Error::BadScenario(format!("{}: {e}", f.display()))));
        match parsed {
            Ok(ScenarioBatch::One(s)) => jobs.push((s, base)),
            Ok(ScenarioBatch::Many(v)) => jobs.extend(v.into_iter().map(|s| (s, base.clone()))),
            Err(e) => {
                report(&e, None);
                worst = worst.max(exit_code(&e));
            }
        }
    }
    let mut outs: Vec<PathBuf> = jobs.iter().map(|(s, b)| b.join(&s.out)).collect();
    outs.sort();
    if outs.windows(2).any(|w| w[0] == w[1]) {
        let e = Error::BadScenario("two scenarios share an output directory".into());
        report(&e, None);
        return exit_code(&e);
    }
    let results: Vec<Result<()>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(s, base)| scope.spawn(move || run_one(s, base)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::InternalInconsistency("scenario panicked".into()))))
            .collect()
    });
    for ((s, base), r) in jobs.iter().zip(results) {
        if let Err(e) = r {
            report(&e, Some(&base.join(&s.out)));
            worst = worst.max(exit_code(&e));
        }
    }
    worst
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Run { files } => return ExitCode::from(run_batch(&files)),
        Cmd::Ball(a) => (Command::Ball, a),
        Cmd::Hyperplanes(a) => (Command::Hyperplanes, a),
        Cmd::Pairs(a) => (Command::Pairs, a),
        Cmd::Order(a) => (Command::Order, a),
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::Admissible(a) => (Command::Admissible, a),
        Cmd::Nsdyn(a) => (Command::Nsdyn, a),
        Cmd::Myrberg(a) => (Command::Myrberg, a),
        Cmd::FixtureCheck(a) => (Command::FixtureCheck, a),
    };
    let out = args.out.clone();
    let result = from_args(command, args).and_then(|s| run_one(&s, Path::new("")));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e, Some(&out));
            ExitCode::from(exit_code(&e))
        }
    }
}
