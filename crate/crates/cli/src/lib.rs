//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the exit code with the run report.
//!
//! Exit codes: 0 success or "yes", 1 "no", 2 inconclusive, 64 usage or bad
//! input, 70 a verification failure (a bug), 74 an I/O failure on output.

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrgraph::graph::{parse_graph, to_dot, to_text};
use rrgraph::hom::{hom_to_text, parse_hom, GraphHom};
use rrgraph::MultiGraph;

pub use report::{sha256_hex, write_atomic, FileRecord, OutputRecord, RunReport};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_VERIFICATION: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "rrgraph", version, about = "Right-resolving graph homomorphisms")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for produced graph and homomorphism files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Write the main produced graph as DOT to this path.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Accept input graphs with sinks.
    #[arg(long, global = true)]
    allow_sinks: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// M(G) and the positional-matching resolver onto it.
    Minimize { graph: PathBuf },
    /// Stability relation and minimal images of a right-resolver.
    Stability(HomArgs),
    /// Whether a right-resolver is synchronizing (exit 0 yes, 1 no).
    SyncCheck(HomArgs),
    /// Fiber product of two right-resolvers onto a common codomain.
    Fiber {
        g1: PathBuf,
        hom1: PathBuf,
        g2: PathBuf,
        hom2: PathBuf,
        #[arg(long)]
        codomain: PathBuf,
    },
    /// The k-th higher edge graph.
    HigherEdge {
        graph: PathBuf,
        #[arg(short, default_value_t = 2)]
        k: usize,
    },
    /// Bunch classification.
    Bunchy { graph: PathBuf },
    /// The maximal bunchy factor B(G).
    Bg { graph: PathBuf },
    /// O(G) = G/∼_G for almost bunchy G.
    Og { graph: PathBuf },
    /// A synchronizing road colouring of a constant out-degree graph.
    RoadColor {
        graph: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// A synchronizer onto O_{M,q} when M(G) is a cycle of bunches.
    SyncFactor {
        graph: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Whether O(G1) and O(G2) are isomorphic (exit 0 yes, 1 no).
    DecideOg {
        g1: PathBuf,
        g2: PathBuf,
        #[arg(long, value_enum)]
        method: Option<DecideMethod>,
        /// Shorthand for `--method bunchy`.
        #[arg(long, conflicts_with_all = ["bfc", "method"])]
        bunchy: bool,
        /// Shorthand for `--method bfc`.
        #[arg(long, conflicts_with = "method")]
        bfc: bool,
    },
    /// Search hom_R(G, M(G)) for nontrivial stability (exit 0 witness, 1
    /// counterexample, 2 inconclusive).
    ProbeBfc {
        graph: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// DOT rendering of a graph, optionally coloured by a homomorphism.
    ExportDot {
        graph: PathBuf,
        #[arg(long)]
        hom: Option<PathBuf>,
        #[arg(long, requires = "hom")]
        codomain: Option<PathBuf>,
    },
    /// Write an enumerated corpus into `--out`.
    Corpus {
        #[arg(value_enum)]
        kind: CorpusKind,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
}

#[derive(Debug, Args)]
struct HomArgs {
    graph: PathBuf,
    hom: PathBuf,
    /// Codomain graph; rebuilt from the images when absent.
    #[arg(long)]
    codomain: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecideMethod {
    Bunchy,
    Bfc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CorpusKind {
    Named,
    All,
    Constant,
    CycleFibered,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(rrgraph::Error),
    Io(PathBuf, std::io::Error),
}

impl From<rrgraph::Error> for CliError {
    fn from(e: rrgraph::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        use rrgraph::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(..) => EXIT_IO,
            CliError::Core(E::Verification(_) | E::NotTransitive(_)) => EXIT_VERIFICATION,
            CliError::Core(E::BudgetExhausted { .. }) => EXIT_INCONCLUSIVE,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Shared state of one command run.
struct Ctx {
    global: GlobalArgs,
    report: RunReport,
    failed_checks: Vec<String>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        self.report.inputs.push(FileRecord { path: path.to_path_buf(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))
    }

    fn load_graph(&mut self, path: &Path) -> CliResult<Arc<MultiGraph>> {
        let text = self.read(path)?;
        let g = parse_graph(&text, self.global.allow_sinks)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(Arc::new(g))
    }

    fn load_hom(&mut self, path: &Path, domain: Arc<MultiGraph>, codomain: Option<Arc<MultiGraph>>) -> CliResult<GraphHom> {
        let text = self.read(path)?;
        parse_hom(&text, domain, codomain).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    fn emit(&mut self, kind: &'static str, name: &str, contents: String) -> CliResult<()> {
        let Some(dir) = self.global.out.clone() else { return Ok(()) };
        std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        let path = dir.join(name);
        write_atomic(&path, contents.as_bytes()).map_err(|e| CliError::Io(path.clone(), e))?;
        self.report.outputs.push(OutputRecord { kind, path, sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    }

    fn emit_graph(&mut self, name: &str, g: &MultiGraph) -> CliResult<()> {
        self.emit("graph", name, to_text(g))
    }

    fn emit_hom(&mut self, name: &str, h: &GraphHom) -> CliResult<()> {
        self.emit("hom", name, hom_to_text(h))
    }

    /// The `--dot` target, if any, gets `g`.
    fn emit_dot(&mut self, g: &MultiGraph, colours: Option<&[String]>) -> CliResult<()> {
        let Some(path) = self.global.dot.clone() else { return Ok(()) };
        let text = to_dot(g, colours);
        write_atomic(&path, text.as_bytes()).map_err(|e| CliError::Io(path.clone(), e))?;
        self.report.outputs.push(OutputRecord { kind: "dot", path, sha256: sha256_hex(text.as_bytes()) });
        Ok(())
    }

    /// Records a recomputed property that must hold; a false one turns the
    /// run into a verification failure.
    fn require(&mut self, name: &str, holds: bool) {
        self.report.verdicts.insert(name.to_string(), holds);
        if !holds {
            self.failed_checks.push(name.to_string());
        }
    }

    /// Records a recomputed property that is an answer, not an obligation.
    fn verdict(&mut self, name: &str, value: bool) {
        self.report.verdicts.insert(name.to_string(), value);
    }
}

/// Exit code and report of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<RunReport>,
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return Outcome { code, report: None };
        }
    };
    let started = Instant::now();
    let report = RunReport { command: command_name(&cli.command).to_string(), seed: cli.global.seed, ..Default::default() };
    let mut ctx = Ctx { global: cli.global, report, failed_checks: Vec::new() };
    let result = commands::execute(&cli.command, &mut ctx);
    let mut code = match &result {
        Ok(code) => *code,
        Err(e) => {
            ctx.report.error = Some(e.to_string());
            e.code()
        }
    };
    if !ctx.failed_checks.is_empty() {
        code = EXIT_VERIFICATION;
        ctx.report.error = Some(format!("verification failed: {}", ctx.failed_checks.join(", ")));
    }
    ctx.report.exit_code = code;
    ctx.report.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    if let Some(msg) = &ctx.report.error {
        let _ = writeln!(err, "rrgraph {}: {msg}", ctx.report.command);
    }
    let _ = if ctx.global.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&ctx.report).expect("report serializes"))
    } else {
        write_human(out, &ctx.report)
    };
    Outcome { code, report: Some(ctx.report) }
}

fn write_human(out: &mut dyn Write, r: &RunReport) -> std::io::Result<()> {
    // Text results (DOT) go out bare so they can be piped.
    if let serde_json::Value::String(text) = &r.result {
        return write!(out, "{text}");
    }
    writeln!(out, "{}", r.command)?;
    for (name, v) in &r.verdicts {
        writeln!(out, "  {name}: {}", if *v { "yes" } else { "no" })?;
    }
    for o in &r.outputs {
        writeln!(out, "  wrote {} {}", o.kind, o.path.display())?;
    }
    if !r.result.is_null() {
        writeln!(out, "{}", serde_json::to_string_pretty(&r.result).expect("value serializes"))?;
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Minimize { .. } => "minimize",
        Command::Stability(_) => "stability",
        Command::SyncCheck(_) => "sync-check",
        Command::Fiber { .. } => "fiber",
        Command::HigherEdge { .. } => "higher-edge",
        Command::Bunchy { .. } => "bunchy",
        Command::Bg { .. } => "bg",
        Command::Og { .. } => "og",
        Command::RoadColor { .. } => "road-color",
        Command::SyncFactor { .. } => "sync-factor",
        Command::DecideOg { .. } => "decide-og",
        Command::ProbeBfc { .. } => "probe-bfc",
        Command::ExportDot { .. } => "export-dot",
        Command::Corpus { .. } => "corpus",
    }
}
