//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mutwb_core::exchange::{explore, monomial_budget_from_env, DecoratedSeed, ExchangeGraph, ExploreError, ExploreOptions, Identity};
use mutwb_core::field::parse_rational;
use mutwb_core::local::Character;
use mutwb_core::registry::EXAMPLES;
use mutwb_core::seed::SeedJson;

use crate::state::{Source, StepError, Workbench};

#[derive(Debug, Parser)]
#[command(name = "mutwb", version, about = "Exact seed, quiver and curve mutation workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a mutation sequence and report the final state.
    Mutate {
        #[command(flatten)]
        input: Input,
        /// Comma-separated 1-based indices.
        #[arg(long, value_delimiter = ',')]
        sequence: Vec<usize>,
        /// Rank-1 character `x_a,x_b`, e.g. `2,-1/3`.
        #[arg(long)]
        character: Option<String>,
        /// Print the state as JSON instead of the text report.
        #[arg(long)]
        json: bool,
        /// Skip the chart and X-variables, so the monomial cap never applies.
        #[arg(long)]
        no_expressions: bool,
    },
    /// Breadth-first exploration of the exchange graph.
    Explore {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
    /// Write the exchange graph as DOT or JSON.
    Export {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
        #[arg(long, conflicts_with = "json", required_unless_present = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Append-only journal, replayed on start.
        #[arg(long)]
        journal: Option<PathBuf>,
    },
    /// List the built-in examples.
    Examples,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Built-in example key (see `examples`).
    #[arg(long)]
    pub example: Option<String>,
    /// Curve configuration JSON: `{"classes": ..}` or `{"ledger": {"P": .., "s": ..}}`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed JSON: `{"rank", "form", "vectors", "signing"}`.
    #[arg(long)]
    pub seed: Option<PathBuf>,
    /// A state previously written by `mutate --json`.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Limits {
    /// Stop after this many levels; unlimited if omitted.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub max_vertices: usize,
    /// How vertices are identified.
    #[arg(long, value_enum, default_value_t = IdentityArg::Exact)]
    pub identity: IdentityArg,
    /// Use the signed transformations.
    #[arg(long)]
    pub signed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    /// Compare X-variables as rational functions.
    Exact,
    /// Compare X-variables by their values at fixed points modulo a large prime.
    Fingerprint,
}

/// A failed command and its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable input or invalid arguments: exit 1.
    Input(String),
    /// A blocked mutation: exit 2.
    Blocked { step: usize, index: usize, error: StepError },
    /// A vertex or expression budget ran out: exit 3.
    Budget(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Blocked { .. } => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "error: {m}"),
            Failure::Blocked { step, index, error } => {
                write!(f, "blocked at step {step} (index {index}): {error} [{}]", error.reason())
            }
            Failure::Budget(m) => write!(f, "budget exceeded: {m}"),
        }
    }
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

impl Input {
    pub fn source(&self) -> Result<Source, Failure> {
        let mut src = Source::default();
        if let Some(key) = &self.example {
            src.example = Some(key.clone());
        }
        if let Some(p) = &self.config {
            src.config = Some(read_json(p)?);
        }
        if let Some(p) = &self.seed {
            let j: SeedJson = serde_json::from_value(read_json(p)?).map_err(input_error)?;
            src.seed = Some(j);
        }
        if let Some(p) = &self.state {
            src.state = Some(serde_json::from_value(read_json(p)?).map_err(input_error)?);
        }
        Ok(src)
    }
}

pub fn parse_character(s: &str) -> Result<Character, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else { return Err(input_error("character must be `x_a,x_b`")) };
    let q = |t: &str| parse_rational(t).ok_or_else(|| input_error(format!("bad rational {t:?}")));
    Character::new(q(a)?, q(b)?).map_err(input_error)
}

/// Runs everything except `serve`, writing results to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Mutate { input, sequence, character, json, no_expressions } => {
            let mut src = input.source()?;
            if *no_expressions {
                src.expressions = Some(false);
            }
            if let Some(c) = character {
                src.character = Some(parse_character(c)?);
            }
            let start = src.build().map_err(input_error)?;
            let word = sequence
                .iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| input_error("indices start at 1")))
                .collect::<Result<Vec<_>, _>>()?;
            match start.mutate_word(&word) {
                Ok(state) => {
                    let text = if *json { state.render() + "\n" } else { state.report() };
                    out.write_all(text.as_bytes()).map_err(input_error)
                }
                Err((_, StepError::TooLarge { cap }, _)) => {
                    Err(Failure::Budget(format!("an expression exceeded the cap of {cap} monomials")))
                }
                Err((_, e @ (StepError::OutOfRange { .. } | StepError::Failed(_)), _)) => Err(input_error(e)),
                Err((step, error, _)) => Err(Failure::Blocked { step: step + 1, index: word[step] + 1, error }),
            }
        }
        Command::Explore { input, limits } => {
            let graph = run_explore(input, limits)?;
            let counts: Vec<String> = graph.depth_counts().iter().map(ToString::to_string).collect();
            writeln!(out, "vertices by depth: {}", counts.join(" ")).map_err(input_error)?;
            writeln!(out, "vertices: {}", graph.len()).map_err(input_error)?;
            writeln!(out, "edges: {}", graph.edges().len()).map_err(input_error)?;
            let status = if graph.is_complete() { "closed (finite orbit)" } else { "open (depth limit)" };
            writeln!(out, "graph: {status}").map_err(input_error)
        }
        Command::Export { input, limits, dot, output, .. } => {
            let graph = run_explore(input, limits)?;
            let text = if *dot { graph.to_dot() } else { graph.to_json().to_string() + "\n" };
            match output {
                Some(p) => std::fs::write(p, text).map_err(|e| input_error(format!("{}: {e}", p.display()))),
                None => out.write_all(text.as_bytes()).map_err(input_error),
            }
        }
        Command::Examples => {
            for e in EXAMPLES {
                writeln!(out, "{:<16} {}", e.key, e.description).map_err(input_error)?;
            }
            Ok(())
        }
        Command::Serve { .. } => Err(input_error("serve runs through `run`")),
    }
}

fn run_explore(input: &Input, limits: &Limits) -> Result<ExchangeGraph<Workbench>, Failure> {
    let work = input.source()?.workbench().map_err(input_error)?;
    let identity = match limits.identity {
        IdentityArg::Exact => Identity::Exact,
        IdentityArg::Fingerprint => Identity::Fingerprint,
    };
    let root = DecoratedSeed::root(work, limits.signed).with_identity(identity);
    let opts = ExploreOptions {
        depth: limits.depth,
        max_vertices: Some(limits.max_vertices),
        max_monomials: monomial_budget_from_env(),
    };
    match explore(root, &opts) {
        Ok(g) => Ok(g),
        Err(ExploreError::BudgetExceeded { graph, reason }) => Err(Failure::Budget(format!(
            "{reason}; {} vertices found, by depth {:?}",
            graph.len(),
            graph.depth_counts()
        ))),
        Err(ExploreError::Failed(e)) => Err(input_error(e)),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Command::Serve { port, host, journal } = &cli.command {
        return match serve(host, *port, journal.as_deref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        };
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli.command, &mut lock) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

fn serve(host: &str, port: u16, journal: Option<&Path>) -> std::io::Result<()> {
    let store = match journal {
        Some(p) => crate::service::Store::with_journal(p)?,
        None => crate::service::Store::new(),
    };
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        crate::service::serve(listener, std::sync::Arc::new(store)).await
    })
}
