//! Batch front end. Every run produces one JSON [`RunReport`].

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::limits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Desk-scale structural Ramsey theory for ordered posets, lattices and multiposets"
)]
pub struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Single-threaded, node-bounded searches and no wall-clock field.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Search node limit; defaults to $RAMSEY_NODE_LIMIT or a built-in bound.
    #[arg(long, global = true)]
    pub node_limit: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a structure file against every invariant of its kind.
    Validate {
        #[arg(long)]
        structure: PathBuf,
        /// Template for a multiposet without an inline one.
        #[arg(long)]
        template: Option<PathBuf>,
    },
    /// Build Π_n.
    Pi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The embedding Φ(u) of an ordered poset into Π_|u|.
    Phi {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        word: String,
        /// Comma-separated alphabet.
        #[arg(long, default_value = "0")]
        alphabet: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide C → (B)^A_k, or search the least Π_n that works.
    Arrow(ArrowArgs),
    /// Ordering-property witness construction and certification.
    OpWitness {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Only certify this candidate witness.
        #[arg(long)]
        verify_only: Option<PathBuf>,
        #[arg(long, default_value_t = limits::DEFAULT_EXTENSION_LIMIT)]
        extension_limit: u64,
    },
    /// Weak triangle condition for a class of ordered multiposets.
    Wtc {
        /// `ordered-posets` or `multiposet:TEMPLATE.json`.
        #[arg(long, default_value = "ordered-posets")]
        class: String,
        /// `auto` or a structure file.
        #[arg(long, default_value = "auto")]
        tau: String,
        /// `auto` (pair types of 4-element members) or a JSON array of structures.
        #[arg(long, default_value = "auto")]
        sigmas: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Insert a τ-τ middle point above every ordered pair.
    Nabla {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        tau: Option<PathBuf>,
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Bounded search for a lattice amalgam.
    ApSearch {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b1: PathBuf,
        #[arg(long)]
        b2: PathBuf,
        /// Images of a's elements in b1, comma-separated labels.
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        /// `lattices`, `distributive`, `modular` or `custom:FILE`.
        #[arg(long, default_value = "lattices")]
        class: String,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// Evaluate a lattice identity under every assignment.
    Identity {
        #[arg(long)]
        lattice: PathBuf,
        /// `distributive`, `modular` or `custom:FILE`.
        #[arg(long)]
        check: String,
    },
    #[command(subcommand)]
    Multiposet(MultiposetCommand),
    /// All posets (or ordered posets) on n elements up to isomorphism.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ordered: bool,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Corpus sizes for n = 0..=n_max.
    Census {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
}

#[derive(Debug, Args)]
pub struct ArrowArgs {
    #[arg(long, required_unless_present = "pi_search")]
    pub host: Option<PathBuf>,
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub colors: usize,
    /// Search n = 0..=N for the least Π_n that arrows.
    #[arg(long, value_name = "N")]
    pub pi_search: Option<usize>,
    #[arg(long)]
    pub time_limit_secs: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum MultiposetCommand {
    Validate {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    OpWitness {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = limits::DEFAULT_EXTENSION_LIMIT)]
        extension_limit: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    /// `ok`, `holds`, `fails`, `unknown`, `violation` or `error`.
    pub verdict: String,
    pub exit_code: i32,
    pub result: serde_json::Value,
    /// Every certificate in `result` was re-checked independently.
    pub certificates_verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

/// What a finished run prints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub(crate) struct Ctx {
    pub deterministic: bool,
    pub node_limit: u64,
    pub inputs: Vec<InputDigest>,
}

impl Ctx {
    pub fn read(&mut self, path: &std::path::Path) -> crate::Result<String> {
        let bytes = std::fs::read(path)?;
        self.inputs.push(InputDigest {
            name: path.display().to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    pub fn note_text(&mut self, name: &str, text: &str) {
        self.inputs.push(InputDigest {
            name: name.to_string(),
            sha256: hex(&Sha256::digest(text.as_bytes())),
        });
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Outcome of a subcommand before it is wrapped in a report.
pub(crate) struct Verdict {
    pub verdict: &'static str,
    pub code: i32,
    pub result: serde_json::Value,
    pub verified: bool,
    pub nodes: Option<u64>,
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Format(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::Precondition(_)
        | Error::ModeMismatch { .. }
        | Error::Dimension(_)
        | Error::EmptyGenerators => EXIT_USAGE,
        Error::BoundExceeded { .. } | Error::NotFoundWithinBound(_) | Error::Undecided(_) => EXIT_UNKNOWN,
        _ => EXIT_FAILS,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Pi { .. } => "pi",
        Command::Phi { .. } => "phi",
        Command::Arrow(_) => "arrow",
        Command::OpWitness { .. } => "op-witness",
        Command::Wtc { .. } => "wtc",
        Command::Nabla { .. } => "nabla",
        Command::ApSearch { .. } => "ap-search",
        Command::Identity { .. } => "identity",
        Command::Multiposet(MultiposetCommand::Validate { .. }) => "multiposet validate",
        Command::Multiposet(MultiposetCommand::OpWitness { .. }) => "multiposet op-witness",
        Command::Gen { .. } => "gen",
        Command::Census { .. } => "census",
    }
}

fn default_node_limit() -> u64 {
    std::env::var(limits::NODE_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(limits::DEFAULT_NODE_LIMIT)
}

/// Parses `args` (including the program name), runs the command and
/// returns the report text and exit code; writes `--out` when given.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                RunOutput {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                RunOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx {
        deterministic: cli.deterministic,
        node_limit: cli.node_limit.unwrap_or_else(default_node_limit),
        inputs: Vec::new(),
    };
    let outcome = if cli.deterministic {
        match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli.command, &mut ctx)),
            Err(e) => Err(Error::Internal(e.to_string())),
        }
    } else {
        commands::dispatch(&cli.command, &mut ctx)
    };
    let mut stderr = String::new();
    let v = outcome.unwrap_or_else(|e| {
        stderr = format!("error: {e}\n");
        Verdict {
            verdict: if matches!(e, Error::Invalid(_)) {
                "violation"
            } else {
                "error"
            },
            code: error_code(&e),
            result: serde_json::json!({ "error": e.to_string() }),
            verified: false,
            nodes: None,
        }
    });
    let report = RunReport {
        command: command_name(&cli.command).to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: ctx.inputs,
        verdict: v.verdict.to_string(),
        exit_code: v.code,
        result: v.result,
        certificates_verified: v.verified,
        nodes: v.nodes,
        wall_clock_ms: (!cli.deterministic).then(|| start.elapsed().as_millis() as u64),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("serializable");
    text.push('\n');
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => RunOutput {
                code: v.code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => RunOutput {
                code: EXIT_USAGE,
                stdout: text,
                stderr: format!("{stderr}error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => RunOutput {
            code: v.code,
            stdout: text,
            stderr,
        },
    }
}
