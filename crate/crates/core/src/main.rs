//! `geocausal` command-line interface.
//!
//! Every command loads the workspace file, does its work and saves the
//! workspace again if the graph changed. Errors go to stderr as
//! `error[CODE]: message`; the exit status is 0 on success, 1 for bad input
//! and 2 when persisted state breaks a graph invariant.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use geocausal::engine::{infer, EngineConfig};
use geocausal::ingest::{ingest_observations_csv, ingest_storm_csv, IngestReport, Strictness};
use geocausal::model::{Duration, EntityId};
use geocausal::query::{self, DEFAULT_MAX_DEPTH};
use geocausal::rules::parse_rules;
use geocausal::workspace::{Workspace, DEFAULT_WORKSPACE};
use geocausal::{Error, RelationKind};

#[derive(Parser)]
#[command(
    name = "geocausal",
    version,
    about = "Geo-event knowledge graph with situation-based causal inference"
)]
struct Cli {
    /// Workspace file holding the graph between invocations.
    #[arg(long, global = true, env = "GEOCAUSAL_WORKSPACE", default_value = DEFAULT_WORKSPACE)]
    workspace: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a CSV file into the workspace graph.
    Ingest {
        #[arg(value_enum)]
        source: Source,
        file: PathBuf,
        /// Skip bad rows instead of aborting on the first one.
        #[arg(long)]
        lenient: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Rule file operations.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
    /// Derive satisfies/effects/causes/affects edges to fixpoint.
    Infer {
        /// Rule file to use; remembered in the workspace for later runs.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Largest gap between a situation and the event it effects.
        #[arg(long, allow_hyphen_values = true, default_value = "24h")]
        max_gap: Duration,
        /// Do not require spatial overlap.
        #[arg(long)]
        no_spatial: bool,
    },
    /// Explain an event through its incoming causal edges.
    Why {
        event: EntityId,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = WhyFormat::Text)]
        format: WhyFormat,
    },
    /// Match `<id|?> <relation|?> <id|?>` against the graph.
    Query { pattern: String },
    /// Print the whole graph.
    Export {
        #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
        format: ExportFormat,
    },
    /// Check schema, provenance and index invariants.
    Validate,
    /// Assert a triple by hand.
    Assert {
        subject: EntityId,
        predicate: RelationKind,
        object: EntityId,
    },
}

#[derive(Subcommand)]
enum RulesAction {
    /// Parse a rule file and print it in canonical form.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    /// NOAA Storm Events bulk CSV.
    Storm,
    /// situation_id,timestamp_start,timestamp_end,attribute,value,unit[,lat,lon]
    Obs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhyFormat {
    Text,
    Dot,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
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
    let mut out = io::stdout().lock();
    match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code())
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode, Error> {
    let w = |e| Error::io("stdout", e);
    match cli.command {
        Command::Rules {
            action: RulesAction::Check { file },
        } => {
            return match parse_rules(&read(&file)?) {
                Ok(rules) => {
                    write!(out, "{rules}").map_err(w)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error[{}]: {}: {e}", e.code(), file.display());
                    Ok(ExitCode::from(1))
                }
            };
        }
        Command::Ingest {
            source,
            file,
            lenient,
            json,
        } => {
            let mut ws = Workspace::open(&cli.workspace)?;
            let strictness = if lenient {
                Strictness::Lenient
            } else {
                Strictness::Strict
            };
            let input = open(&file)?;
            let report: IngestReport = match source {
                Source::Storm => ingest_storm_csv(&mut ws.graph, input, strictness)?,
                Source::Obs => ingest_observations_csv(&mut ws.graph, input, strictness)?,
            };
            ws.save()?;
            if json {
                write!(out, "{}", report.to_json()).map_err(w)?;
                writeln!(out).map_err(w)?;
            } else {
                write!(out, "{report}").map_err(w)?;
            }
        }
        Command::Infer {
            rules,
            max_gap,
            no_spatial,
        } => {
            let config = EngineConfig {
                max_gap,
                require_spatial_overlap: !no_spatial,
            };
            config.check()?;
            let mut ws = Workspace::open(&cli.workspace)?;
            if let Some(r) = &rules {
                ws.set_rules(r);
            }
            let rules = ws.load_rules()?;
            let result = infer(&mut ws.graph, &rules, &config)?;
            ws.save()?;
            for t in &result.derived {
                writeln!(out, "{t}").map_err(w)?;
            }
            for d in &result.diagnostics {
                writeln!(out, "{d}").map_err(w)?;
            }
            writeln!(
                out,
                "derived {} triple(s) in {} iteration(s)",
                result.derived.len(),
                result.iterations
            )
            .map_err(w)?;
        }
        Command::Why {
            event,
            depth,
            format,
        } => {
            let ws = Workspace::open(&cli.workspace)?;
            let rules = match ws.rules {
                Some(_) => Some(ws.load_rules()?),
                None => None,
            };
            let ex = query::why(&ws.graph, &event, depth, rules.as_ref())?;
            let doc = match format {
                WhyFormat::Text => ex.to_string(),
                WhyFormat::Dot => query::explanation_to_dot(&ws.graph, &ex),
                WhyFormat::Json => query::explanation_to_json(&ex),
            };
            write!(out, "{doc}").map_err(w)?;
        }
        Command::Query { pattern } => {
            let ws = Workspace::open(&cli.workspace)?;
            for t in query::query(&ws.graph, &pattern)? {
                writeln!(out, "{t}").map_err(w)?;
            }
        }
        Command::Export { format } => {
            let ws = Workspace::open(&cli.workspace)?;
            let doc = match format {
                ExportFormat::Dot => query::graph_to_dot(&ws.graph),
                ExportFormat::Json => query::graph_to_json(&ws.graph),
            };
            write!(out, "{doc}").map_err(w)?;
        }
        Command::Validate => {
            let ws = Workspace::open(&cli.workspace)?;
            let report = ws.graph.validate();
            for e in &report.errors {
                writeln!(out, "error: {e}").map_err(w)?;
            }
            for warning in &report.warnings {
                writeln!(out, "warning: {warning}").map_err(w)?;
            }
            if !report.is_valid() {
                return Err(Error::Invariant(format!(
                    "{} invariant violation(s)",
                    report.errors.len()
                )));
            }
            writeln!(
                out,
                "ok: {} entities, {} triples, {} warning(s)",
                ws.graph.entity_count(),
                ws.graph.triple_count(),
                report.warnings.len()
            )
            .map_err(w)?;
        }
        Command::Assert {
            subject,
            predicate,
            object,
        } => {
            let mut ws = Workspace::open(&cli.workspace)?;
            let added = ws.graph.assert(&subject, predicate, &object)?;
            ws.save()?;
            let note = if added { "asserted" } else { "already present" };
            writeln!(out, "{note}: {subject} {predicate} {object}").map_err(w)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
