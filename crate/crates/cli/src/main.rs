use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rab_cli::spec::{parse_spec, BuildingSpec, CliError};
use rab_cli::suites::{run_suite, SuiteConfig, SuiteName};
use rab_cli::{analyze, census, export, ExportFormat, ExportKind};

#[derive(Parser)]
#[command(name = "rab", version, about = "Right-angled buildings and their restricted universal groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the diagram and simplicity analysis on a building spec
    Analyze {
        /// Path to the building spec (JSON)
        spec: PathBuf,
        /// Emit the full report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Count irreducible ladderful diagrams up to a rank
    Census {
        #[arg(long, default_value_t = 6)]
        max_rank: usize,
        /// Write one DOT file per diagram into this directory
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Emit counts as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run a seeded property suite against a building spec
    Check {
        spec: PathBuf,
        /// One of: coloring, gate, closing-squares, concave, treewall,
        /// portrait-algebra, orbits, extension, independence, all
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export a ball or a tree-wall tree as DOT or JSON
    Export {
        spec: PathBuf,
        /// What to export: ball, treewall (alias: gamma)
        #[arg(long)]
        what: String,
        /// Tree-wall tree type label (required for --what treewall)
        #[arg(long = "type")]
        type_label: Option<String>,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Output format: dot or json
        #[arg(long, default_value = "dot")]
        format: String,
        /// Chamber budget for the exported ball
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
    },
}

fn load_spec(path: &PathBuf) -> Result<BuildingSpec, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_spec(&bytes)
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Analyze { spec, json } => {
            let spec = load_spec(&spec)?;
            let report = analyze(&spec)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?
                );
            } else {
                print!("{}", rab_cli::analyze::render_text(&report));
            }
            Ok(())
        }
        Command::Census { max_rank, dot, json } => {
            let table = census(max_rank)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&table).map_err(|e| CliError::Io(e.to_string()))?
                );
            } else {
                print!("{}", rab_cli::census::render_text(&table));
            }
            if let Some(dir) = dot {
                for path in rab_cli::census::write_dot_files(&table, &dir)? {
                    eprintln!("wrote {path}");
                }
            }
            Ok(())
        }
        Command::Check {
            spec,
            suite,
            radius,
            samples,
            seed,
        } => {
            let spec = load_spec(&spec)?;
            let cfg = SuiteConfig {
                radius,
                samples,
                seed,
                corrupt: false,
            };
            let names: Vec<SuiteName> = if suite == "all" {
                SuiteName::all().to_vec()
            } else {
                vec![SuiteName::parse(&suite)?]
            };
            let mut failed = Vec::new();
            for name in names {
                let report = run_suite(&spec, name, cfg)?;
                print!("{}", rab_cli::suites::render_text(&report));
                if !report.passed() {
                    failed.push(report);
                }
            }
            if let Some(first) = failed.first() {
                return Err(CliError::Violation(format!(
                    "{} violation(s) in suite {}",
                    first.violations.len(),
                    first.suite
                )));
            }
            Ok(())
        }
        Command::Export {
            spec,
            what,
            type_label,
            radius,
            format,
            limit,
        } => {
            let spec = load_spec(&spec)?;
            let kind = match what.as_str() {
                "ball" => ExportKind::Ball,
                "treewall" | "gamma" => ExportKind::TreeWallTree,
                other => return Err(CliError::Schema(format!("unknown export target `{other}`"))),
            };
            let format = match format.as_str() {
                "dot" => ExportFormat::Dot,
                "json" => ExportFormat::Json,
                other => return Err(CliError::Schema(format!("unknown format `{other}`"))),
            };
            let out = export(&spec, kind, type_label.as_deref(), radius, format, limit)?;
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
