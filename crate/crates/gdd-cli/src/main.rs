use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gdd_core::catalog::{self, EntryStatus, EntryVerification};
use gdd_core::feasibility::{check_feasible, enumerate_feasible, FeasibilityReport};
use gdd_core::format::{parse_design, parse_system, serialize_design, serialize_system};
use gdd_core::group_type::GroupType;
use gdd_core::orbit::develop_system;
use gdd_core::search::{
    prepare, search, SearchLimits, SearchMode, SearchOutcome, SelectionRule,
};
use gdd_core::verify::{verify, verify_system, VerificationReport};

/// Exit codes: 0 success / valid / found, 1 negative result (invalid design,
/// infeasible type, no solution), 2 usage or input error.
const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "gdd",
    about = "Construct, develop, verify and search for group divisible designs with block size 4",
    version
)]
struct Cli {
    /// Output rendering: human text or structured JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Check the necessary conditions for a group type.
    CheckType {
        #[arg(long = "type")]
        group_type: String,
    },
    /// List all feasible group types in a point range.
    Feasible {
        #[arg(long)]
        min_v: u32,
        #[arg(long)]
        max_v: u32,
        /// Keep only types whose point count has this residue modulo 3.
        #[arg(long)]
        mod3: Option<u32>,
    },
    /// Print v, the forced block count and the per-size replication numbers.
    Count {
        #[arg(long = "type")]
        group_type: String,
    },
    /// Develop a base-block system file into a full design.
    Develop {
        /// System file, or `-` for standard input.
        file: String,
        /// Write the design here instead of standard output.
        #[arg(long)]
        out: Option<String>,
    },
    /// Verify a system or design file (dispatches on the header line).
    Verify {
        /// File in either format, or `-` for standard input.
        file: String,
    },
    /// Work with the built-in catalog of reference constructions.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Search for a base-block system for a group type under a cyclic shift.
    Search {
        #[arg(long = "type")]
        group_type: String,
        #[arg(long)]
        modulus: u32,
        /// System file providing the point space and groups (base blocks ignored).
        #[arg(long)]
        layout: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::First)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 100_000_000)]
        node_limit: u64,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// One line per entry: name, type, modulus, base blocks, status.
    List,
    /// Metadata and notes for one entry.
    Show { name: String },
    /// Write the entry document to standard output.
    Emit { name: String },
    /// Parse, develop and verify one entry.
    Verify { name: String },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    First,
    All,
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes early (e.g. `... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code)
}

/// Errors bubbled up as strings are usage/input problems (exit 2).
fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::CheckType { group_type } => {
            let t: GroupType = group_type.parse().map_err(|e| format!("{e}"))?;
            let report = check_feasible(&t);
            render_feasibility(&report, cli.format);
            Ok(if report.feasible { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Feasible { min_v, max_v, mod3 } => {
            let types = enumerate_feasible(min_v, max_v, mod3).map_err(|e| format!("{e}"))?;
            match cli.format {
                Format::Human => {
                    for t in &types {
                        println!("{t}");
                    }
                }
                Format::Structured => {
                    let doc = serde_json::json!({
                        "min_v": min_v,
                        "max_v": max_v,
                        "mod3": mod3,
                        "types": types,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            Ok(EXIT_OK)
        }
        Command::Count { group_type } => {
            let t: GroupType = group_type.parse().map_err(|e| format!("{e}"))?;
            match count_doc(&t) {
                Ok(doc) => {
                    match cli.format {
                        Format::Human => {
                            println!("type {t}");
                            println!("v = {}", t.point_count());
                            println!("blocks = {}", doc.blocks);
                            let parts: Vec<String> = doc
                                .replication
                                .iter()
                                .map(|r| format!("size {} -> {}", r.size, r.blocks_per_point))
                                .collect();
                            println!("replication: {}", parts.join(", "));
                        }
                        Format::Structured => {
                            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                        }
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Develop { file, out } => {
            let text = read_input(&file)?;
            let system = parse_system(&text).map_err(|e| format!("{e}"))?;
            match develop_system(&system) {
                Ok(dev) => {
                    for w in &dev.orbit_warnings {
                        eprintln!(
                            "warning: base block {} declares orbit length {}, computed {}",
                            w.base_index, w.declared, w.computed
                        );
                    }
                    let doc = serialize_design(&dev.design);
                    match out {
                        Some(path) if path != "-" => std::fs::write(&path, doc)
                            .map_err(|e| format!("cannot write `{path}`: {e}"))?,
                        _ => print!("{doc}"),
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Verify { file } => {
            let text = read_input(&file)?;
            let header = text.lines().next().unwrap_or("").trim();
            let report = if header == gdd_core::format::DESIGN_HEADER {
                let design = parse_design(&text).map_err(|e| format!("{e}"))?;
                verify(&design)
            } else {
                let system = parse_system(&text).map_err(|e| format!("{e}"))?;
                match verify_system(&system) {
                    Ok(r) => r,
                    Err(e) => {
                        eprintln!("{e}");
                        return Ok(EXIT_NEGATIVE);
                    }
                }
            };
            render_verification(&report, cli.format);
            Ok(if report.is_valid() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Catalog { action } => run_catalog(action, cli.format),
        Command::Search {
            group_type,
            modulus,
            layout,
            mode,
            workers,
            node_limit,
        } => {
            let t: GroupType = group_type.parse().map_err(|e| format!("{e}"))?;
            if modulus == 0 {
                return Err("modulus must be positive".into());
            }
            let layout = match layout {
                Some(path) => {
                    let text = read_input(&path)?;
                    let system = parse_system(&text).map_err(|e| format!("{e}"))?;
                    if system.space.modulus() != modulus {
                        return Err(format!(
                            "layout file has modulus {}, but --modulus is {}",
                            system.space.modulus(),
                            modulus
                        ));
                    }
                    Some((system.space, system.layout))
                }
                None => None,
            };
            let problem = match prepare(&t, modulus, layout) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(EXIT_NEGATIVE);
                }
            };
            let search_mode = match mode {
                ModeArg::First => SearchMode::First,
                ModeArg::All => SearchMode::All,
            };
            let limits = SearchLimits {
                max_nodes: Some(node_limit),
                max_time: None,
            };
            let result = search(
                &problem,
                search_mode,
                SelectionRule::default(),
                limits,
                workers,
            );
            eprintln!(
                "search: {} nodes, {} ms, {} solution(s)",
                result.stats.nodes, result.stats.elapsed_ms, result.stats.solutions
            );
            match (&result.outcome, search_mode) {
                (SearchOutcome::Found(system), _) => {
                    match cli.format {
                        Format::Human => print!("{}", serialize_system(system)),
                        Format::Structured => {
                            let doc = serde_json::json!({
                                "outcome": "found",
                                "system": serialize_system(system),
                                "stats": result.stats,
                            });
                            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                        }
                    }
                    Ok(EXIT_OK)
                }
                (SearchOutcome::Exhausted, SearchMode::All) => {
                    match cli.format {
                        Format::Human => println!("solutions {}", result.stats.solutions),
                        Format::Structured => {
                            let doc = serde_json::json!({
                                "outcome": "exhausted",
                                "stats": result.stats,
                            });
                            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                        }
                    }
                    Ok(EXIT_OK)
                }
                (SearchOutcome::Exhausted, SearchMode::First) => {
                    eprintln!("no solution: the search space is exhausted");
                    if cli.format == Format::Structured {
                        let doc = serde_json::json!({
                            "outcome": "exhausted",
                            "stats": result.stats,
                        });
                        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                    }
                    Ok(EXIT_NEGATIVE)
                }
                (SearchOutcome::LimitReached, _) => {
                    eprintln!("limit reached before the search finished");
                    if cli.format == Format::Structured {
                        let doc = serde_json::json!({
                            "outcome": "limit-reached",
                            "stats": result.stats,
                        });
                        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                    }
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
    }
}

#[derive(serde::Serialize)]
struct ReplicationDoc {
    size: u32,
    blocks_per_point: u32,
}

#[derive(serde::Serialize)]
struct CountDoc {
    #[serde(rename = "type")]
    group_type: String,
    v: u32,
    blocks: u64,
    replication: Vec<ReplicationDoc>,
}

fn count_doc(t: &GroupType) -> Result<CountDoc, String> {
    let blocks = t.block_count().map_err(|e| e.to_string())?;
    let mut replication = Vec::new();
    for (size, _) in t.exponents() {
        let r = t.replication(size).map_err(|e| e.to_string())?;
        replication.push(ReplicationDoc {
            size,
            blocks_per_point: r,
        });
    }
    Ok(CountDoc {
        group_type: t.to_string(),
        v: t.point_count(),
        blocks,
        replication,
    })
}

fn run_catalog(action: CatalogAction, format: Format) -> Result<u8, String> {
    match action {
        CatalogAction::List => {
            match format {
                Format::Human => {
                    for e in catalog::entries() {
                        println!(
                            "{:<9} {:<13} modulus {}  base blocks {:>2}  {}",
                            e.name,
                            e.claimed_type,
                            e.modulus,
                            e.base_block_count,
                            status_name(e.status)
                        );
                    }
                }
                Format::Structured => {
                    let docs: Vec<_> = catalog::entries()
                        .iter()
                        .map(|e| {
                            serde_json::json!({
                                "name": e.name,
                                "type": e.claimed_type,
                                "modulus": e.modulus,
                                "base_blocks": e.base_block_count,
                                "status": status_name(e.status),
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&docs).unwrap());
                }
            }
            Ok(EXIT_OK)
        }
        CatalogAction::Show { name } => {
            let e = catalog::get(&name).map_err(|e| e.to_string())?;
            match format {
                Format::Human => {
                    println!("name: {}", e.name);
                    println!("type: {}", e.claimed_type);
                    println!("modulus: {}", e.modulus);
                    println!("base blocks: {}", e.base_block_count);
                    println!("status: {}", status_name(e.status));
                    println!("notes: {}", e.notes);
                }
                Format::Structured => {
                    let doc = serde_json::json!({
                        "name": e.name,
                        "type": e.claimed_type,
                        "modulus": e.modulus,
                        "base_blocks": e.base_block_count,
                        "status": status_name(e.status),
                        "notes": e.notes,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
            }
            Ok(EXIT_OK)
        }
        CatalogAction::Emit { name } => {
            let e = catalog::get(&name).map_err(|e| e.to_string())?;
            print!("{}", e.document);
            Ok(EXIT_OK)
        }
        CatalogAction::Verify { name } => {
            let e = catalog::get(&name).map_err(|e| e.to_string())?;
            match e.verify() {
                EntryVerification::Report(report) => {
                    render_verification(&report, format);
                    Ok(if report.is_valid() { EXIT_OK } else { EXIT_NEGATIVE })
                }
                EntryVerification::Transcription(issues) => {
                    match format {
                        Format::Human => {
                            println!(
                                "erratum: entry `{}` does not elaborate into a system ({} issues)",
                                e.name,
                                issues.len()
                            );
                            for issue in &issues {
                                println!("{issue}");
                            }
                        }
                        Format::Structured => {
                            let doc = serde_json::json!({
                                "status": "erratum",
                                "entry": e.name,
                                "issues": issues,
                            });
                            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                        }
                    }
                    Ok(EXIT_NEGATIVE)
                }
                EntryVerification::Develop(err) => {
                    println!("invalid: {err}");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
    }
}

fn status_name(status: EntryStatus) -> &'static str {
    match status {
        EntryStatus::Verified => "verified",
        EntryStatus::Erratum => "erratum",
    }
}

fn render_feasibility(report: &FeasibilityReport, format: Format) {
    match format {
        Format::Human => {
            println!(
                "type {}  (v = {}, groups = {})",
                report.group_type, report.v, report.groups
            );
            for c in &report.conditions {
                println!(
                    "{:?} {:<55} {}  ({})",
                    c.id,
                    c.description,
                    if c.pass { "pass" } else { "fail" },
                    c.witness
                );
            }
            if report.feasible {
                println!("feasible (necessary conditions hold; existence is not implied)");
            } else {
                println!("infeasible");
            }
        }
        Format::Structured => {
            println!("{}", serde_json::to_string_pretty(report).unwrap());
        }
    }
}

fn render_verification(report: &VerificationReport, format: Format) {
    match format {
        Format::Human => {
            if report.is_valid() {
                println!(
                    "valid 4-GDD of type {}, {} blocks",
                    report.induced_type, report.block_total
                );
            } else {
                let lines = report.diagnostic_lines();
                println!(
                    "invalid 4-GDD candidate of type {}, {} blocks, {} diagnostics",
                    report.induced_type,
                    report.block_total,
                    lines.len()
                );
                for line in lines {
                    println!("{line}");
                }
            }
            for line in report.warning_lines() {
                eprintln!("warning: {line}");
            }
            if report.is_valid() {
                let mut by_size: Vec<(u32, usize)> = Vec::new();
                for entry in &report.replication {
                    if !by_size.iter().any(|&(g, _)| g == entry.group_size) {
                        by_size.push((entry.group_size, entry.blocks));
                    }
                }
                by_size.sort_unstable();
                let parts: Vec<String> = by_size
                    .iter()
                    .map(|(g, r)| format!("size {g} -> {r}"))
                    .collect();
                println!("replication per point: {}", parts.join(", "));
            }
        }
        Format::Structured => {
            println!("{}", serde_json::to_string_pretty(report).unwrap());
        }
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|e| format!("cannot read standard input: {e}"))?;
        Ok(buffer)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))
    }
}
