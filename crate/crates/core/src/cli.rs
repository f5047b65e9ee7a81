//! Command-line surface. Exit codes: 0 positive verdict or ok, 1 definite negative, 2 bad input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bifurcation::enumerate_systems;
use crate::cli_io::{self, to_json, verdict_doc, ParseError, VerdictDoc};
use crate::series_model::{check_diagrammatic, SeriesPresentation};
use crate::smoothing::{
    analyze, build_witness_morphism, criterion_compact, criterion_harris_mumford, criterion_loops, level4_membership,
    level_filter, saturation_check, smoothable, verify_harmonic, Verdict,
};

#[derive(Parser, Debug)]
#[command(name = "smoothcx", version, about = "Exact smoothability decisions for rank-one limit linear series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate an instance document.
    Validate { file: PathBuf },
    /// Solve the characteristic equation and list exceptional points.
    Rho { file: PathBuf },
    /// Print the bifurcation tree.
    Biftree {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// List bifurcation partition systems passing a level (1 to 4).
    Systems {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        level: u8,
    },
    /// Decide smoothability.
    Smoothable {
        file: PathBuf,
        /// Include the harmonic morphism built from the witness.
        #[arg(long)]
        witness: bool,
    },
    /// Check a witness report against its instance.
    CheckWitness { file: PathBuf, report: PathBuf },
    /// Special-case criteria.
    Criteria {
        #[arg(value_enum)]
        which: Criterion,
        file: PathBuf,
    },
    /// Run every saturation candidate of a metrized-complex document.
    Saturations { file: PathBuf },
    /// Export an object as DOT.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        what: ExportWhat,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Compact,
    Loops,
    Hm,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportWhat {
    Gamma,
    Biftree,
    PartitionTree,
    Witness,
}

/// Result of one command: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn negative(stdout: String) -> Self {
        Outcome { code: 1, stdout, stderr: String::new() }
    }

    fn verdict(stdout: String, positive: bool) -> Self {
        if positive {
            Self::ok(stdout)
        } else {
            Self::negative(stdout)
        }
    }

    fn input(msg: impl std::fmt::Display) -> Self {
        Outcome { code: 2, stdout: String::new(), stderr: format!("{msg}\n") }
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome::input(format!("{}: {e}", path.display())))
}

fn diag(path: &Path, e: ParseError) -> Outcome {
    let lines: Vec<String> = e.0.iter().map(|d| format!("{}: {d}", path.display())).collect();
    Outcome::input(lines.join("\n"))
}

fn load(path: &Path) -> Result<SeriesPresentation, Outcome> {
    let text = read(path)?;
    let inst = cli_io::parse_document(&text).map_err(|e| diag(path, e))?;
    if inst.doc.metrized_complex.is_some() {
        return Err(Outcome::input(format!("{}: metrized-complex document, use `saturations`", path.display())));
    }
    inst.presentation(&text).map_err(|e| diag(path, e))
}

fn verdict_only(sp: &SeriesPresentation, v: &Verdict) -> Outcome {
    Outcome::negative(to_json(&verdict_doc(sp, v, None)))
}

/// Parses arguments and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli.command).unwrap_or_else(|o| o),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome, Outcome> {
    Ok(match cmd {
        Command::Validate { file } => validate(file)?,
        Command::Rho { file } => {
            let sp = load(file)?;
            let an = match analyze(&sp) {
                Ok(an) => an,
                Err(v) => return Ok(verdict_only(&sp, &v)),
            };
            let g = &sp.graph;
            let rho: BTreeMap<String, String> =
                (0..g.vertex_count()).map(|v| (g.vertex_name(v).to_string(), an.rho.at(v).to_string())).collect();
            let slopes: BTreeMap<String, i64> =
                g.edges().iter().enumerate().map(|(i, e)| (e.name.clone(), an.gd.slopes[i])).collect();
            let ex: Vec<&str> = an.ex.points().into_iter().map(|v| g.vertex_name(v)).collect();
            let vals: Vec<String> = an.ex.values.iter().map(|c| c.to_string()).collect();
            Outcome::ok(to_json(&json!({
                "rho": rho,
                "slopes": slopes,
                "exceptional": ex,
                "exceptional_values": vals,
            })))
        }
        Command::Biftree { file, format } => {
            let sp = load(file)?;
            let an = match analyze(&sp) {
                Ok(an) => an,
                Err(v) => return Ok(verdict_only(&sp, &v)),
            };
            match format {
                Format::Dot => Outcome::ok(cli_io::dot_biftree(&sp.graph, &an.bt)),
                Format::Json => {
                    let g = &sp.graph;
                    let nodes: Vec<Value> = an
                        .bt
                        .nodes
                        .iter()
                        .enumerate()
                        .map(|(x, n)| {
                            json!({
                                "label": cli_io::node_label(g, &an.bt, x),
                                "depth": n.value.to_string(),
                                "parent": n.parent.map(|p| cli_io::node_label(g, &an.bt, p)),
                            })
                        })
                        .collect();
                    let leaves: Vec<String> = an.bt.leaves().iter().map(|x| cli_io::node_label(g, &an.bt, *x)).collect();
                    let bif: Vec<String> =
                        an.bt.bifurcation_nodes().iter().map(|x| cli_io::node_label(g, &an.bt, *x)).collect();
                    Outcome::ok(to_json(&json!({
                        "root": cli_io::node_label(g, &an.bt, an.bt.root),
                        "nodes": nodes,
                        "leaves": leaves,
                        "bifurcation_nodes": bif,
                    })))
                }
            }
        }
        Command::Systems { file, level } => {
            let sp = load(file)?;
            let an = match analyze(&sp) {
                Ok(an) => an,
                Err(v) => return Ok(verdict_only(&sp, &v)),
            };
            let pass = |s: &_| match level {
                1 => true,
                2 | 3 => level_filter(s, *level, &sp, &an),
                _ => level4_membership(s, &sp, &an),
            };
            let systems: Vec<_> = enumerate_systems(&an.bt)
                .filter(|s| pass(s))
                .map(|s| cli_io::system_doc(&sp.graph, &an.bt, &s))
                .collect();
            let n = systems.len();
            Outcome::verdict(to_json(&json!({ "level": level, "count": n, "systems": systems })), n > 0)
        }
        Command::Smoothable { file, witness } => {
            let sp = load(file)?;
            let v = smoothable(&sp);
            let hm = match (&v, witness) {
                (Verdict::Smoothable(w), true) => {
                    let hm = build_witness_morphism(&sp, w).map_err(|e| Outcome::input(format!("witness: {e}")))?;
                    verify_harmonic(&hm, &sp).map_err(|e| Outcome::input(format!("witness failed to verify: {e}")))?;
                    Some(hm)
                }
                _ => None,
            };
            Outcome::verdict(to_json(&verdict_doc(&sp, &v, hm.as_ref())), v.is_smoothable())
        }
        Command::CheckWitness { file, report } => {
            let sp = load(file)?;
            let text = read(report)?;
            let doc: VerdictDoc =
                serde_json::from_str(&text).map_err(|e| Outcome::input(format!("{}: {e}", report.display())))?;
            let hm = cli_io::morphism_from_doc(&sp, &doc).map_err(|e| Outcome::input(format!("{}: {e}", report.display())))?;
            match verify_harmonic(&hm, &sp) {
                Ok(()) => Outcome::ok(to_json(&json!({ "verified": true, "degree": hm.degree() }))),
                Err(e) => Outcome::negative(to_json(&json!({ "verified": false, "violation": e.to_string() }))),
            }
        }
        Command::Criteria { which, file } => criteria(*which, file)?,
        Command::Saturations { file } => {
            let text = read(file)?;
            let inst = cli_io::parse_document(&text).map_err(|e| diag(file, e))?;
            let (mc, cands) = inst.metrized_complex(&text).map_err(|e| diag(file, e))?;
            let rep = saturation_check(&mc, &cands);
            let rows: Vec<Value> = rep
                .results
                .iter()
                .enumerate()
                .map(|(i, r)| match r {
                    Ok(v) => json!({ "candidate": i, "verdict": v.kind() }),
                    Err(e) => json!({ "candidate": i, "error": e.to_string() }),
                })
                .collect();
            Outcome::verdict(to_json(&json!({ "candidates": rows, "aggregate": rep.aggregate })), rep.aggregate)
        }
        Command::Export { file, what, format, out } => {
            if *format != Format::Dot {
                return Err(Outcome::input("export supports --format dot only"));
            }
            let sp = load(file)?;
            let text = match what {
                ExportWhat::Gamma => cli_io::dot_graph(&sp),
                ExportWhat::Biftree => match analyze(&sp) {
                    Ok(an) => cli_io::dot_biftree(&sp.graph, &an.bt),
                    Err(v) => return Ok(verdict_only(&sp, &v)),
                },
                ExportWhat::PartitionTree | ExportWhat::Witness => {
                    let v = smoothable(&sp);
                    let Verdict::Smoothable(w) = &v else { return Ok(verdict_only(&sp, &v)) };
                    if *what == ExportWhat::PartitionTree {
                        let an = analyze(&sp).expect("smoothable implies an analysis");
                        cli_io::dot_partition_tree(&sp.graph, &an.bt, &w.tree)
                    } else {
                        let hm = build_witness_morphism(&sp, w).map_err(|e| Outcome::input(format!("witness: {e}")))?;
                        cli_io::dot_witness(&sp, &hm)
                    }
                }
            };
            match out {
                Some(p) => {
                    std::fs::write(p, &text).map_err(|e| Outcome::input(format!("{}: {e}", p.display())))?;
                    Outcome::ok(String::new())
                }
                None => Outcome::ok(text),
            }
        }
    })
}

fn validate(file: &Path) -> Result<Outcome, Outcome> {
    let text = read(file)?;
    let inst = cli_io::parse_document(&text).map_err(|e| diag(file, e))?;
    let g = &inst.graph;
    if inst.doc.metrized_complex.is_some() {
        let (mc, cands) = inst.metrized_complex(&text).map_err(|e| diag(file, e))?;
        return Ok(Outcome::ok(to_json(&json!({
            "status": "ok",
            "kind": "metrized_complex",
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "curves": mc.curves.len(),
            "candidates": cands.len(),
        }))));
    }
    let sp = inst.presentation(&text).map_err(|e| diag(file, e))?;
    let rep = check_diagrammatic(&sp);
    Ok(Outcome::ok(to_json(&json!({
        "status": "ok",
        "kind": "series",
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "degree": sp.degree(),
        "genus": sp.total_genus(),
        "compatible": rep.compatible(),
        "refined": rep.refined(),
    }))))
}

fn criteria(which: Criterion, file: &Path) -> Result<Outcome, Outcome> {
    if which == Criterion::Hm {
        let text = read(file)?;
        let input = cli_io::parse_hm(&text).map_err(|e| diag(file, e))?;
        let (sp, v) = criterion_harris_mumford(&input).map_err(Outcome::input)?;
        let doc = verdict_doc(&sp, &v, None);
        return Ok(Outcome::verdict(
            to_json(&json!({ "criterion": "hm", "holds": v.is_smoothable(), "pipeline": doc })),
            v.is_smoothable(),
        ));
    }
    let sp = load(file)?;
    let (name, holds) = match which {
        Criterion::Compact => ("compact", criterion_compact(&sp)),
        _ => ("loops", criterion_loops(&sp)),
    };
    let holds = holds.map_err(Outcome::input)?;
    let pipeline = smoothable(&sp);
    Ok(Outcome::verdict(
        to_json(&json!({ "criterion": name, "holds": holds, "pipeline": pipeline.kind() })),
        holds,
    ))
}
