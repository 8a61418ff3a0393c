//! `binrank`: exact binarization toolkit front end.
//!
//! Exit codes: 0 on success, 1 on a computation-level error (with a JSON
//! error object on stderr), 2 on usage errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use binrank_core::bef::ExtendedFormulation;
use binrank_core::binarization::{BinKind, Binarization};
use binrank_core::io;
use binrank_core::num::Rational;
use binrank_core::rank;
use binrank_core::reproduce;

#[derive(Parser)]
#[command(
    name = "binrank",
    about = "Exact binarizations, binary extended formulations and lift-and-project ranks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Refuse vertex enumeration beyond this total dimension.
    #[arg(long, global = true, default_value_t = binrank_core::bef::DEFAULT_DIM_LIMIT)]
    limit_dim: usize,
    /// Seed for sampled verification runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct BinArgs {
    /// unary | full | log | trunc_log | hypercube | custom
    #[arg(long)]
    kind: String,
    #[arg(long)]
    d: Option<usize>,
    /// Range cutoff for trunc_log (vertices are 0..v-1).
    #[arg(long)]
    v: Option<u64>,
    /// Hypercube labelling, indexed by the bit string read as an integer.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<u64>>,
    /// Top of the x-range for custom bodies.
    #[arg(long)]
    k: Option<u64>,
    /// Polytope file (text or JSON) for custom bodies.
    #[arg(long)]
    body: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a binarization and print its body.
    Gen {
        #[command(flatten)]
        bin: BinArgs,
        /// Emit the vertex (v) or inequality (h) representation.
        #[arg(long, default_value = "v")]
        repr: String,
    },
    /// Classify a binarization (natural / integral / exact / perfect /
    /// affine / linear / hypercube).
    Classify {
        #[command(flatten)]
        bin: BinArgs,
    },
    /// Build the binary extended formulation of an instance file and print
    /// its shape.
    Bef {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Enumerate the vertices of the formulation polytope.
    Vertices {
        #[arg(long)]
        instance: PathBuf,
        /// Also print the projection onto the x-space.
        #[arg(long)]
        projection: bool,
    },
    /// Lift-and-project rank of the formulation with its covering
    /// certificate and incidence matrix.
    Lpr {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Rank of a binarization at the given thresholds, via all routes.
    Rank {
        #[command(flatten)]
        bin: BinArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<u64>,
    },
    /// Table of single-threshold ranks over the whole range.
    RankTable {
        #[command(flatten)]
        bin: BinArgs,
    },
    /// Sweep hypercube labellings checking rank minimality of the
    /// logarithmic one and the divisibility law.
    VerifyLogbest {
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<u64>,
        /// exhaustive | sample
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Sample count for sampled mode.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    /// Rebuild the pyramid example and compare every artifact against its
    /// expected value.
    ReproducePyramid {
        /// Apex height, a positive rational like 3 or 1/2.
        #[arg(long)]
        h: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(Outcome { report, failed }) => {
            let payload = match render(&cli, &report) {
                Ok(p) => p,
                Err(msg) => return usage_error(&msg),
            };
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, payload) {
                    return computation_error(&format!("cannot write {}: {e}", path.display()));
                }
            } else {
                print!("{payload}");
                let _ = std::io::stdout().flush();
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(RunError::Usage(msg)) => usage_error(&msg),
        Err(RunError::Computation(msg)) => computation_error(&msg),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn computation_error(msg: &str) -> ExitCode {
    eprintln!("{}", json!({"error": msg}));
    ExitCode::from(1)
}

enum RunError {
    Usage(String),
    Computation(String),
}

impl From<binrank_core::Error> for RunError {
    fn from(e: binrank_core::Error) -> Self {
        RunError::Computation(e.to_string())
    }
}

/// A report that renders to every supported format: a JSON value plus a
/// text form and an optional row layout for CSV.
struct Report {
    json: Value,
    text: String,
    csv: Option<String>,
}

struct Outcome {
    report: Report,
    failed: bool,
}

fn ok(report: Report) -> Result<Outcome, RunError> {
    Ok(Outcome {
        report,
        failed: false,
    })
}

fn render(cli: &Cli, report: &Report) -> Result<String, String> {
    match cli.format {
        Format::Text => Ok(report.text.clone()),
        Format::Json => {
            // serde_json maps are sorted, so this is canonical
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&report.json).unwrap()
            ))
        }
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| "--format csv is not available for this verb".to_string()),
    }
}

fn load_binarization(args: &BinArgs) -> Result<Binarization, RunError> {
    let body = match &args.body {
        None => None,
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| {
                RunError::Usage(format!("cannot read --body {}: {e}", path.display()))
            })?;
            let parsed = if raw.trim_start().starts_with('{') {
                let v: Value = serde_json::from_str(&raw)
                    .map_err(|e| RunError::Computation(format!("bad body JSON: {e}")))?;
                io::polytope_from_json(&v)?
            } else {
                io::polytope_from_text(&raw)?
            };
            Some(io::polytope_to_json(&parsed))
        }
    };
    let spec = io::BinSpec {
        kind: args.kind.clone(),
        d: args.d,
        v: args.v,
        sigma: args.sigma.clone(),
        k: args.k,
        body,
    };
    Ok(io::binarization_from_spec(&spec)?)
}

fn load_instance(path: &PathBuf) -> Result<ExtendedFormulation, RunError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| RunError::Usage(format!("cannot read --instance {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&raw)
        .map_err(|e| RunError::Computation(format!("bad instance JSON: {e}")))?;
    Ok(io::instance_from_json(&v)?)
}

fn run(cli: &Cli) -> Result<Outcome, RunError> {
    match &cli.command {
        Command::Gen { bin, repr } => {
            let b = load_binarization(bin)?;
            let poly = match repr.as_str() {
                "v" => io::Polytope::V(b.verts.clone()),
                "h" => io::Polytope::H(b.body.clone()),
                other => {
                    return Err(RunError::Usage(format!(
                        "--repr must be v or h, got {other:?}"
                    )))
                }
            };
            let csv = match &poly {
                io::Polytope::V(v) => Some(vertices_csv(&v.vertices)),
                io::Polytope::H(_) => None,
            };
            ok(Report {
                json: io::polytope_to_json(&poly),
                text: io::polytope_to_text(&poly),
                csv,
            })
        }
        Command::Classify { bin } => {
            let b = load_binarization(bin)?;
            let c = b.classify();
            let json = io::classification_to_json(c);
            let mut text = String::new();
            let _ = writeln!(text, "kind: {}", kind_name(&b.kind));
            let _ = writeln!(text, "d: {}", b.d);
            let _ = writeln!(text, "k: {}", b.k);
            for (name, flag) in [
                ("natural", c.natural),
                ("integral", c.integral),
                ("exact", c.exact),
                ("perfect", c.perfect),
                ("linear", c.linear),
                ("hypercube", c.hypercube),
                ("x_beyond_range", c.x_beyond_range),
            ] {
                let _ = writeln!(text, "{name}: {flag}");
            }
            match &c.affine {
                Some((a, beta)) => {
                    let coeffs: Vec<String> = a.iter().map(io::format_rational).collect();
                    let _ = writeln!(
                        text,
                        "affine: x = ({}) . y + {}",
                        coeffs.join(", "),
                        io::format_rational(beta)
                    );
                }
                None => {
                    let _ = writeln!(text, "affine: false");
                }
            }
            ok(Report {
                json,
                text,
                csv: None,
            })
        }
        Command::Bef { instance } => {
            let ef = load_instance(instance)?;
            let json = json!({
                "n": ef.n,
                "p": ef.p(),
                "dim": ef.q.dim,
                "ineqs": ef.q.ineqs.len(),
                "eqs": ef.q.eqs.len(),
                "columns": ef.index_map,
            });
            let mut text = String::new();
            let _ = writeln!(
                text,
                "n: {}   p: {}   total dim: {}",
                ef.n,
                ef.p(),
                ef.q.dim
            );
            let _ = writeln!(
                text,
                "rows: {} inequalities, {} equations",
                ef.q.ineqs.len(),
                ef.q.eqs.len()
            );
            let cols: Vec<String> = ef
                .index_map
                .iter()
                .map(|(name, col)| format!("{name}={col}"))
                .collect();
            let _ = writeln!(text, "columns: {}", cols.join(" "));
            ok(Report {
                json,
                text,
                csv: None,
            })
        }
        Command::Vertices {
            instance,
            projection,
        } => {
            let ef = load_instance(instance)?;
            let verts = ef.vertices_q(cli.limit_dim)?;
            let mut json = json!({
                "count": verts.vertices.len(),
                "vertices": io::points_to_json(&verts.vertices),
            });
            let mut text = io::polytope_to_text(&io::Polytope::V(verts.clone()));
            if *projection {
                let proj = ef.x_projection(cli.limit_dim)?;
                json["projection"] = io::points_to_json(&proj);
                let _ = writeln!(text, "projection onto x ({} points):", proj.len());
                for p in &proj {
                    let row: Vec<String> = p.iter().map(io::format_rational).collect();
                    let _ = writeln!(text, "{}", row.join(" "));
                }
            }
            ok(Report {
                json,
                text,
                csv: Some(vertices_csv(&verts.vertices)),
            })
        }
        Command::Lpr { instance } => {
            let ef = load_instance(instance)?;
            let lpr = ef.lpr(cli.limit_dim)?;
            let cover: Vec<String> = lpr.cover.iter().map(|&c| ef.column_name(c)).collect();
            let rows: Vec<Vec<u8>> = (0..lpr.instance.rows.len())
                .map(|r| {
                    lpr.instance
                        .row_as_bools(r)
                        .into_iter()
                        .map(u8::from)
                        .collect()
                })
                .collect();
            let json = json!({
                "value": lpr.value,
                "cover": cover,
                "a_matrix": rows,
            });
            let mut text = String::new();
            let _ = writeln!(text, "lpr = {}", lpr.value);
            let _ = writeln!(text, "cover: {}", cover.join(" "));
            let names: Vec<String> = ef
                .all_y_columns()
                .iter()
                .map(|&c| ef.column_name(c))
                .collect();
            let _ = writeln!(text, "A matrix over ({}):", names.join(" "));
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|b| b.to_string()).collect();
                let _ = writeln!(text, "{}", cells.join(" "));
            }
            ok(Report {
                json,
                text,
                csv: None,
            })
        }
        Command::Rank { bin, alphas } => {
            let b = load_binarization(bin)?;
            let report = rank_report(&b, alphas)?;
            ok(report)
        }
        Command::RankTable { bin } => {
            let b = load_binarization(bin)?;
            if b.k == 0 {
                return Err(RunError::Computation(
                    "rank table needs a range with at least one threshold".into(),
                ));
            }
            let mut rows = Vec::new();
            for alpha in 0..b.k {
                let skeleton = rank::rank_skeleton(&b, &[alpha])?;
                let formula = formula_rank(&b, &[alpha])?;
                if let Some(f) = formula {
                    if f != skeleton {
                        return Err(RunError::Computation(format!(
                            "formula/skeleton mismatch at alpha={alpha}: {f} vs {skeleton}"
                        )));
                    }
                }
                rows.push((alpha, skeleton));
            }
            let json = json!({
                "kind": kind_name(&b.kind),
                "d": b.d,
                "k": b.k,
                "table": rows
                    .iter()
                    .map(|(a, r)| json!({"alpha": a, "rank": r}))
                    .collect::<Vec<_>>(),
            });
            let mut text = String::new();
            let _ = writeln!(text, "alpha  rank");
            for (a, r) in &rows {
                let _ = writeln!(text, "{a:>5}  {r:>4}");
            }
            let mut csv = String::from("alpha,rank\n");
            for (a, r) in &rows {
                let _ = writeln!(csv, "{a},{r}");
            }
            ok(Report {
                json,
                text,
                csv: Some(csv),
            })
        }
        Command::VerifyLogbest { d, alphas, mode, n } => {
            let mode = match mode.as_str() {
                "exhaustive" => rank::SampleMode::Exhaustive,
                "sample" => rank::SampleMode::Sample {
                    n: *n,
                    seed: cli.seed,
                },
                other => {
                    return Err(RunError::Usage(format!(
                        "--mode must be exhaustive or sample, got {other:?}"
                    )))
                }
            };
            let rep = rank::verify_logbest(*d, alphas, mode)?;
            let histogram: Vec<Value> = rep
                .rank_histogram
                .iter()
                .map(|(r, c)| json!({"rank": r, "count": c}))
                .collect();
            let json = json!({
                "d": rep.d,
                "alphas": rep.alphas,
                "rank_log": rep.rank_log,
                "checked": rep.total_checked,
                "min_rank": rep.min_rank_seen,
                "log_attains_min": rep.log_attains_min,
                "histogram": histogram,
                "logbest_violations": rep.logbest_violations,
                "matchings_violations": rep.matchings_violations.len(),
            });
            let mut text = String::new();
            let _ = writeln!(
                text,
                "d = {}, alphas = {:?}, rank of the log labelling = {}",
                rep.d, rep.alphas, rep.rank_log
            );
            let _ = writeln!(
                text,
                "checked {} labellings; min rank seen = {}; log attains it: {}",
                rep.total_checked, rep.min_rank_seen, rep.log_attains_min
            );
            let _ = writeln!(text, "rank histogram:");
            for (r, c) in &rep.rank_histogram {
                let _ = writeln!(text, "  rank {r}: {c}");
            }
            let _ = writeln!(
                text,
                "violations: {} below log rank, {} divisibility",
                rep.logbest_violations.len(),
                rep.matchings_violations.len()
            );
            let failed = !rep.logbest_violations.is_empty() || !rep.matchings_violations.is_empty();
            Ok(Outcome {
                report: Report {
                    json,
                    text,
                    csv: None,
                },
                failed,
            })
        }
        Command::ReproducePyramid { h } => {
            let h: Rational = io::parse_rational(h)?;
            let rep = reproduce::reproduce_pyramid(&h, cli.limit_dim)?;
            let checks: Vec<Value> = rep
                .checks
                .iter()
                .map(|c| json!({"artifact": c.name, "passed": c.passed}))
                .collect();
            let json = json!({
                "h": io::rational_to_json(&rep.h),
                "v_p": io::points_to_json(&rep.v_p.vertices),
                "v_q": io::points_to_json(&rep.v_q.vertices),
                "projection": io::points_to_json(&rep.projection),
                "a_rows": rep.a_rows,
                "lpr": rep.lpr_value,
                "cover": rep.cover,
                "convexified_projection": io::points_to_json(&rep.convexified_projection),
                "checks": checks,
                "all_pass": rep.all_pass(),
            });
            let mut text = String::new();
            let _ = writeln!(
                text,
                "pyramid example with h = {}",
                io::format_rational(&rep.h)
            );
            let _ = writeln!(text, "V(P): {} points", rep.v_p.vertices.len());
            for p in &rep.v_p.vertices {
                let _ = writeln!(text, "  {}", point_line(p));
            }
            let _ = writeln!(text, "V(Q): {} points", rep.v_q.vertices.len());
            for p in &rep.v_q.vertices {
                let _ = writeln!(text, "  {}", point_line(p));
            }
            let _ = writeln!(text, "projection: {} points", rep.projection.len());
            for p in &rep.projection {
                let _ = writeln!(text, "  {}", point_line(p));
            }
            let _ = writeln!(
                text,
                "A matrix rows over (y1_1 y1_2 y2_1 y2_2): {} rows",
                rep.a_rows.len()
            );
            for mask in &rep.a_rows {
                let cells: Vec<String> = (0..4).map(|j| ((mask >> j) & 1).to_string()).collect();
                let _ = writeln!(text, "  {}", cells.join(" "));
            }
            let _ = writeln!(
                text,
                "lpr = {}  cover: {}",
                rep.lpr_value,
                rep.cover.join(" ")
            );
            let _ = writeln!(
                text,
                "convexified projection: {} points",
                rep.convexified_projection.len()
            );
            for p in &rep.convexified_projection {
                let _ = writeln!(text, "  {}", point_line(p));
            }
            for c in &rep.checks {
                let _ = writeln!(
                    text,
                    "{}: {}",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" }
                );
            }
            let failed = !rep.all_pass();
            Ok(Outcome {
                report: Report {
                    json,
                    text,
                    csv: None,
                },
                failed,
            })
        }
    }
}

fn point_line(p: &[Rational]) -> String {
    let cells: Vec<String> = p.iter().map(io::format_rational).collect();
    cells.join(" ")
}

fn vertices_csv(points: &[binrank_core::QVector]) -> String {
    let mut out = String::new();
    for p in points {
        let _ = writeln!(out, "{}", {
            let cells: Vec<String> = p.iter().map(io::format_rational).collect();
            cells.join(",")
        });
    }
    out
}

fn kind_name(kind: &BinKind) -> &'static str {
    match kind {
        BinKind::Unary => "unary",
        BinKind::Full => "full",
        BinKind::Log => "log",
        BinKind::TruncLog { .. } => "trunc_log",
        BinKind::Hypercube(_) => "hypercube",
        BinKind::Custom => "custom",
    }
}

fn formula_rank(b: &Binarization, alphas: &[u64]) -> Result<Option<usize>, RunError> {
    Ok(match &b.kind {
        BinKind::Unary => Some(rank::rank_unary_formula(b.d, alphas)?),
        BinKind::Full => Some(rank::rank_full_formula(b.d, alphas)?),
        BinKind::Log => Some(rank::rank_log_formula(b.d, alphas)?),
        BinKind::TruncLog { v } => {
            if alphas.len() == 1 {
                Some(rank::rank_trunc(*v, b.d, alphas[0])?)
            } else {
                None
            }
        }
        BinKind::Hypercube(perm) => Some(rank::hypercube_rank(perm, alphas)?),
        BinKind::Custom => None,
    })
}

fn rank_report(b: &Binarization, alphas: &[u64]) -> Result<Report, RunError> {
    let skeleton = rank::rank_skeleton(b, alphas)?;
    let direct = rank::rank_direct(b, alphas)?;
    let formula = formula_rank(b, alphas)?;
    let agree = skeleton == direct && formula.is_none_or(|f| f == skeleton);
    let mut json = json!({
        "skeleton": skeleton,
        "direct": direct,
        "formula": formula,
        "agree": agree,
    });
    let mut text = format!(
        "skeleton={skeleton} direct={direct} formula={} agree={agree}\n",
        formula.map_or_else(|| "-".to_string(), |f| f.to_string())
    );
    if let BinKind::TruncLog { v } = &b.kind {
        if alphas.len() == 1 {
            let closed = rank::rank_trunc_closed_form(*v, b.d, alphas[0])?;
            let closed_agrees = Some(closed) == formula;
            json["closed_form"] = json!(closed);
            json["closed_form_agrees"] = json!(closed_agrees);
            let _ = writeln!(
                text,
                "closed_form={closed} closed_form_agrees={closed_agrees}"
            );
        }
    }
    Ok(Report {
        json,
        text,
        csv: None,
    })
}
