//! The `tenfac` command line.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bounds::certified_lower_bound;
use crate::canonical::{canonical_form, canonical_form_up_to_colors};
use crate::graph::ColoredGraph;
use crate::io::{embedded_fixtures, parse_bundle, parse_graph_auto, sha256_hex, write_atomic, Convention, FIXTURE_BUNDLE, FIXTURE_SHA256};
use crate::moments::{mc_estimate, moment_polynomial};
use crate::search::{max_faces_with, SearchOptions};
use crate::survey::{count_colored_graphs_with_cap, run_survey, verify_fixture_set, MaxEngine, MaxPolicy, SurveyConfig, SurveyMode, DEFAULT_COUNT_CAP, DEFAULT_SURVEY_CAP, WORKERS_ENV};

/// Version of every JSON document printed with `--json`.
pub const OUTPUT_FORMAT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "tenfac", version, about = "Face maximization and surveys for 3-edge-colored cubic graphs")]
struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate graphs with fixed colors 1 and 2 and maximize F per class.
    Survey(SurveyArgs),
    /// Check the bundled (or a given) violator list.
    VerifyFixtures {
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Accept a fixture file whose hash differs from the bundled one.
        #[arg(long)]
        allow_unpinned: bool,
    },
    /// Exact max over all matchings of F(M, G).
    MaxFaces {
        #[arg(long)]
        graph: PathBuf,
        /// Visit every matching.
        #[arg(long, conflicts_with = "pruned")]
        exact: bool,
        /// Branch and bound (default).
        #[arg(long)]
        pruned: bool,
    },
    /// Lower-bound certificate.
    Bound {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Exact Gaussian moment, optionally evaluated or sampled.
    Moment(MomentArgs),
    /// Canonical code.
    Canon {
        #[arg(long)]
        graph: PathBuf,
        /// Also print the code up to color permutations.
        #[arg(long)]
        up_to_colors: bool,
    },
    /// Count connected classes under color-preserving isomorphism.
    CountClasses {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_COUNT_CAP)]
        cap: usize,
    },
}

#[derive(Args, Debug)]
struct SurveyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = SurveyMode::SingleFacePair)]
    mode: SurveyMode,
    #[arg(long, value_enum, default_value_t = MaxPolicy::Exact)]
    policy: MaxPolicy,
    #[arg(long, value_enum, default_value_t = MaxEngine::Search)]
    engine: MaxEngine,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write the full report (every class) here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SURVEY_CAP)]
    cap: usize,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 2)]
    nu: u32,
    /// Evaluate at this N.
    #[arg(long)]
    eval: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long, requires = "size")]
    mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tensor dimension for --mc.
    #[arg(long = "N", id = "size")]
    size: Option<usize>,
    /// Enumerate beyond the default size guard.
    #[arg(long)]
    force: bool,
}

struct Failure(i32, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn read_graph(path: &Path) -> Result<ColoredGraph, Failure> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| usage(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("--graph {}: {e}", path.display())))?
    };
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| usage(format!("--graph {}: no graph record", path.display())))?;
    parse_graph_auto(line).map_err(|e| usage(format!("--graph {}: {e}", path.display())))
}

fn envelope(command: &str, body: Value) -> Value {
    let mut doc = json!({ "format_version": OUTPUT_FORMAT_VERSION, "command": command });
    if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
        d.extend(b);
    }
    doc
}

/// Runs the CLI with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn emit(out: &mut dyn Write, json: bool, doc: Value, text: String) -> Result<(), Failure> {
    let r = if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))
    } else {
        writeln!(out, "{text}")
    };
    r.map_err(|e| Failure(2, format!("write: {e}")))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Survey(a) => survey(a, cli.json, out),
        Command::VerifyFixtures { fixtures, allow_unpinned } => verify(fixtures.as_deref(), *allow_unpinned, cli.json, out),
        Command::MaxFaces { graph, exact, .. } => {
            let g = read_graph(graph)?;
            let opts = if *exact { SearchOptions::exhaustive() } else { SearchOptions::default() };
            let r = max_faces_with(&g, &opts).into_result();
            let doc = envelope(
                "max-faces",
                json!({
                    "n": g.n(),
                    "max_f": r.max_f,
                    "threshold_times_two": 3 * g.n(),
                    "violates": 2 * r.max_f <= 3 * g.n(),
                    "witness": r.witness,
                    "witness_index": r.witness_index,
                    "maximizer_count": r.maximizer_count,
                    "matchings_examined": r.matchings_examined,
                    "pruned": r.pruned,
                    "search": if *exact { "exact" } else { "pruned" },
                }),
            );
            emit(out, cli.json, doc, r.max_f.to_string())?;
            Ok(0)
        }
        Command::Bound { graph } => {
            let g = read_graph(graph)?;
            match certified_lower_bound(&g) {
                Ok(c) => {
                    let text = format!("{} ({:?}, parallel to color {})", c.bound, c.rule, c.color);
                    let doc = envelope("bound", json!({ "n": g.n(), "certificate": c, "exceeds_threshold": c.exceeds_threshold() }));
                    emit(out, cli.json, doc, text)?;
                    Ok(0)
                }
                Err(e) => Err(Failure(1, e.to_string())),
            }
        }
        Command::Moment(a) => moment(a, cli.json, out),
        Command::Canon { graph, up_to_colors } => {
            let g = read_graph(graph)?;
            let code = canonical_form(&g);
            let orbit = up_to_colors.then(|| canonical_form_up_to_colors(&g));
            let mut text = code.to_hex();
            if let Some(o) = &orbit {
                text.push_str(&format!("\n{o}"));
            }
            let doc = envelope("canon", json!({ "n": g.n(), "code": code, "color_orbit_code": orbit }));
            emit(out, cli.json, doc, text)?;
            Ok(0)
        }
        Command::CountClasses { n, cap } => {
            let count = count_colored_graphs_with_cap(*n, *cap).map_err(|e| usage(e.to_string()))?;
            emit(out, cli.json, envelope("count-classes", json!({ "n": n, "classes": count })), count.to_string())?;
            Ok(0)
        }
    }
}

fn survey(a: &SurveyArgs, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut cfg = SurveyConfig::new(a.n, a.mode);
    cfg.max_policy = a.policy;
    cfg.engine = a.engine;
    cfg.workers = a.workers;
    cfg.checkpoint = a.checkpoint.clone();
    cfg.cap = a.cap;
    let report = run_survey(&cfg).map_err(|e| usage(e.to_string()))?;
    if let Some(path) = &a.out {
        let bytes = serde_json::to_vec_pretty(&report).expect("json");
        write_atomic(path, &bytes).map_err(|e| usage(format!("--out {}: {e}", path.display())))?;
    }
    let s = &report.summary;
    let hist = |h: &std::collections::BTreeMap<usize, u64>| h.iter().map(|(f, c)| format!("{f}:{c}")).collect::<Vec<_>>().join(" ");
    let text = format!(
        "n={} mode={:?} candidates={} classes={}\nMST classes: {}\nmax_f (MST): {}\nviolators: {}",
        a.n,
        a.mode,
        s.candidates,
        s.classes,
        s.mst_classes,
        hist(&s.mst_max_f_histogram),
        s.violators.len()
    );
    let doc = envelope(
        "survey",
        json!({ "report_format_version": report.format_version, "config": report.config, "summary": s, "provenance": report.provenance }),
    );
    emit(out, json, doc, text)?;
    let healthy = s.theorem_failures.is_empty() && s.inconsistent.is_empty() && s.violators_all_mst;
    Ok(if healthy { 0 } else { 1 })
}

fn verify(path: Option<&Path>, allow_unpinned: bool, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let (text, source) = match path {
        Some(p) => (std::fs::read_to_string(p).map_err(|e| usage(format!("--fixtures {}: {e}", p.display())))?, p.display().to_string()),
        None => (FIXTURE_BUNDLE.to_string(), "embedded".to_string()),
    };
    let digest = sha256_hex(&text);
    let pinned = digest == FIXTURE_SHA256;
    if !pinned && !allow_unpinned {
        let doc = envelope("verify-fixtures", json!({ "source": source, "sha256": digest, "pinned": false, "all_pass": false }));
        emit(out, json, doc, format!("fixture hash {digest} does not match the pinned {FIXTURE_SHA256}"))?;
        return Ok(1);
    }
    let graphs = if path.is_none() {
        embedded_fixtures()
    } else {
        parse_bundle(&text, Convention::Table3).map_err(|e| usage(format!("--fixtures: {e}")))?
    };
    let report = verify_fixture_set(&graphs);
    let mut text = report.summary_line();
    for c in report.claims.iter().filter(|c| !c.pass) {
        text.push_str(&format!("\nFAIL {}: rows {:?}", c.name, c.failing_rows));
    }
    let doc = envelope(
        "verify-fixtures",
        json!({ "source": source, "sha256": digest, "pinned": pinned, "all_pass": report.all_pass, "summary": report.summary_line(), "claims": report.claims, "rows": report.rows }),
    );
    emit(out, json, doc, text)?;
    Ok(if report.all_pass { 0 } else { 1 })
}

fn moment(a: &MomentArgs, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = read_graph(&a.graph)?;
    let poly = moment_polynomial(&g, a.nu, a.force).map_err(|e| usage(e.to_string()))?;
    let terms: Vec<String> = poly.terms.iter().rev().map(|(e, c)| format!("{c}*N^{e}")).collect();
    let mut text = format!("<Tr_G> = {}", terms.join(" + "));
    let evaluation = a.eval.map(|size| {
        let v = poly.evaluate(size);
        text.push_str(&format!("\nN={size}: {v}"));
        json!({ "N": size, "value": v, "wick_sum": poly.wick_sum(size).to_string() })
    });
    let mc = match (a.mc, a.size) {
        (Some(samples), Some(size)) => {
            let est = mc_estimate(&g, size, a.nu, samples, a.seed).map_err(|e| usage(e.to_string()))?;
            let exact = poly.evaluate(size as u64);
            text.push_str(&format!("\nMC N={size}: {} ± {} (exact {exact})", est.mean, est.std_error));
            Some(json!({ "N": size, "estimate": est, "exact": exact }))
        }
        _ => None,
    };
    let doc = envelope(
        "moment",
        json!({
            "n": g.n(),
            "nu": a.nu,
            "code": canonical_form(&g),
            "terms": poly.terms.iter().map(|(e, c)| (e.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
            "evaluation": evaluation,
            "mc": mc,
        }),
    );
    emit(out, json, doc, text)?;
    Ok(0)
}
