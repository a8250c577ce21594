//! The `cpk` commands. [`run`] takes the argument list and returns what
//! the binary prints together with its exit code, so the whole CLI is
//! testable in-process.

mod document;
mod fixtures;
mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactseq::{default_bound, SolveOptions, SolveStatus};
use crate::fock::{build_fock, check_all, DefectReport, FockModel, DEFAULT_TOLERANCE};
use crate::ktheory::{
    coefficient_ktheory, cuntz_pimsner_ktheory, diagram_report, iterated_report, pimsner_class_maps,
    KPair,
};
use crate::model::{pullback_graph, validate_graph, BimoduleModel, FiniteGraph, Layer, UNITARY_TOL};

pub use document::{ActionDoc, SpecDocument};
pub use fixtures::{fixture, fixtures, Fixture};
pub use report::{digest, exit_code, CommandEcho, Report, TOOL_VERSION};

#[derive(Parser, Debug)]
#[command(name = "cpk", version, about = "K-theory of Cuntz-Pimsner algebras of finite bimodules")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Iterated,
    Diagram,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a document; exit 0 iff it is valid.
    Validate {
        /// Path or builtin:<id>.
        input: String,
        /// Skip the no-sink/no-source check.
        #[arg(long)]
        lax: bool,
    },
    /// K-groups of the Cuntz-Pimsner algebras described by a document.
    Ktheory {
        input: String,
        #[arg(long, value_enum, default_value_t = Route::Both)]
        route: Route,
        /// Resolve ambiguous extensions by the split one (watermarked).
        #[arg(long)]
        assume_split: bool,
        /// Cap on enumerated extension classes (default: CPK_EXT_BOUND or 4096).
        #[arg(long)]
        ext_bound: Option<u64>,
    },
    /// Relation defects of the creation operators on the truncated Fock space.
    FockCheck {
        input: String,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Pull a graph back along a vertex cover.
    Pullback {
        graph: String,
        cover: String,
        /// Write the pulled-back graph document here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// List the bundled fixtures.
    Examples {
        /// Print one fixture document.
        #[arg(long)]
        show: Option<String>,
        /// Write every fixture to DIR/<id>.json.
        #[arg(long, value_name = "DIR")]
        write: Option<PathBuf>,
    },
}

/// What the binary prints and its exit code.
#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Input {
    doc: SpecDocument,
    bytes: Vec<u8>,
}

fn read_input(src: &str) -> Result<Input> {
    if let Some(id) = src.strip_prefix("builtin:") {
        let f = fixture(id).ok_or_else(|| Error::Malformed(format!("no bundled fixture {id:?}")))?;
        let doc = f.document();
        return Ok(Input {
            bytes: doc.to_json().into_bytes(),
            doc,
        });
    }
    let bytes = std::fs::read(src).map_err(|e| Error::Malformed(format!("cannot read {src}: {e}")))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Malformed(format!("{src} is not UTF-8: {e}")))?;
    Ok(Input {
        doc: SpecDocument::parse(text)?,
        bytes,
    })
}

/// Results, watermarks and exit code of a successful command.
struct Done {
    results: Value,
    watermarks: Vec<String>,
    code: i32,
}

fn ok(results: Value) -> Done {
    Done {
        results,
        watermarks: Vec::new(),
        code: 0,
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn push_unique(into: &mut Vec<String>, from: &[String]) {
    for w in from {
        if !into.contains(w) {
            into.push(w.clone());
        }
    }
}

fn validate(doc: &SpecDocument, lax: bool) -> Result<Done> {
    let strict = !lax;
    let report = match doc {
        SpecDocument::UnitaryChi(u) => {
            let d = u.unitarity_defect();
            let violations = if d > UNITARY_TOL {
                vec![crate::model::Violation::new(
                    "not_unitary",
                    "matrix",
                    format!("max |U*U - 1| entry is {d:e}"),
                )]
            } else {
                Vec::new()
            };
            crate::model::ValidationReport::from_violations(violations)
        }
        SpecDocument::Cover { cover } => {
            let mut seen = std::collections::BTreeSet::new();
            for (x, _) in cover {
                if !seen.insert(x) {
                    return Err(Error::Malformed(format!("cover vertex {x:?} listed twice")));
                }
            }
            crate::model::ValidationReport::from_violations(Vec::new())
        }
        _ => match doc.model()? {
            BimoduleModel::Graph(g) => validate_graph(&g, strict)?,
            BimoduleModel::TwoGraph(s) => s.validate(strict)?,
            BimoduleModel::Abstract(d) => d.validate()?,
        },
    };
    let code = if report.valid { 0 } else { 1 };
    Ok(Done {
        results: json!({
            "kind": doc.kind(),
            "strict": strict,
            "valid": report.valid,
            "violations": to_value(&report.violations),
        }),
        watermarks: Vec::new(),
        code,
    })
}

fn pair_entry(algebra: &str, k: &KPair) -> Value {
    json!({ "algebra": algebra, "summary": k.to_string(), "k": to_value(k) })
}

fn ktheory(doc: &SpecDocument, route: Route, opts: SolveOptions) -> Result<Done> {
    let model = doc.model()?;
    let coefficient = coefficient_ktheory(&model);
    let two_layer = match &model {
        BimoduleModel::Graph(_) => false,
        BimoduleModel::TwoGraph(_) => true,
        BimoduleModel::Abstract(d) => d.action2.is_some(),
    };
    if !two_layer {
        let p = pimsner_class_maps(&model, Layer::First)?;
        let k = cuntz_pimsner_ktheory(&p, opts)?;
        return Ok(Done {
            results: json!({
                "kind": doc.kind(),
                "mode": "single",
                "coefficient": pair_entry("A", &coefficient),
                "toeplitz": pair_entry("T_E", &coefficient),
                "final": pair_entry("O_E", &k),
            }),
            watermarks: k.watermarks.clone(),
            code: 0,
        });
    }

    let iter = iterated_report(&model, opts)?;
    let mut watermarks = iter.watermarks.clone();
    let mut results = json!({
        "kind": doc.kind(),
        "mode": "iterated",
        "route": format!("{route:?}").to_lowercase(),
        "coefficient": pair_entry("A", &coefficient),
        // Toeplitz algebras are KK-equivalent to their coefficients
        "toeplitz": [
            pair_entry("T_{E1}", &coefficient),
            pair_entry("T_{E2}", &coefficient),
            pair_entry("T_{E2 ⊗ O_{E1}}", &iter.first_stage),
        ],
        "stage1": [
            pair_entry("O_{E1}", &iter.first_stage),
            pair_entry("O_{E2}", &iter.second_stage),
        ],
        "final": pair_entry("O_{E2 ⊗ O_{E1}}", &iter.result),
    });
    if route != Route::Diagram {
        results["iterated"] = to_value(&iter);
    }
    let mut code = 0;
    if route != Route::Iterated {
        match &model {
            BimoduleModel::TwoGraph(spec) => {
                let d = diagram_report(spec, opts)?;
                push_unique(&mut watermarks, &d.watermarks);
                let failed = !d.consistent || d.sequences.iter().any(|s| s.exact == Some(false));
                results["sum_ideal"] = pair_entry("I+J", &d.sum_ideal);
                results["diagram"] = to_value(&d);
                results["diagram_exact"] = json!(d.all_exact());
                if failed {
                    results["error"] = json!({
                        "kind": "inconsistent",
                        "message": format!("diagram check failed: {}", d.issues.join("; ")),
                    });
                    code = 3;
                }
            }
            _ if route == Route::Diagram => {
                return Err(Error::Precondition(
                    "the diagram route needs a two-graph or permutation document".into(),
                ))
            }
            _ => results["diagram_note"] = json!("abstract K-data has no ideal diagram; iterated route only"),
        }
    }
    Ok(Done {
        results,
        watermarks,
        code,
    })
}

fn fock_model(doc: &SpecDocument) -> Result<(FockModel, Option<DefectReport>)> {
    if let SpecDocument::UnitaryChi(u) = doc {
        let d = u.unitarity_defect();
        let unitarity = DefectReport {
            relation: "chi_unitarity".into(),
            defect: d,
            tol: UNITARY_TOL,
            pass: d <= UNITARY_TOL,
            detail: None,
        };
        return Ok((FockModel::from_unitary(u)?, Some(unitarity)));
    }
    let m = match doc.model()? {
        BimoduleModel::Graph(g) => FockModel::from_graph(&g)?,
        BimoduleModel::TwoGraph(s) => FockModel::from_two_graph(&s)?,
        BimoduleModel::Abstract(_) => {
            return Err(Error::Precondition(
                "abstract K-data has no Fock space; use a graph, two-graph or unitary chi".into(),
            ))
        }
    };
    Ok((m, None))
}

fn fock_check(doc: &SpecDocument, degree: usize, tol: f64) -> Result<Done> {
    let (model, unitarity) = fock_model(doc)?;
    let rep = build_fock(&model, degree)?;
    let mut defects: Vec<DefectReport> = unitarity.into_iter().collect();
    defects.extend(check_all(&rep, tol));
    let pass = defects.iter().all(|d| d.pass);
    Ok(Done {
        results: json!({
            "kind": doc.kind(),
            "degree": degree,
            "basis_size": rep.dim(),
            "tol": tol,
            "pass": pass,
            "defects": to_value(&defects),
        }),
        watermarks: Vec::new(),
        code: if pass { 0 } else { 1 },
    })
}

fn pullback(graph: &SpecDocument, cover: &SpecDocument, out: Option<&Path>) -> Result<Done> {
    let g = match graph.model()? {
        BimoduleModel::Graph(g) => g,
        _ => return Err(Error::Precondition(format!("pullback needs a graph, got {}", graph.kind()))),
    };
    let SpecDocument::Cover { cover } = cover else {
        return Err(Error::Precondition(format!("expected a cover document, got {}", cover.kind())));
    };
    let p: FiniteGraph = pullback_graph(&g, cover)?;
    let doc = SpecDocument::from_graph(&p);
    if let Some(path) = out {
        std::fs::write(path, doc.to_json())
            .map_err(|e| Error::Resource(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(ok(json!({
        "vertices": p.vertex_count(),
        "edges": p.edge_count(),
        "written_to": out.map(|p| p.display().to_string()),
        "graph": to_value(&doc),
    })))
}

fn examples(show: Option<&str>, write: Option<&Path>) -> Result<Done> {
    if let Some(id) = show {
        let f = fixture(id).ok_or_else(|| Error::Malformed(format!("no bundled fixture {id:?}")))?;
        return Ok(ok(json!({ "id": f.id, "description": f.description, "document": to_value(&f.document()) })));
    }
    if let Some(dir) = write {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Resource(format!("cannot create {}: {e}", dir.display())))?;
        for f in fixtures() {
            let path = dir.join(format!("{}.json", f.id));
            std::fs::write(&path, f.document().to_json())
                .map_err(|e| Error::Resource(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    let list: Vec<Value> = fixtures()
        .iter()
        .map(|f| json!({ "id": f.id, "kind": f.document().kind(), "description": f.description }))
        .collect();
    Ok(ok(json!({ "fixtures": list })))
}

fn dispatch(cmd: &Command) -> (Option<String>, Result<Done>) {
    let with_input = |src: &str, f: &dyn Fn(&SpecDocument) -> Result<Done>| match read_input(src) {
        Ok(inp) => (Some(digest(&[&inp.bytes])), f(&inp.doc)),
        Err(e) => (None, Err(e)),
    };
    match cmd {
        Command::Validate { input, lax } => with_input(input, &|d| validate(d, *lax)),
        Command::Ktheory {
            input,
            route,
            assume_split,
            ext_bound,
        } => {
            let opts = SolveOptions {
                assume_split: *assume_split,
                bound: ext_bound.unwrap_or_else(default_bound),
            };
            with_input(input, &|d| ktheory(d, *route, opts))
        }
        Command::FockCheck { input, degree, tol } => with_input(input, &|d| fock_check(d, *degree, *tol)),
        Command::Pullback { graph, cover, out } => match (read_input(graph), read_input(cover)) {
            (Ok(g), Ok(c)) => (
                Some(digest(&[&g.bytes, &c.bytes])),
                pullback(&g.doc, &c.doc, out.as_deref()),
            ),
            (Err(e), _) | (_, Err(e)) => (None, Err(e)),
        },
        Command::Examples { show, write } => (None, examples(show.as_deref(), write.as_deref())),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate { .. } => "validate",
        Command::Ktheory { .. } => "ktheory",
        Command::FockCheck { .. } => "fock-check",
        Command::Pullback { .. } => "pullback",
        Command::Examples { .. } => "examples",
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { stdout: text, stderr: String::new(), code }
            } else {
                Output { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let (input_digest, outcome) = dispatch(&cli.command);
    let (results, watermarks, code, stderr) = match outcome {
        Ok(d) => (d.results, d.watermarks, d.code, String::new()),
        Err(e) => {
            let code = exit_code(&e);
            let results = json!({ "error": { "kind": report::error_kind(&e), "message": e.to_string() } });
            (results, Vec::new(), code, format!("cpk: {e}\n"))
        }
    };
    let report = Report {
        tool_version: TOOL_VERSION.into(),
        command: CommandEcho {
            name: command_name(&cli.command).into(),
            args: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        },
        input_digest,
        exit_code: code,
        results,
        watermarks,
    };
    let stdout = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    Output { stdout, stderr, code }
}

/// Status of the final K-pair inside a ktheory report.
pub fn final_status(report: &Report) -> Option<SolveStatus> {
    let k: KPair = serde_json::from_value(report.results["final"]["k"].clone()).ok()?;
    Some(k.status())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cpk(args: &[&str]) -> (Report, i32) {
        let mut all = vec!["cpk"];
        all.extend_from_slice(args);
        let out = run(all);
        let report: Report = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
        assert_eq!(report.exit_code, out.code);
        (report, out.code)
    }

    #[test]
    fn validate_exit_codes() {
        assert_eq!(cpk(&["validate", "builtin:ex3.5-flip-2-2"]).1, 0);
        let dir = tempfile::tempdir().unwrap();
        let sink = dir.path().join("sink.json");
        std::fs::write(
            &sink,
            r#"{"kind":"graph","vertices":["a","b"],"edges":[{"id":"e","src":"a","rng":"b"}]}"#,
        )
        .unwrap();
        let (r, code) = cpk(&["validate", sink.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(r.to_json().contains("\"b\""));
        assert_eq!(cpk(&["validate", "--lax", sink.to_str().unwrap()]).1, 0);
        let truncated = dir.path().join("t.json");
        std::fs::write(&truncated, r#"{"kind":"graph","vertices":["a"#).unwrap();
        assert_eq!(cpk(&["validate", truncated.to_str().unwrap()]).1, 2);
        assert_eq!(cpk(&["validate", "builtin:ex3.5-unitary-corrupted"]).1, 1);
    }

    #[test]
    fn ktheory_flip_and_abstract() {
        let (r, code) = cpk(&["ktheory", "builtin:ex4.6-flip-3-3"]);
        assert_eq!(code, 0);
        assert_eq!(r.results["final"]["summary"], "(Z_2, Z_2)");
        assert_eq!(r.results["diagram_exact"], true);
        let (r, _) = cpk(&["ktheory", "builtin:ex4.7-abstract-p2"]);
        assert_eq!(r.results["final"]["summary"], "(Z, Z)");
        let (r, code) = cpk(&["ktheory", "--route", "diagram", "builtin:ex4.7-abstract-coprime-2-3"]);
        assert_eq!(code, 1, "{r:?}");
        assert_eq!(cpk(&["ktheory", "builtin:ex3.5-unitary-chi"]).1, 1);
    }

    #[test]
    fn ambiguity_and_assume_split() {
        let (r, code) = cpk(&["ktheory", "builtin:ext-ambiguous-z2-z2"]);
        assert_eq!(code, 0);
        assert_eq!(r.results["final"]["k"]["k0"]["status"], "ambiguous_extension");
        assert_eq!(final_status(&r), Some(SolveStatus::AmbiguousExtension));
        assert!(r.watermarks.is_empty());
        let (r, code) = cpk(&["ktheory", "--assume-split", "builtin:ext-ambiguous-z2-z2"]);
        assert_eq!(code, 0);
        assert_eq!(r.results["final"]["summary"], "(Z_2 ⊕ Z_2, Z_2)");
        assert!(r.watermarks.iter().any(|w| w.contains("assumed split")));
    }

    #[test]
    fn fock_check_codes() {
        let (r, code) = cpk(&["fock-check", "builtin:ex3.5-flip-2-2", "--degree", "3"]);
        assert_eq!(code, 0);
        assert_eq!(r.results["pass"], true);
        assert_eq!(cpk(&["fock-check", "builtin:ex3.5-unitary-chi"]).1, 0);
        assert_eq!(cpk(&["fock-check", "builtin:ex3.5-unitary-corrupted"]).1, 1);
        assert_eq!(cpk(&["fock-check", "builtin:ex1.2.4-rose-3", "--degree", "30"]).1, 4);
    }

    #[test]
    fn pullback_writes_a_graph() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("p.json");
        let (r, code) = cpk(&[
            "pullback",
            "builtin:ex2.2-two-cycle",
            "builtin:ex2.2-double-cover",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(r.results["edges"], 8);
        let written = SpecDocument::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(written.kind(), "graph");
        assert_eq!(cpk(&["validate", out.to_str().unwrap()]).1, 0);
    }

    #[test]
    fn examples_are_stable() {
        let (a, _) = cpk(&["examples"]);
        let (b, _) = cpk(&["examples"]);
        assert_eq!(a, b);
        let ids = a.to_json();
        assert!(ids.contains("ex4.6-flip-3-3") && ids.contains("ex3.5-unitary-chi"));
        let (s, code) = cpk(&["examples", "--show", "ex3.4-commuting-swaps"]);
        assert_eq!(code, 0);
        assert_eq!(s.results["document"]["kind"], "permutation");
    }

    #[test]
    fn digests_are_deterministic_and_text_mirrors_json() {
        let (a, _) = cpk(&["ktheory", "builtin:ex4.6-flip-2-2"]);
        let (b, _) = cpk(&["ktheory", "builtin:ex4.6-flip-2-2"]);
        assert_eq!(a.input_digest, b.input_digest);
        assert_eq!(a.input_digest.as_ref().map(String::len), Some(64));
        let text = run(["cpk", "--format", "text", "ktheory", "builtin:ex4.6-flip-2-2"]).stdout;
        let mut same = a.clone();
        same.command.args.splice(0..0, ["--format".to_string(), "text".to_string()]);
        assert_eq!(text, same.to_text());
    }

    #[test]
    fn every_fixture_validates_and_determined_ones_pass_both_routes() {
        for f in fixtures() {
            let id = format!("builtin:{}", f.id);
            let (v, code) = cpk(&["validate", &id]);
            let expect_valid = f.id != "ex3.5-unitary-corrupted";
            assert_eq!(code == 0, expect_valid, "{}: {v:?}", f.id);
            if matches!(f.document().kind(), "unitary_chi" | "cover") {
                continue;
            }
            let (r, code) = cpk(&["ktheory", "--route", "both", &id]);
            if final_status(&r) == Some(SolveStatus::Determined) {
                assert_eq!(code, 0, "{}: {r:?}", f.id);
            }
        }
    }
}
