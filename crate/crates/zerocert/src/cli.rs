//! Command-line front end: parse function specs, run the certifier, emit
//! reports.
//!
//! Exit codes: 0 for a certified report, 2 for an inconclusive one, 1 for a
//! malformed function spec or arguments.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::certifier::{certify, CertifierConfig, Outcome};
use crate::oracle::{BuiltinKind, C1Name, ComponentSpec};
use crate::poly::MultiPoly;
use crate::report::{parse_rat, to_csv_boxes, to_text, ReportDto, ReportEnvelope};
use crate::interval::{rat, Rat};

#[derive(Parser, Debug)]
#[command(name = "zerocert", about = "Certified zero counting for C1 vector fields on the unit cube")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count and localize the zeros of the function described by a spec file.
    Count(CountArgs),
}

#[derive(Parser, Debug)]
pub struct CountArgs {
    /// Path to the function spec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Accuracy parameter: certified regions have diameter at most 1/accuracy.
    #[arg(long)]
    pub accuracy: u64,
    /// Maximum number of resolution increments before giving up.
    #[arg(long, default_value_t = 40)]
    pub restart_budget: u32,
    /// Maximum refinement depth per sub-square.
    #[arg(long, default_value_t = 48)]
    pub depth_budget: u32,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
    CsvBoxes,
}

/// Resolved invocation parameters.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub spec_path: PathBuf,
    pub n0: u64,
    pub restart_budget: u32,
    pub depth_budget: u32,
    pub threads: usize,
    pub format: OutputFormat,
    pub dyadic_precision: Option<u32>,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Json { path: String, message: String },
    #[error("{field}: dimension must be at least 1")]
    BadDimension { field: String },
    #[error("{field}: {message}")]
    BadRational { field: String, message: String },
    #[error("{field}: expected {expected} exponents, got {got}")]
    PowersMismatch {
        field: String,
        expected: usize,
        got: usize,
    },
    #[error("components: expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("{field}: unknown builtin `{kind}` (expected sin, cos, or exp)")]
    UnknownBuiltin { field: String, kind: String },
    #[error("{field}: component index {index} out of range for dimension {dim}")]
    BuiltinIndex {
        field: String,
        index: usize,
        dim: usize,
    },
    #[error("{field}: {message}")]
    BadValue { field: String, message: String },
    #[error("accuracy must be at least 1")]
    BadAccuracy,
    #[error("ZEROCERT_PRECISION: {message}")]
    BadPrecisionEnv { message: String },
}

#[derive(Deserialize)]
struct SpecFile {
    dimension: usize,
    components: Vec<ComponentJson>,
    #[serde(default)]
    builtins: Vec<BuiltinJson>,
    domain_margin: Option<serde_json::Value>,
}

#[derive(Deserialize)]
struct ComponentJson {
    terms: Vec<TermJson>,
}

#[derive(Deserialize)]
struct TermJson {
    coeff: serde_json::Value,
    powers: Vec<u32>,
}

#[derive(Deserialize)]
struct BuiltinJson {
    component: usize,
    kind: String,
    scale: Option<serde_json::Value>,
    shift: Option<serde_json::Value>,
}

fn rational_field(v: &serde_json::Value, field: &str) -> Result<Rat, SpecError> {
    match v {
        serde_json::Value::String(s) => parse_rat(s).map_err(|message| SpecError::BadRational {
            field: field.to_string(),
            message,
        }),
        other => Err(SpecError::BadRational {
            field: field.to_string(),
            message: format!("`{other}` is not a rational; write \"p/q\" with integer p, q"),
        }),
    }
}

/// Parse and validate a function spec file into a usable name.
pub fn validate_spec(path: &Path) -> Result<C1Name, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: SpecFile = serde_json::from_str(&text).map_err(|e| SpecError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let dim = file.dimension;
    if dim == 0 {
        return Err(SpecError::BadDimension {
            field: "dimension".to_string(),
        });
    }
    if file.components.len() != dim {
        return Err(SpecError::ComponentCount {
            expected: dim,
            got: file.components.len(),
        });
    }
    let mut polys = Vec::with_capacity(dim);
    for (ci, comp) in file.components.iter().enumerate() {
        let mut terms = Vec::with_capacity(comp.terms.len());
        for (ti, term) in comp.terms.iter().enumerate() {
            let field = format!("components[{ci}].terms[{ti}]");
            let coeff = rational_field(&term.coeff, &format!("{field}.coeff"))?;
            if term.powers.len() != dim {
                return Err(SpecError::PowersMismatch {
                    field: format!("{field}.powers"),
                    expected: dim,
                    got: term.powers.len(),
                });
            }
            terms.push((term.powers.clone(), coeff));
        }
        polys.push(MultiPoly::from_terms(dim, terms));
    }
    let margin = match &file.domain_margin {
        None => rat(1, 4),
        Some(v) => {
            let m = rational_field(v, "domain_margin")?;
            if m <= rat(0, 1) {
                return Err(SpecError::BadValue {
                    field: "domain_margin".to_string(),
                    message: "must be positive".to_string(),
                });
            }
            m
        }
    };
    let mut components: Vec<ComponentSpec> =
        polys.into_iter().map(ComponentSpec::Poly).collect();
    for (bi, b) in file.builtins.iter().enumerate() {
        let field = format!("builtins[{bi}]");
        let kind = BuiltinKind::parse(&b.kind).ok_or_else(|| SpecError::UnknownBuiltin {
            field: format!("{field}.kind"),
            kind: b.kind.clone(),
        })?;
        if b.component >= dim {
            return Err(SpecError::BuiltinIndex {
                field: format!("{field}.component"),
                index: b.component,
                dim,
            });
        }
        let scale = match &b.scale {
            None => rat(1, 1),
            Some(v) => rational_field(v, &format!("{field}.scale"))?,
        };
        let shift = match &b.shift {
            None => rat(0, 1),
            Some(v) => rational_field(v, &format!("{field}.shift"))?,
        };
        let arg = match &components[b.component] {
            ComponentSpec::Poly(p) => p.clone(),
            ComponentSpec::Analytic { .. } => {
                return Err(SpecError::BadValue {
                    field: format!("{field}.component"),
                    message: "component already wrapped by a builtin".to_string(),
                })
            }
        };
        components[b.component] = ComponentSpec::Analytic { kind, arg, scale, shift };
    }
    Ok(C1Name::new(components, margin))
}

fn dyadic_precision_from_env() -> Result<Option<u32>, SpecError> {
    match std::env::var("ZEROCERT_PRECISION") {
        Err(_) => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<u32>()
            .map(Some)
            .map_err(|_| SpecError::BadPrecisionEnv {
                message: format!("`{s}` is not a precision (expected a small nonnegative integer)"),
            }),
    }
}

impl RunSpec {
    pub fn from_args(args: &CountArgs) -> Result<Self, SpecError> {
        if args.accuracy == 0 {
            return Err(SpecError::BadAccuracy);
        }
        Ok(Self {
            spec_path: args.spec.clone(),
            n0: args.accuracy,
            restart_budget: args.restart_budget,
            depth_budget: args.depth_budget,
            threads: args.threads,
            format: args.format,
            dyadic_precision: dyadic_precision_from_env()?,
        })
    }

    pub fn to_config(&self) -> CertifierConfig {
        CertifierConfig {
            n0: self.n0,
            restart_budget: self.restart_budget,
            depth_budget: self.depth_budget,
            threads: self.threads,
            dyadic_precision: self.dyadic_precision,
            ..Default::default()
        }
    }
}

/// Run a parsed invocation, writing the report to `out` and errors to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Count(args) => {
            let spec = match RunSpec::from_args(args) {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "spec error: {e}");
                    return 1;
                }
            };
            let name = match validate_spec(&spec.spec_path) {
                Ok(n) => std::sync::Arc::new(n),
                Err(e) => {
                    let _ = writeln!(err, "spec error: {e}");
                    return 1;
                }
            };
            let dim = name.dim();
            let cfg = spec.to_config();
            let start = Instant::now();
            let report = certify(&name, &cfg);
            let wall_time = start.elapsed().as_secs_f64();
            let rendered = match spec.format {
                OutputFormat::Json => {
                    let envelope = ReportEnvelope {
                        report: ReportDto::from_report(&report),
                        wall_time,
                    };
                    serde_json::to_string_pretty(&envelope).expect("report serialization")
                }
                OutputFormat::Text => {
                    format!("{}wall_time: {wall_time:.3}s\n", to_text(&report))
                }
                OutputFormat::CsvBoxes => to_csv_boxes(&report, dim),
            };
            let _ = writeln!(out, "{rendered}");
            match report.outcome {
                Outcome::Certified => 0,
                Outcome::Inconclusive => 2,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn write_spec(content: &str) -> tempfile_path::TempPath {
        tempfile_path::write(content)
    }

    // minimal scoped temp-file helper so tests need no extra crates
    mod tempfile_path {
        use std::path::PathBuf;
        use std::sync::atomic::{AtomicU64, Ordering};

        static COUNTER: AtomicU64 = AtomicU64::new(0);

        pub struct TempPath(pub PathBuf);

        impl Drop for TempPath {
            fn drop(&mut self) {
                let _ = std::fs::remove_file(&self.0);
            }
        }

        pub fn write(content: &str) -> TempPath {
            let id = COUNTER.fetch_add(1, Ordering::SeqCst);
            let mut path = std::env::temp_dir();
            path.push(format!(
                "zerocert-spec-{}-{id}.json",
                std::process::id()
            ));
            std::fs::write(&path, content).expect("write temp spec");
            TempPath(path)
        }
    }

    const IDENTITY_2D: &str = r#"{
        "dimension": 2,
        "components": [
            {"terms": [{"coeff": "1", "powers": [1, 0]}]},
            {"terms": [{"coeff": "1", "powers": [0, 1]}]}
        ]
    }"#;

    #[test]
    fn parse_identity_spec() {
        let file = write_spec(IDENTITY_2D);
        let name = validate_spec(&file.0).unwrap();
        assert_eq!(name.dim(), 2);
        assert_eq!(*name.margin(), rat(1, 4));
    }

    #[test]
    fn reject_decimal_coefficient() {
        let file = write_spec(
            r#"{"dimension": 1, "components": [{"terms": [{"coeff": "0.1", "powers": [1]}]}]}"#,
        );
        let e = validate_spec(&file.0).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("components[0].terms[0].coeff"), "{msg}");
    }

    #[test]
    fn reject_powers_length_mismatch() {
        let file = write_spec(
            r#"{"dimension": 2, "components": [
                {"terms": [{"coeff": "1", "powers": [1]}]},
                {"terms": [{"coeff": "1", "powers": [0, 1]}]}
            ]}"#,
        );
        let e = validate_spec(&file.0).unwrap_err();
        assert!(matches!(e, SpecError::PowersMismatch { .. }));
        assert!(e.to_string().contains("components[0].terms[0].powers"));
    }

    #[test]
    fn reject_unknown_builtin() {
        let file = write_spec(
            r#"{"dimension": 1,
                "components": [{"terms": [{"coeff": "3", "powers": [1]}]}],
                "builtins": [{"component": 0, "kind": "tanh"}]}"#,
        );
        let e = validate_spec(&file.0).unwrap_err();
        assert!(matches!(e, SpecError::UnknownBuiltin { .. }));
        assert!(e.to_string().contains("builtins[0].kind"));
    }

    #[test]
    fn run_count_identity_json() {
        let file = write_spec(IDENTITY_2D);
        let cli = Cli {
            command: Command::Count(CountArgs {
                spec: file.0.clone(),
                accuracy: 2,
                restart_budget: 40,
                depth_budget: 48,
                threads: 1,
                format: OutputFormat::Json,
            }),
        };
        let mut out = Cursor::new(Vec::new());
        let mut err = Cursor::new(Vec::new());
        let code = run(&cli, &mut out, &mut err);
        assert_eq!(code, 0, "stderr: {}", String::from_utf8_lossy(&err.into_inner()));
        let text = String::from_utf8(out.into_inner()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["outcome"], "certified");
        assert_eq!(v["count"], 1);
        assert!(v["wall_time"].is_number());
    }

    #[test]
    fn run_missing_spec_is_exit_1() {
        let cli = Cli {
            command: Command::Count(CountArgs {
                spec: PathBuf::from("/nonexistent/zerocert-spec.json"),
                accuracy: 2,
                restart_budget: 40,
                depth_budget: 48,
                threads: 1,
                format: OutputFormat::Json,
            }),
        };
        let mut out = Cursor::new(Vec::new());
        let mut err = Cursor::new(Vec::new());
        assert_eq!(run(&cli, &mut out, &mut err), 1);
        assert!(String::from_utf8(err.into_inner()).unwrap().contains("spec error"));
    }
}
