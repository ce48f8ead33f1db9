//! The `ctx` command-line front end.
//!
//! Artifacts go to stdout (or `-o FILE`), diagnostics to stderr.
//!
//! Exit codes: 0 success or non-contextual, 10/11/12 probabilistic,
//! possibilistic or strong contextuality (highest level wins), 1 resource
//! limits, 2 usage, 3 invalid input, 4 incompatible (signalling) model.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use serde_json::{json, Value};

use crate::analysis::{self, Analyzer, DEFAULT_COLUMN_CAP};
use crate::bundle::{self, BundleEdge};
use crate::corpus;
use crate::distribution::Semiring;
use crate::error::{Error, Result};
use crate::json;
use crate::logical_bell;
use crate::model::EmpiricalModel;
use crate::quantum::{self, SettingTable, StateVector};
use crate::scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_LIMIT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_INCOMPATIBLE: i32 = 4;
pub const EXIT_PROBABILISTIC: i32 = 10;
pub const EXIT_POSSIBILISTIC: i32 = 11;
pub const EXIT_STRONG: i32 = 12;

pub const COLUMN_CAP_VAR: &str = "CTX_COLUMN_CAP";

#[derive(Debug, Parser)]
#[command(name = "ctx", version, about = "Exact contextuality analysis of empirical models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a model and print the contextuality report.
    Analyze {
        /// Model JSON file, or `builtin:NAME`.
        file: String,
        #[arg(long, value_enum, default_value_t = Level::All)]
        level: Level,
        #[command(flatten)]
        out: Output,
    },
    /// Print the possibilistic collapse of a model.
    Collapse {
        file: String,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate a logical Bell inequality.
    #[command(group = clap::ArgGroup::new("source").required(true))]
    Bell {
        file: String,
        /// One proposition per line, `[VARS:] FORMULA`.
        #[arg(long, group = "source")]
        props: Option<PathBuf>,
        /// Use the support disjunction of every context.
        #[arg(long, group = "source")]
        canonical: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Emit the bundle diagram of a rank-2 model as Graphviz DOT.
    Bundle {
        file: String,
        /// Bundle edge `x=o,y=p` to draw bold, or `cycle` for the first
        /// univocal closed path. Repeatable.
        #[arg(long)]
        highlight: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Emit a builtin model as JSON.
    Gen {
        /// bell, hardy, pr, ghz, specker or liar:N.
        name: String,
        #[command(flatten)]
        out: Output,
    },
    /// Generate a model from a pure state and XY-plane measurement angles.
    Quantum {
        /// `bell`, `ghz:N`, or a JSON file of `[re, im]` amplitude pairs.
        #[arg(long)]
        state: String,
        /// JSON array with one `{variable: angle}` object per qubit.
        #[arg(long)]
        angles: PathBuf,
        /// Scenario JSON (a bare scenario or a model containing one).
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = quantum::DEFAULT_MAX_DENOMINATOR)]
        max_den: u64,
        #[arg(long, default_value_t = quantum::DEFAULT_SNAP_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the artifact here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    All,
    Probabilistic,
    Possibilistic,
    Strong,
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Incompatible(_) => EXIT_INCOMPATIBLE,
        Error::ColumnCap { .. } | Error::NoSignedSolution => EXIT_LIMIT,
        Error::Io(_) | Error::UnknownBuiltin(_) => EXIT_USAGE,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let cap = match std::env::var(COLUMN_CAP_VAR) {
        Ok(v) => match v.trim().parse::<u128>() {
            Ok(cap) => cap,
            Err(_) => {
                let _ = writeln!(stderr, "error: {COLUMN_CAP_VAR} must be a non-negative integer, got `{v}`");
                return EXIT_USAGE;
            }
        },
        Err(_) => DEFAULT_COLUMN_CAP,
    };
    match execute(&cli.command, Analyzer::with_cap(cap), stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Reads a model file, or a builtin when `source` is `builtin:NAME`.
pub fn load_model(source: &str) -> Result<EmpiricalModel> {
    match source.strip_prefix("builtin:") {
        Some(name) => corpus::builtin(name),
        None => json::model_from_str(&read(Path::new(source))?),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn emit(out: &Output, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn load_with_warnings(source: &str, stderr: &mut dyn Write) -> Result<EmpiricalModel> {
    let model = load_model(source)?;
    for w in model.scenario().warnings() {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(model)
}

fn level_exit(level: u8) -> i32 {
    [EXIT_OK, EXIT_PROBABILISTIC, EXIT_POSSIBILISTIC, EXIT_STRONG][usize::from(level)]
}

fn execute(command: &Command, analyzer: Analyzer, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Analyze { file, level, out } => {
            let model = load_with_warnings(file, stderr)?;
            let (value, code) = analyze(&model, *level, analyzer)?;
            emit(out, &json::to_pretty(&value), stdout)?;
            Ok(code)
        }
        Command::Collapse { file, out } => {
            let model = load_with_warnings(file, stderr)?;
            emit(out, &json::model_to_string(&model.to_boolean()), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Bell {
            file,
            props,
            canonical,
            out,
        } => {
            let model = load_with_warnings(file, stderr)?;
            let family = match (props, canonical) {
                (Some(path), _) => logical_bell::parse_propositions(model.scenario(), &read(path)?)?,
                (None, true) => logical_bell::canonical_support_propositions(&model)?,
                (None, false) => unreachable!("clap requires --props or --canonical"),
            };
            let result = logical_bell::logical_bell(&model, &family)?;
            emit(out, &json::to_pretty(&json::bell_to_value(model.scenario(), &family, &result)), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Bundle { file, highlight, out } => {
            let model = load_with_warnings(file, stderr)?;
            let diagram = bundle::build_bundle(&model)?;
            let mut edges: Vec<BundleEdge> = Vec::new();
            for h in highlight {
                if h == "cycle" {
                    match bundle::find_univocal_cycle(&diagram)? {
                        Some(g) => edges.extend(diagram.path_edges(&g)),
                        None => {
                            let _ = writeln!(stderr, "warning: no univocal closed path to highlight");
                        }
                    }
                } else {
                    edges.push(diagram.parse_edge(h)?);
                }
            }
            emit(out, &bundle::emit_dot(&diagram, &edges)?, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Gen { name, out } => {
            emit(out, &json::model_to_string(&corpus::builtin(name)?), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Quantum {
            state,
            angles,
            scenario,
            max_den,
            tol,
            out,
        } => {
            let state = load_state(state)?;
            let settings = load_settings(&read(angles)?)?;
            let scenario = load_scenario(&read(scenario)?)?;
            let model = quantum::generate_model(&state, &settings, &scenario, *max_den, *tol)?;
            emit(out, &json::model_to_string(&model), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Report JSON and exit code for `ctx analyze`.
pub fn analyze(model: &EmpiricalModel, level: Level, analyzer: Analyzer) -> Result<(Value, i32)> {
    if level == Level::All {
        let report = analyzer.classify(model)?;
        return Ok((json::report_to_value(model, &report), level_exit(report.level())));
    }
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    model.ensure_compatible()?;
    let s = model.scenario();
    let boolean = model.to_boolean();
    let (value, contextual, code) = match level {
        Level::Probabilistic => {
            let (section, contextual) = match model.semiring() {
                Semiring::Rational => {
                    let section = analyzer.probabilistic_global_section(model)?;
                    let contextual = section.is_none();
                    (section, contextual)
                }
                Semiring::Boolean => (None, analysis::possibilistic_contextuality(&boolean).is_some()),
            };
            let v = json!({
                "level": "probabilistic",
                "contextual": contextual,
                "global_section": section.map(|g| json!({
                    "variables": s.context_names(g.context()),
                    "weights": json::distribution_cells(s, &g),
                })),
            });
            (v, contextual, EXIT_PROBABILISTIC)
        }
        Level::Possibilistic => {
            let witness = analysis::possibilistic_contextuality(&boolean);
            let v = json!({
                "level": "possibilistic",
                "contextual": witness.is_some(),
                "witness_section": witness.as_ref().map(|w| json::assignment_value(s, w)),
            });
            (v, witness.is_some(), EXIT_POSSIBILISTIC)
        }
        Level::Strong => {
            let strong = analysis::strong_contextuality(&boolean);
            (json!({ "level": "strong", "contextual": strong }), strong, EXIT_STRONG)
        }
        Level::All => unreachable!(),
    };
    Ok((value, if contextual { code } else { EXIT_OK }))
}

/// `bell`, `ghz` (three qubits), `ghz:N`, or a path to a JSON amplitude list.
pub fn load_state(source: &str) -> Result<StateVector> {
    match source {
        "bell" => Ok(quantum::bell_state()),
        "ghz" => quantum::ghz_state(3),
        _ => {
            if let Some(n) = source.strip_prefix("ghz:") {
                let n = n
                    .parse()
                    .map_err(|_| Error::Quantum(format!("bad qubit count in `{source}`")))?;
                return quantum::ghz_state(n);
            }
            parse_amplitudes(&read(Path::new(source))?)
        }
    }
}

pub fn parse_amplitudes(text: &str) -> Result<StateVector> {
    let value: Value = serde_json::from_str(text)?;
    let list = value
        .as_array()
        .ok_or_else(|| Error::Format("state must be an array of [re, im] pairs".into()))?;
    let amplitudes = list
        .iter()
        .enumerate()
        .map(|(i, pair)| match pair.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(Complex64::new(
                number(re, &format!("amplitude {i}"))?,
                number(im, &format!("amplitude {i}"))?,
            )),
            _ => Err(Error::Format(format!("amplitude {i} must be a [re, im] pair"))),
        })
        .collect::<Result<Vec<_>>>()?;
    StateVector::new(amplitudes)
}

/// `[{"a1": "0", "a2": "1.0471975511965976"}, {"b1": ...}]`, one object per
/// qubit in qubit order.
pub fn load_settings(text: &str) -> Result<SettingTable> {
    let value: Value = serde_json::from_str(text)?;
    let parties = value
        .as_array()
        .ok_or_else(|| Error::Format("angles must be an array with one object per qubit".into()))?;
    let parties = parties
        .iter()
        .enumerate()
        .map(|(p, obj)| {
            obj.as_object()
                .ok_or_else(|| Error::Format(format!("angles[{p}] must be an object")))?
                .iter()
                .map(|(name, angle)| Ok((name.clone(), number(angle, &format!("angle of `{name}`"))?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SettingTable::new(parties)
}

pub fn load_scenario(text: &str) -> Result<Scenario> {
    let value: Value = serde_json::from_str(text)?;
    json::scenario_from_value(value.get("scenario").unwrap_or(&value))
}

fn number(value: &Value, what: &str) -> Result<f64> {
    let parsed = match value {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    };
    parsed
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Format(format!("{what} must be a finite decimal, got {value}")))
}
