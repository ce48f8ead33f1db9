//! JSON encodings of scenarios, models, reports and Bell results.
//!
//! Output key order is fixed (canonical variable, context and assignment
//! order), so equal inputs serialize to identical bytes. Rationals are
//! written as `"p/q"` strings, boolean weights as the integer `1`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::analysis::ContextualityReport;
use crate::distribution::{Distribution, Semiring};
use crate::error::{Error, Result};
use crate::logical_bell::{BellResult, Proposition};
use crate::model::{CompatibilityReport, EmpiricalModel, Violation};
use crate::rational::{self, Rational};
use crate::scenario::{Assignment, Context, Scenario};

/// Pretty-printed with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("Value serialization is infallible");
    s.push('\n');
    s
}

pub fn scenario_to_value(scenario: &Scenario) -> Value {
    let contexts: Vec<Value> = scenario
        .contexts()
        .iter()
        .map(|c| json!(scenario.context_names(c)))
        .collect();
    let mut outcomes = Map::new();
    for (v, name) in scenario.variables().iter().enumerate() {
        outcomes.insert(name.clone(), json!(scenario.outcomes(v)));
    }
    json!({
        "variables": scenario.variables(),
        "contexts": contexts,
        "outcomes": outcomes,
    })
}

pub fn scenario_from_value(value: &Value) -> Result<Scenario> {
    let obj = object(value, "scenario")?;
    let variables = string_list(field(obj, "variables", "scenario")?, "scenario.variables")?;
    let contexts = field(obj, "contexts", "scenario")?
        .as_array()
        .ok_or_else(|| shape("scenario.contexts", "an array of arrays"))?
        .iter()
        .enumerate()
        .map(|(i, c)| string_list(c, &format!("scenario.contexts[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let outcome_obj = object(field(obj, "outcomes", "scenario")?, "scenario.outcomes")?;
    if let Some(extra) = outcome_obj.keys().find(|k| !variables.contains(k)) {
        return Err(Error::Format(format!("scenario.outcomes names unknown variable `{extra}`")));
    }
    let outcomes = variables
        .iter()
        .map(|v| {
            let list = outcome_obj
                .get(v)
                .ok_or_else(|| Error::Format(format!("scenario.outcomes has no entry for `{v}`")))?;
            string_list(list, &format!("scenario.outcomes.{v}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Scenario::new(&variables, &contexts, &outcomes)
}

pub fn distribution_cells(scenario: &Scenario, d: &Distribution) -> Value {
    let mut cells = Map::new();
    for (a, w) in d.iter() {
        cells.insert(scenario.assignment_key(a), weight_value(d.semiring(), w));
    }
    Value::Object(cells)
}

fn weight_value(semiring: Semiring, w: &Rational) -> Value {
    match semiring {
        Semiring::Rational => json!(rational::format(w)),
        Semiring::Boolean => json!(1),
    }
}

pub fn model_to_value(model: &EmpiricalModel) -> Value {
    let s = model.scenario();
    let mut tables = Map::new();
    for t in model.tables() {
        tables.insert(s.context_key(t.context()), distribution_cells(s, t));
    }
    json!({
        "scenario": scenario_to_value(s),
        "semiring": model.semiring().name(),
        "tables": tables,
    })
}

pub fn model_to_string(model: &EmpiricalModel) -> String {
    to_pretty(&model_to_value(model))
}

/// Parses and validates a model. Every structural and normalization
/// problem is gathered into one [`Error::Validation`].
pub fn model_from_str(text: &str) -> Result<EmpiricalModel> {
    let value: Value = serde_json::from_str(text)?;
    model_from_value(&value)
}

pub fn model_from_value(value: &Value) -> Result<EmpiricalModel> {
    let obj = object(value, "model")?;
    let scenario = scenario_from_value(field(obj, "scenario", "model")?)?;
    let semiring = match field(obj, "semiring", "model")?.as_str() {
        Some("rational") => Semiring::Rational,
        Some("boolean") => Semiring::Boolean,
        Some(other) => return Err(Error::Format(format!("unknown semiring tag `{other}`"))),
        None => return Err(shape("model.semiring", "a string")),
    };
    let tables_obj = object(field(obj, "tables", "model")?, "model.tables")?;

    let mut violations = Vec::new();
    let mut tables: BTreeMap<Context, Distribution> = BTreeMap::new();
    for (key, cells) in tables_obj {
        let names: Vec<&str> = key.split(',').map(str::trim).collect();
        let context = match scenario.context_of(&names) {
            Ok(c) if scenario.context_index(&c).is_some() => c,
            _ => {
                violations.push(Violation::UnexpectedTable { context: key.clone() });
                continue;
            }
        };
        let canonical = scenario.context_key(&context);
        if tables.contains_key(&context) {
            violations.push(Violation::BadCell {
                context: canonical,
                detail: format!("table given twice (as `{key}`)"),
            });
            continue;
        }
        match read_cells(&scenario, semiring, &context, &names, cells) {
            Ok(d) => {
                tables.insert(context, d);
            }
            Err(mut vs) => {
                for v in &mut vs {
                    if let Violation::BadCell { context, .. } = v {
                        *context = canonical.clone();
                    }
                }
                violations.extend(vs);
            }
        }
    }
    for ctx in scenario.contexts() {
        if !tables.contains_key(ctx) && !violations.iter().any(|v| names_context(v, &scenario.context_key(ctx))) {
            violations.push(Violation::MissingTable {
                context: scenario.context_key(ctx),
            });
        }
    }
    for d in tables.values() {
        if let Some(detail) = d.normalization_error() {
            let context = scenario.context_key(d.context());
            violations.push(match semiring {
                Semiring::Rational => Violation::Normalization { context, detail },
                Semiring::Boolean => Violation::EmptySupport { context },
            });
        }
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    EmpiricalModel::new(scenario, semiring, tables.into_values().collect())
}

fn names_context(v: &Violation, key: &str) -> bool {
    matches!(v, Violation::BadCell { context, .. } if context == key)
}

fn read_cells(
    scenario: &Scenario,
    semiring: Semiring,
    context: &Context,
    names: &[&str],
    cells: &Value,
) -> std::result::Result<Distribution, Vec<Violation>> {
    let bad = |detail: String| Violation::BadCell {
        context: String::new(),
        detail,
    };
    let Some(cells) = cells.as_object() else {
        return Err(vec![bad("table must be an object of cells".into())]);
    };
    let mut problems = Vec::new();
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (key, raw) in cells {
        let labels: Vec<&str> = key.split(',').map(str::trim).collect();
        if labels.len() != names.len() {
            problems.push(bad(format!("cell `{key}` needs {} outcome labels", names.len())));
            continue;
        }
        let pairs: Vec<(&str, &str)> = names.iter().copied().zip(labels).collect();
        let assignment = match scenario.assignment(&pairs) {
            Ok(a) => a,
            Err(e) => {
                problems.push(bad(format!("cell `{key}`: {e}")));
                continue;
            }
        };
        if !seen.insert(assignment.clone()) {
            problems.push(bad(format!("cell `{key}` given twice")));
            continue;
        }
        match parse_weight(semiring, raw) {
            Ok(w) => entries.push((assignment, w)),
            Err(msg) => problems.push(bad(format!("cell `{key}`: {msg}"))),
        }
    }
    if !problems.is_empty() {
        return Err(problems);
    }
    Distribution::unnormalized(semiring, context.clone(), entries).map_err(|e| vec![bad(e.to_string())])
}

fn parse_weight(semiring: Semiring, raw: &Value) -> std::result::Result<Rational, String> {
    let value = match raw {
        Value::String(s) => rational::parse(s).map_err(|e| e.to_string())?,
        Value::Number(n) => rational::parse(&n.to_string()).map_err(|e| e.to_string())?,
        Value::Bool(b) if semiring == Semiring::Boolean => rational::int(i64::from(*b)),
        other => return Err(format!("weight must be a number or string, got {other}")),
    };
    if !semiring.contains(&value) {
        return Err(match semiring {
            Semiring::Rational => format!("weight {} is negative", rational::format(&value)),
            Semiring::Boolean => format!("boolean weight must be 0 or 1, got {}", rational::format(&value)),
        });
    }
    Ok(value)
}

pub fn assignment_value(scenario: &Scenario, a: &Assignment) -> Value {
    json!({
        "context": scenario.context_key(a.context()),
        "assignment": scenario.assignment_key(a),
        "description": scenario.describe_assignment(a),
    })
}

fn count_value(n: u128) -> Value {
    u64::try_from(n).map_or_else(|_| json!(n.to_string()), |n| json!(n))
}

pub fn report_to_value(model: &EmpiricalModel, report: &ContextualityReport) -> Value {
    let s = model.scenario();
    let level = ["non-contextual", "probabilistic", "possibilistic", "strong"][usize::from(report.level())];
    json!({
        "semiring": report.semiring.name(),
        "probabilistically_contextual": report.probabilistically_contextual,
        "possibilistically_contextual": report.possibilistically_contextual,
        "strongly_contextual": report.strongly_contextual,
        "level": level,
        "global_section": report.global_section.as_ref().map(|g| json!({
            "variables": s.context_names(g.context()),
            "weights": distribution_cells(s, g),
        })),
        "witness_section": report.witness_section.as_ref().map(|w| assignment_value(s, w)),
        "consistent_global_count": count_value(report.consistent_global_count),
        "warnings": s.warnings(),
    })
}

pub fn compatibility_to_value(model: &EmpiricalModel, report: &CompatibilityReport) -> Value {
    let s = model.scenario();
    let violations: Vec<Value> = report
        .violations
        .iter()
        .zip(&report.descriptions)
        .map(|(v, d)| {
            json!({
                "first": s.context_key(&v.first),
                "second": s.context_key(&v.second),
                "overlap": s.context_key(&v.overlap),
                "marginal_first": distribution_cells(s, &v.marginal_first),
                "marginal_second": distribution_cells(s, &v.marginal_second),
                "description": d,
            })
        })
        .collect();
    json!({ "compatible": report.compatible, "violations": violations })
}

pub fn bell_to_value(scenario: &Scenario, props: &[Proposition], result: &BellResult) -> Value {
    let propositions: Vec<Value> = props
        .iter()
        .zip(&result.probabilities)
        .map(|(p, prob)| {
            json!({
                "context": scenario.context_key(p.context()),
                "formula": p.formula().render(scenario),
                "probability": rational::format(prob),
            })
        })
        .collect();
    json!({
        "propositions": propositions,
        "sum": rational::format(&result.sum),
        "bound": rational::format(&result.bound),
        "violation": rational::format(&result.violation),
        "satisfiable": result.satisfiable,
    })
}

fn object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value.as_object().ok_or_else(|| shape(what, "an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Format(format!("{what} is missing field `{key}`")))
}

fn string_list(value: &Value, what: &str) -> Result<Vec<String>> {
    value
        .as_array()
        .ok_or_else(|| shape(what, "an array of strings"))?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| shape(what, "an array of strings")))
        .collect()
}

fn shape(what: &str, expected: &str) -> Error {
    Error::Format(format!("{what} must be {expected}"))
}
