//! Logical Bell inequalities.
//!
//! A family of propositions φ₁..φ_N, each over the variables of one
//! maximal context, that cannot all hold under any global assignment
//! satisfies Σ p(φᵢ) ≤ N − 1 in every non-contextual model.

mod formula;

pub use formula::Formula;

use crate::distribution::Semiring;
use crate::error::{Error, Result};
use crate::model::EmpiricalModel;
use crate::rational::{self, Rational};
use crate::scenario::{Context, GlobalAssignment, Scenario};

use num::{Signed, Zero};

/// A formula read in one maximal context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposition {
    context: Context,
    formula: Formula,
}

impl Proposition {
    pub fn new(scenario: &Scenario, context: Context, formula: Formula) -> Result<Self> {
        if scenario.context_index(&context).is_none() {
            return Err(Error::UnknownContext(format!("{{{}}}", scenario.context_key(&context))));
        }
        if let Some(v) = formula.vars().into_iter().find(|v| !context.contains(*v)) {
            return Err(Error::Proposition(format!(
                "`{}` uses {} which is outside context {{{}}}",
                formula.render(scenario),
                scenario.variables()[v],
                scenario.context_key(&context)
            )));
        }
        Ok(Proposition { context, formula })
    }

    /// Parses `FORMULA` or `VARS: FORMULA`, where VARS is a comma list naming
    /// a maximal context. Without the prefix the context is the unique
    /// maximal context containing every variable the formula mentions.
    pub fn parse(scenario: &Scenario, text: &str) -> Result<Self> {
        let (context, body) = match text.split_once(':') {
            Some((vars, body)) => {
                let names: Vec<&str> = vars.split(',').map(str::trim).collect();
                (Some(scenario.context_of(&names)?), body)
            }
            None => (None, text),
        };
        let formula = Formula::parse(body, scenario)?;
        let context = match context {
            Some(c) => c,
            None => infer_context(scenario, &formula)?,
        };
        Proposition::new(scenario, context, formula)
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn render(&self, scenario: &Scenario) -> String {
        format!("{}: {}", scenario.context_key(&self.context), self.formula.render(scenario))
    }

    pub fn holds(&self, global: &GlobalAssignment) -> bool {
        self.formula.eval(&|v| global.values()[v])
    }
}

fn infer_context(scenario: &Scenario, formula: &Formula) -> Result<Context> {
    let vars = formula.vars();
    let mut candidates = scenario
        .contexts()
        .iter()
        .filter(|c| vars.iter().all(|v| c.contains(*v)));
    match (candidates.next(), candidates.next()) {
        (Some(c), None) => Ok(c.clone()),
        (None, _) => Err(Error::Proposition(format!(
            "no maximal context contains every variable of `{}`",
            formula.render(scenario)
        ))),
        (Some(_), Some(_)) => Err(Error::Proposition(format!(
            "`{}` fits several contexts; prefix it with `VARS:`",
            formula.render(scenario)
        ))),
    }
}

/// Reads one proposition per line. Blank lines and `#` comments are skipped.
pub fn parse_propositions(scenario: &Scenario, text: &str) -> Result<Vec<Proposition>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let prop = Proposition::parse(scenario, line).map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?;
        out.push(prop);
    }
    Ok(out)
}

/// Probability that `prop` holds in the table of its context.
pub fn eval_probability(model: &EmpiricalModel, prop: &Proposition) -> Result<Rational> {
    model.require(Semiring::Rational)?;
    let table = model
        .table(prop.context())
        .ok_or_else(|| Error::UnknownContext(model.scenario().context_key(prop.context())))?;
    let ctx = prop.context();
    Ok(table
        .iter()
        .filter(|(s, _)| prop.formula.eval(&|v| s.values()[ctx.position(v).expect("checked at construction")]))
        .fold(Rational::zero(), |acc, (_, w)| acc + w))
}

/// First global assignment (lexicographic) satisfying every proposition.
pub fn jointly_satisfiable(scenario: &Scenario, props: &[Proposition]) -> Option<GlobalAssignment> {
    scenario
        .enumerate_globals()
        .into_iter()
        .find(|g| props.iter().all(|p| p.holds(g)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellResult {
    pub probabilities: Vec<Rational>,
    pub sum: Rational,
    /// N − 1.
    pub bound: Rational,
    /// `sum − bound` when positive and the family is unsatisfiable, else 0.
    pub violation: Rational,
    pub satisfiable: bool,
}

impl BellResult {
    pub fn violated(&self) -> bool {
        self.violation.is_positive()
    }

    pub fn summary(&self) -> String {
        format!(
            "sum = {}, bound = {}, violation = {}{}",
            rational::format(&self.sum),
            rational::format(&self.bound),
            rational::format(&self.violation),
            if self.satisfiable { " (jointly satisfiable)" } else { "" }
        )
    }
}

pub fn logical_bell(model: &EmpiricalModel, props: &[Proposition]) -> Result<BellResult> {
    if props.is_empty() {
        return Err(Error::Proposition("need at least one proposition".into()));
    }
    let probabilities = props
        .iter()
        .map(|p| eval_probability(model, p))
        .collect::<Result<Vec<_>>>()?;
    let sum = rational::sum(&probabilities);
    let bound = rational::int(props.len() as i64 - 1);
    let satisfiable = jointly_satisfiable(model.scenario(), props).is_some();
    let excess = &sum - &bound;
    let violation = if satisfiable || !excess.is_positive() {
        Rational::zero()
    } else {
        excess
    };
    Ok(BellResult {
        probabilities,
        sum,
        bound,
        violation,
        satisfiable,
    })
}

/// For each context, the disjunction of its supported assignments.
pub fn canonical_support_propositions(model: &EmpiricalModel) -> Result<Vec<Proposition>> {
    let scenario = model.scenario();
    model
        .tables()
        .iter()
        .map(|table| {
            let formula = table
                .support_set()
                .map(|s| {
                    s.iter()
                        .map(|(v, o)| Formula::atom(v, o))
                        .reduce(Formula::and)
                        .unwrap_or(Formula::True)
                })
                .reduce(Formula::or)
                .unwrap_or(Formula::False);
            Proposition::new(scenario, table.context().clone(), formula)
        })
        .collect()
}
