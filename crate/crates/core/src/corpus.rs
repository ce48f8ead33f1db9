//! Built-in models: the Bell table, the Hardy paradox, the PR box, GHZ, the
//! Specker triangle, Liar cycles, and boolean equation systems in general.

use std::collections::HashSet;

use crate::distribution::{Distribution, Semiring};
use crate::error::{Error, Result};
use crate::model::EmpiricalModel;
use crate::quantum;
use crate::rational::{ratio, Rational};
use crate::scenario::{Assignment, Context, Scenario};

pub const BUILTIN_NAMES: &[&str] = &["bell", "hardy", "pr", "ghz", "specker", "liar:N"];

fn bipartite_scenario() -> Scenario {
    Scenario::with_shared_outcomes(
        &["a1", "a2", "b1", "b2"],
        &[
            vec!["a1", "b1"],
            vec!["a1", "b2"],
            vec!["a2", "b1"],
            vec!["a2", "b2"],
        ],
        &["0", "1"],
    )
    .expect("static scenario")
}

type Row<'a> = (&'a str, &'a str, Vec<(&'a str, &'a str, Rational)>);

/// Rows given as `(a, b, [(outcome_a, outcome_b, weight)])`.
fn table_model(semiring: Semiring, rows: &[Row]) -> EmpiricalModel {
    let s = bipartite_scenario();
    let tables = rows
        .iter()
        .map(|(a, b, cells)| {
            let ctx = s.context_of(&[*a, *b]).expect("static context");
            let cells = cells
                .iter()
                .map(|(oa, ob, w)| (s.assignment(&[(*a, *oa), (*b, *ob)]).expect("static cell"), w.clone()));
            Distribution::new(semiring, ctx, cells).expect("static table")
        })
        .collect();
    EmpiricalModel::new(s, semiring, tables).expect("static model")
}

/// The four-row Bell table; columns (0,0), (1,0), (0,1), (1,1).
pub fn bell() -> EmpiricalModel {
    let half = ratio(1, 2);
    let (big, small) = (ratio(3, 8), ratio(1, 8));
    let correlated = |hi: &Rational, lo: &Rational| {
        vec![
            ("0", "0", hi.clone()),
            ("1", "0", lo.clone()),
            ("0", "1", lo.clone()),
            ("1", "1", hi.clone()),
        ]
    };
    table_model(
        Semiring::Rational,
        &[
            ("a1", "b1", vec![("0", "0", half.clone()), ("1", "1", half)]),
            ("a1", "b2", correlated(&big, &small)),
            ("a2", "b1", correlated(&big, &small)),
            ("a2", "b2", correlated(&small, &big)),
        ],
    )
}

/// The Hardy support table: every cell possible except (0,0) on
/// `{a1,b2}` and `{a2,b1}` and (1,1) on `{a2,b2}`.
pub fn hardy() -> EmpiricalModel {
    let all = ["0,0", "0,1", "1,0", "1,1"];
    let row = |a: &'static str, b: &'static str, excluded: &str| {
        let cells = all
            .iter()
            .filter(|c| **c != excluded)
            .map(|c| {
                let (x, y) = c.split_once(',').unwrap();
                (x, y, Rational::from_integer(1.into()))
            })
            .collect::<Vec<_>>();
        (a, b, cells)
    };
    table_model(
        Semiring::Boolean,
        &[
            row("a1", "b1", ""),
            row("a1", "b2", "0,0"),
            row("a2", "b1", "0,0"),
            row("a2", "b2", "1,1"),
        ],
    )
}

/// The PR box support: correlated on three rows, anticorrelated on
/// `{a2,b2}`.
pub fn pr_box() -> EmpiricalModel {
    let one = || Rational::from_integer(1.into());
    let corr = || vec![("0", "0", one()), ("1", "1", one())];
    let anti = vec![("1", "0", one()), ("0", "1", one())];
    table_model(
        Semiring::Boolean,
        &[("a1", "b1", corr()), ("a1", "b2", corr()), ("a2", "b1", corr()), ("a2", "b2", anti)],
    )
}

/// Support of the GHZ model, derived through the Born rule from the
/// 3-qubit GHZ state with X/Y measurements.
pub fn ghz() -> EmpiricalModel {
    quantum::ghz_model()
        .and_then(|m| m.possibilistic_collapse())
        .expect("GHZ derivation snaps exactly")
}

/// `x = y` when `negated` is false, `x = ¬y` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanEquation {
    pub left: String,
    pub right: String,
    pub negated: bool,
}

impl BooleanEquation {
    pub fn eq(left: &str, right: &str) -> Self {
        BooleanEquation {
            left: left.into(),
            right: right.into(),
            negated: false,
        }
    }

    pub fn neq(left: &str, right: &str) -> Self {
        BooleanEquation {
            left: left.into(),
            right: right.into(),
            negated: true,
        }
    }
}

/// One two-variable context per equation, whose support is the set of
/// satisfying assignments. Variables are ordered by first occurrence.
pub fn equation_system(equations: &[BooleanEquation]) -> Result<EmpiricalModel> {
    if equations.is_empty() {
        return Err(Error::Equations("no equations".into()));
    }
    let mut variables: Vec<&str> = Vec::new();
    let mut pairs = HashSet::new();
    for eq in equations {
        if eq.left == eq.right {
            return Err(Error::Equations(format!("equation relates `{}` to itself", eq.left)));
        }
        let key = if eq.left < eq.right {
            (eq.left.as_str(), eq.right.as_str())
        } else {
            (eq.right.as_str(), eq.left.as_str())
        };
        if !pairs.insert(key) {
            return Err(Error::Equations(format!(
                "two equations over {{{},{}}} would share one context",
                key.0, key.1
            )));
        }
        for v in [eq.left.as_str(), eq.right.as_str()] {
            if !variables.contains(&v) {
                variables.push(v);
            }
        }
    }
    let contexts: Vec<Vec<&str>> = equations.iter().map(|e| vec![e.left.as_str(), e.right.as_str()]).collect();
    let scenario = Scenario::with_shared_outcomes(&variables, &contexts, &["0", "1"])?;

    let mut tables = Vec::with_capacity(equations.len());
    for eq in equations {
        let ctx = scenario.context_of(&[&eq.left, &eq.right])?;
        let support = (0..2).map(|x| {
            let y = if eq.negated { 1 - x } else { x };
            let (l, r) = (scenario.var_id(&eq.left).unwrap(), scenario.var_id(&eq.right).unwrap());
            let values = if l < r { vec![x, y] } else { vec![y, x] };
            Assignment::new(ctx.clone(), values).expect("two values for two variables")
        });
        tables.push(Distribution::boolean_set(ctx.clone(), support)?);
    }
    EmpiricalModel::new(scenario, Semiring::Boolean, tables)
}

/// `x1 = x2, …, x_{n-1} = x_n, x_n = ¬x1`.
pub fn liar_cycle(n: usize) -> Result<EmpiricalModel> {
    if n < 2 {
        return Err(Error::Equations(format!("a Liar cycle needs n >= 2, got {n}")));
    }
    let name = |i: usize| format!("x{i}");
    let mut eqs: Vec<BooleanEquation> = (1..n).map(|i| BooleanEquation::eq(&name(i), &name(i + 1))).collect();
    eqs.push(BooleanEquation::neq(&name(n), &name(1)));
    equation_system(&eqs)
}

/// `x1 = ¬x2, x2 = ¬x3, x3 = ¬x1`.
pub fn specker_triangle() -> EmpiricalModel {
    equation_system(&[
        BooleanEquation::neq("x1", "x2"),
        BooleanEquation::neq("x2", "x3"),
        BooleanEquation::neq("x3", "x1"),
    ])
    .expect("static equations")
}

pub fn builtin(name: &str) -> Result<EmpiricalModel> {
    match name {
        "bell" => Ok(bell()),
        "hardy" => Ok(hardy()),
        "pr" => Ok(pr_box()),
        "ghz" => Ok(ghz()),
        "specker" => Ok(specker_triangle()),
        _ => match name.strip_prefix("liar:") {
            Some(n) => {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::UnknownBuiltin(format!("{name} (N must be a positive integer)")))?;
                liar_cycle(n)
            }
            None => Err(Error::UnknownBuiltin(name.to_string())),
        },
    }
}

pub fn drop_context(model: &EmpiricalModel, context: &Context) -> Result<EmpiricalModel> {
    model.drop_context(context)
}
