//! Empirical models: one distribution per maximal context.

use std::fmt;

use crate::distribution::{Distribution, Semiring};
use crate::error::{Error, Result};
use crate::rational;
use crate::scenario::{Context, Scenario};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: Scenario,
    semiring: Semiring,
    tables: Vec<Distribution>,
}

/// A content problem found by [`EmpiricalModel::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Normalization { context: String, detail: String },
    EmptySupport { context: String },
    MissingTable { context: String },
    UnexpectedTable { context: String },
    SemiringMismatch { context: String },
    BadCell { context: String, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Normalization { context, detail } => {
                write!(f, "context {context}: normalization violated, {detail}")
            }
            Violation::EmptySupport { context } => write!(f, "context {context}: support is empty"),
            Violation::MissingTable { context } => write!(f, "context {context}: no table given"),
            Violation::UnexpectedTable { context } => {
                write!(f, "table {context} is not a maximal context of the scenario")
            }
            Violation::SemiringMismatch { context } => {
                write!(f, "context {context}: table semiring differs from the model's")
            }
            Violation::BadCell { context, detail } => write!(f, "context {context}: {detail}"),
        }
    }
}

/// One failing pair of maximal contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairViolation {
    pub first: Context,
    pub second: Context,
    pub overlap: Context,
    pub marginal_first: Distribution,
    pub marginal_second: Distribution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub compatible: bool,
    pub violations: Vec<PairViolation>,
    /// Human-readable descriptions, aligned with `violations`.
    pub descriptions: Vec<String>,
}

impl CompatibilityReport {
    pub fn summary(&self) -> String {
        if self.compatible {
            "compatible".into()
        } else {
            self.descriptions.join("; ")
        }
    }
}

impl EmpiricalModel {
    /// Structural checks only: one table per maximal context, in scenario
    /// order, all in the same semiring. Normalization is left to
    /// [`EmpiricalModel::validate`].
    pub fn new(scenario: Scenario, semiring: Semiring, tables: Vec<Distribution>) -> Result<Self> {
        if tables.len() != scenario.contexts().len() {
            return Err(Error::Model(format!(
                "{} tables for {} maximal contexts",
                tables.len(),
                scenario.contexts().len()
            )));
        }
        let mut tables = tables;
        tables.sort_by(|a, b| a.context().cmp(b.context()));
        for (table, ctx) in tables.iter().zip(scenario.contexts()) {
            if table.context() != ctx {
                return Err(Error::Model(format!(
                    "table over {{{}}} does not match context {{{}}}",
                    scenario.context_key(table.context()),
                    scenario.context_key(ctx)
                )));
            }
            if table.semiring() != semiring {
                return Err(Error::Model(format!(
                    "table {{{}}} is {}, model is {}",
                    scenario.context_key(ctx),
                    table.semiring().name(),
                    semiring.name()
                )));
            }
        }
        Ok(EmpiricalModel {
            scenario,
            semiring,
            tables,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn tables(&self) -> &[Distribution] {
        &self.tables
    }

    pub fn table(&self, context: &Context) -> Option<&Distribution> {
        self.scenario.context_index(context).map(|i| &self.tables[i])
    }

    pub fn table_by_names<S: AsRef<str>>(&self, names: &[S]) -> Result<&Distribution> {
        let ctx = self.scenario.context_of(names)?;
        self.table(&ctx)
            .ok_or_else(|| Error::UnknownContext(self.scenario.context_key(&ctx)))
    }

    pub fn require(&self, semiring: Semiring) -> Result<()> {
        if self.semiring == semiring {
            Ok(())
        } else {
            Err(Error::WrongSemiring {
                expected: semiring.name(),
                actual: self.semiring.name(),
            })
        }
    }

    /// Every invariant violation, empty when the model is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for table in &self.tables {
            let context = self.scenario.context_key(table.context());
            if let Some(detail) = table.normalization_error() {
                match table.semiring() {
                    Semiring::Rational => out.push(Violation::Normalization { context, detail }),
                    Semiring::Boolean => out.push(Violation::EmptySupport { context }),
                }
            }
        }
        out
    }

    /// Compares the marginals of every pair of maximal contexts on their
    /// overlap, exactly.
    pub fn check_compatibility(&self) -> CompatibilityReport {
        let mut violations = Vec::new();
        let mut descriptions = Vec::new();
        let ctxs = self.scenario.contexts();
        for i in 0..ctxs.len() {
            for j in i + 1..ctxs.len() {
                let overlap = ctxs[i].overlap(&ctxs[j]);
                let mi = self.tables[i].marginalize(&overlap).expect("overlap is a subcontext");
                let mj = self.tables[j].marginalize(&overlap).expect("overlap is a subcontext");
                if mi != mj {
                    descriptions.push(format!(
                        "{{{}}} vs {{{}}} disagree on {{{}}}: {} vs {}",
                        self.scenario.context_key(&ctxs[i]),
                        self.scenario.context_key(&ctxs[j]),
                        self.scenario.context_key(&overlap),
                        self.describe_distribution(&mi),
                        self.describe_distribution(&mj),
                    ));
                    violations.push(PairViolation {
                        first: ctxs[i].clone(),
                        second: ctxs[j].clone(),
                        overlap,
                        marginal_first: mi,
                        marginal_second: mj,
                    });
                }
            }
        }
        CompatibilityReport {
            compatible: violations.is_empty(),
            violations,
            descriptions,
        }
    }

    pub fn ensure_compatible(&self) -> Result<()> {
        let report = self.check_compatibility();
        if report.compatible {
            Ok(())
        } else {
            Err(Error::Incompatible(Box::new(report)))
        }
    }

    /// `{a1=0: 1/2, a1=1: 1/2}` style rendering.
    pub fn describe_distribution(&self, d: &Distribution) -> String {
        let cells: Vec<String> = d
            .iter()
            .map(|(a, w)| format!("{}: {}", self.scenario.describe_assignment(a), rational::format(w)))
            .collect();
        format!("{{{}}}", cells.join(", "))
    }

    /// Replaces every table by its support.
    pub fn possibilistic_collapse(&self) -> Result<EmpiricalModel> {
        self.require(Semiring::Rational)?;
        Ok(EmpiricalModel {
            scenario: self.scenario.clone(),
            semiring: Semiring::Boolean,
            tables: self.tables.iter().map(Distribution::support).collect(),
        })
    }

    /// The boolean model as is, or the collapse of a rational one.
    pub fn to_boolean(&self) -> EmpiricalModel {
        match self.semiring {
            Semiring::Boolean => self.clone(),
            Semiring::Rational => self.possibilistic_collapse().expect("rational model"),
        }
    }

    /// The model whose tables are the marginals of a distribution over all
    /// variables; non-contextual by construction.
    pub fn from_global(scenario: &Scenario, global: &Distribution) -> Result<EmpiricalModel> {
        if global.context() != &scenario.full_context() {
            return Err(Error::Model("global distribution must range over every variable".into()));
        }
        let tables = scenario
            .contexts()
            .iter()
            .map(|c| global.marginalize(c))
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::new(scenario.clone(), global.semiring(), tables)
    }

    /// Pointwise mixture of rational models over the same scenario.
    pub fn mixture(models: &[EmpiricalModel], weights: &[rational::Rational]) -> Result<EmpiricalModel> {
        let first = models.first().ok_or_else(|| Error::Model("empty mixture".into()))?;
        if models.iter().any(|m| m.scenario != first.scenario) {
            return Err(Error::Model("mixture of models over different scenarios".into()));
        }
        let tables = (0..first.tables.len())
            .map(|i| {
                let column: Vec<Distribution> = models.iter().map(|m| m.tables[i].clone()).collect();
                Distribution::mixture(&column, weights)
            })
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::new(first.scenario.clone(), Semiring::Rational, tables)
    }

    /// Rational model with each table uniform on the support of this one.
    pub fn uniform_on_support(&self) -> Result<EmpiricalModel> {
        let tables = self
            .tables
            .iter()
            .map(|t| {
                let n = t.support_len();
                if n == 0 {
                    return Err(Error::Model("cannot spread weight over an empty support".into()));
                }
                let w = rational::ratio(1, n as i64);
                Distribution::new(
                    Semiring::Rational,
                    t.context().clone(),
                    t.support_set().map(|a| (a.clone(), w.clone())),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::new(self.scenario.clone(), Semiring::Rational, tables)
    }

    /// Rebuilds the model over `scenario`, matching variables, outcomes and
    /// contexts by name.
    pub fn transport(&self, scenario: &Scenario) -> Result<EmpiricalModel> {
        let tables = self
            .tables
            .iter()
            .map(|t| self.retarget(t, scenario))
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::new(scenario.clone(), self.semiring, tables)
    }

    fn retarget(&self, table: &Distribution, scenario: &Scenario) -> Result<Distribution> {
        let ctx = scenario.context_of(&self.scenario.context_names(table.context()))?;
        let cells = table
            .iter()
            .map(|(a, w)| {
                let labels: Vec<(&str, &str)> = a
                    .iter()
                    .map(|(v, o)| (self.scenario.variables()[v].as_str(), self.scenario.outcomes(v)[o].as_str()))
                    .collect();
                Ok((scenario.assignment(&labels)?, w.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Distribution::unnormalized(self.semiring, ctx, cells)
    }

    /// Same model with variables renamed through `rename`.
    pub fn rename_variables(&self, rename: impl Fn(&str) -> String) -> Result<EmpiricalModel> {
        let renamed = self.scenario.rename(&rename)?;
        EmpiricalModel::new(renamed, self.semiring, self.tables.clone())
    }

    /// Same model with a different canonical variable order.
    pub fn reorder_variables<S: AsRef<str>>(&self, order: &[S]) -> Result<EmpiricalModel> {
        let scenario = self.scenario.reorder(order)?;
        self.transport(&scenario)
    }

    /// Removes one maximal context and its table; variables left in no
    /// context disappear from the scenario.
    pub fn drop_context(&self, context: &Context) -> Result<EmpiricalModel> {
        let idx = self
            .scenario
            .context_index(context)
            .ok_or_else(|| Error::UnknownContext(self.scenario.context_key(context)))?;
        if self.scenario.contexts().len() < 2 {
            return Err(Error::Model("cannot remove the last context".into()));
        }
        let keep: Vec<usize> = (0..self.tables.len()).filter(|&i| i != idx).collect();
        let ctxs = self.scenario.contexts();
        let kept_vars: Vec<usize> = (0..self.scenario.var_count())
            .filter(|&v| keep.iter().any(|&i| ctxs[i].contains(v)))
            .collect();
        let names: Vec<&str> = kept_vars.iter().map(|&v| self.scenario.variables()[v].as_str()).collect();
        let outcomes: Vec<Vec<String>> = kept_vars.iter().map(|&v| self.scenario.outcomes(v).to_vec()).collect();
        let contexts: Vec<Vec<&str>> = keep.iter().map(|&i| self.scenario.context_names(&ctxs[i])).collect();
        let scenario = Scenario::new(&names, &contexts, &outcomes)?;
        let tables = keep
            .iter()
            .map(|&i| self.retarget(&self.tables[i], &scenario))
            .collect::<Result<Vec<_>>>()?;
        EmpiricalModel::new(scenario, self.semiring, tables)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, Rational};

    fn bell_scenario() -> Scenario {
        Scenario::with_shared_outcomes(
            &["a1", "a2", "b1", "b2"],
            &[vec!["a1", "b1"], vec!["a1", "b2"], vec!["a2", "b1"], vec!["a2", "b2"]],
            &["0", "1"],
        )
        .unwrap()
    }

    fn rows(s: &Scenario, rows: &[[Rational; 4]]) -> EmpiricalModel {
        let tables = s
            .contexts()
            .iter()
            .zip(rows)
            .map(|(c, row)| {
                let cells = s.enumerate_assignments(c).unwrap().into_iter().zip(row.iter().cloned());
                Distribution::unnormalized(Semiring::Rational, c.clone(), cells).unwrap()
            })
            .collect();
        EmpiricalModel::new(s.clone(), Semiring::Rational, tables).unwrap()
    }

    fn bell() -> EmpiricalModel {
        let h = ratio(1, 2);
        let z = ratio(0, 1);
        let (a, b) = (ratio(3, 8), ratio(1, 8));
        rows(
            &bell_scenario(),
            &[
                [h.clone(), z.clone(), z, h],
                [a.clone(), b.clone(), b.clone(), a.clone()],
                [a.clone(), b.clone(), b.clone(), a.clone()],
                [b.clone(), a.clone(), a, b],
            ],
        )
    }

    #[test]
    fn bell_is_valid_and_compatible() {
        let m = bell();
        assert!(m.validate().is_empty());
        assert!(m.check_compatibility().compatible);
    }

    #[test]
    fn edited_bell_row_signals_on_a1() {
        let cells = [ratio(1, 4), ratio(1, 4), ratio(0, 1), ratio(1, 2)];
        let (a, b) = (ratio(3, 8), ratio(1, 8));
        let m = rows(
            &bell_scenario(),
            &[
                cells.clone(),
                [a.clone(), b.clone(), b.clone(), a.clone()],
                [a.clone(), b.clone(), b.clone(), a.clone()],
                [b.clone(), a.clone(), a.clone(), b.clone()],
            ],
        );
        let report = m.check_compatibility();
        assert!(!report.compatible);
        // hand-sum oracle over the (0,0),(1,0),(0,1),(1,1) columns
        let a1_zero_row1 = &cells[0] + &cells[2];
        let a1_zero_row2 = &a + &b;
        assert_eq!(a1_zero_row1, ratio(1, 4));
        assert_eq!(a1_zero_row2, ratio(1, 2));
        let b1_zero_row1 = &cells[0] + &cells[1];
        let b1_zero_row3 = &a + &b;
        assert_eq!(b1_zero_row1, b1_zero_row3);

        let s = m.scenario();
        let pairs: Vec<(String, String, String)> = report
            .violations
            .iter()
            .map(|v| (s.context_key(&v.first), s.context_key(&v.second), s.context_key(&v.overlap)))
            .collect();
        assert_eq!(pairs, [("a1,b1".to_string(), "a1,b2".to_string(), "a1".to_string())]);
        let v = &report.violations[0];
        assert_eq!(v.marginal_first.weight(&s.assignment(&[("a1", "0")]).unwrap()), ratio(1, 4));
        assert_eq!(v.marginal_second.weight(&s.assignment(&[("a1", "0")]).unwrap()), ratio(1, 2));
    }

    #[test]
    fn collapse_of_bell() {
        let c = bell().possibilistic_collapse().unwrap();
        assert_eq!(c.semiring(), Semiring::Boolean);
        let s = c.scenario();
        let keys: Vec<Vec<String>> = c
            .tables()
            .iter()
            .map(|t| t.support_set().map(|a| s.assignment_key(a)).collect())
            .collect();
        assert_eq!(keys[0], ["0,0", "1,1"]);
        for k in &keys[1..] {
            assert_eq!(k, &["0,0", "1,0", "0,1", "1,1"]);
        }
        assert!(c.check_compatibility().compatible);
        assert!(matches!(c.possibilistic_collapse(), Err(Error::WrongSemiring { .. })));
    }

    #[test]
    fn from_global_examples() {
        let s = bell_scenario();
        let uniform = Distribution::uniform(&s, &s.full_context()).unwrap();
        let m = EmpiricalModel::from_global(&s, &uniform).unwrap();
        for t in m.tables() {
            assert_eq!(t.support_len(), 4);
            assert!(t.iter().all(|(_, w)| *w == ratio(1, 4)));
        }

        let g = s.global_from_labels(&["0", "1", "1", "0"]).unwrap();
        let pm = Distribution::point_mass(Semiring::Rational, g.restrict(&s.full_context()));
        let det = EmpiricalModel::from_global(&s, &pm).unwrap();
        for t in det.tables() {
            assert_eq!(t.support_len(), 1);
            let only = t.support_set().next().unwrap();
            assert_eq!(only, &g.restrict(t.context()));
        }

        // 0000 and 1111 over (a1,a2,b1,b2), weight 1/2 each
        let zero = s.global_from_labels(&["0", "0", "0", "0"]).unwrap().restrict(&s.full_context());
        let one = s.global_from_labels(&["1", "1", "1", "1"]).unwrap().restrict(&s.full_context());
        let mix = Distribution::mixture(
            &[
                Distribution::point_mass(Semiring::Rational, zero),
                Distribution::point_mass(Semiring::Rational, one),
            ],
            &[ratio(1, 2), ratio(1, 2)],
        )
        .unwrap();
        let m = EmpiricalModel::from_global(&s, &mix).unwrap();
        let b = bell();
        assert_eq!(m.tables()[0], b.tables()[0]);
        for t in &m.tables()[1..] {
            assert_eq!(t, &m.tables()[0].clone_onto(t.context()));
        }
        assert_ne!(m.tables()[3], b.tables()[3]);

        let not_global = Distribution::uniform(&s, &s.contexts()[0]).unwrap();
        assert!(EmpiricalModel::from_global(&s, &not_global).is_err());
    }

    trait CloneOnto {
        fn clone_onto(&self, ctx: &Context) -> Distribution;
    }

    impl CloneOnto for Distribution {
        fn clone_onto(&self, ctx: &Context) -> Distribution {
            let cells = self.iter().map(|(a, w)| {
                (crate::scenario::Assignment::new(ctx.clone(), a.values().to_vec()).unwrap(), w.clone())
            });
            Distribution::new(self.semiring(), ctx.clone(), cells).unwrap()
        }
    }

    #[test]
    fn validate_reports_normalization_and_empty_support() {
        let s = bell_scenario();
        let e = ratio(1, 8);
        let mut m = bell();
        let bad = rows(
            &s,
            &[
                [ratio(5, 8), e.clone(), e.clone(), ratio(1, 4)],
                [ratio(3, 8), e.clone(), e.clone(), ratio(3, 8)],
                [ratio(3, 8), e.clone(), e.clone(), ratio(3, 8)],
                [e.clone(), ratio(3, 8), ratio(3, 8), e],
            ],
        );
        let v = bad.validate();
        assert_eq!(
            v,
            vec![Violation::Normalization {
                context: "a1,b1".into(),
                detail: "weights sum to 9/8".into()
            }]
        );

        let mut tables: Vec<Distribution> = m.possibilistic_collapse().unwrap().tables().to_vec();
        tables[2] = Distribution::unnormalized(Semiring::Boolean, tables[2].context().clone(), []).unwrap();
        m = EmpiricalModel::new(s, Semiring::Boolean, tables).unwrap();
        assert_eq!(m.validate(), vec![Violation::EmptySupport { context: "a2,b1".into() }]);
    }

    #[test]
    fn constructor_rejects_structural_mismatch() {
        let s = bell_scenario();
        let m = bell();
        assert!(EmpiricalModel::new(s.clone(), Semiring::Rational, m.tables()[..3].to_vec()).is_err());
        assert!(EmpiricalModel::new(s, Semiring::Boolean, m.tables().to_vec()).is_err());
    }

    #[test]
    fn reorder_and_drop() {
        let m = bell();
        let r = m.reorder_variables(&["b2", "a1", "b1", "a2"]).unwrap();
        assert_eq!(r.scenario().variables(), ["b2", "a1", "b1", "a2"]);
        assert_eq!(r.reorder_variables(&["a1", "a2", "b1", "b2"]).unwrap(), m);

        let ctx = m.scenario().context_of(&["a2", "b2"]).unwrap();
        let d = m.drop_context(&ctx).unwrap();
        assert_eq!(d.tables().len(), 3);
        for t in d.tables() {
            let key = d.scenario().context_names(t.context());
            assert_eq!(
                d.describe_distribution(t),
                m.describe_distribution(m.table_by_names(&key).unwrap())
            );
        }
    }
}
