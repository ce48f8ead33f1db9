//! Deciding contextuality: global sections over the rationals (LP
//! feasibility), over the booleans (consistent global assignments), strong
//! contextuality, and signed global sections.

pub mod linear;
pub mod search;
pub mod simplex;

use num::{One, Signed, Zero};

use crate::distribution::{Distribution, Semiring};
use crate::error::{Error, Result};
use crate::model::EmpiricalModel;
use crate::rational::Rational;
use crate::scenario::{Assignment, GlobalAssignment, Scenario};

pub use search::SupportConstraints;

pub const DEFAULT_COLUMN_CAP: u128 = 1 << 20;

/// The marginal equations `M x = e` of a model: one row per
/// (maximal context, joint outcome), one column per global assignment.
#[derive(Clone, Debug)]
pub struct IncidenceSystem {
    /// `(context index, joint outcome)`, contexts in scenario order and
    /// outcomes in enumeration order.
    pub rows: Vec<(usize, Assignment)>,
    pub columns: Vec<GlobalAssignment>,
    /// Row hit by each column in each context block.
    column_hits: Vec<Vec<usize>>,
    pub rhs: Vec<Rational>,
}

impl IncidenceSystem {
    pub fn entry(&self, row: usize, column: usize) -> bool {
        self.column_hits[column].binary_search(&row).is_ok()
    }

    pub fn column_hits(&self, column: usize) -> &[usize] {
        &self.column_hits[column]
    }

    pub fn dense(&self) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![Rational::zero(); self.columns.len()]; self.rows.len()];
        for (c, hits) in self.column_hits.iter().enumerate() {
            for &r in hits {
                m[r][c] = Rational::one();
            }
        }
        m
    }

    /// `M x`.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows.len()];
        for (c, hits) in self.column_hits.iter().enumerate() {
            if x[c].is_zero() {
                continue;
            }
            for &r in hits {
                out[r] += &x[c];
            }
        }
        out
    }

    /// `M x − e`.
    pub fn residual(&self, x: &[Rational]) -> Vec<Rational> {
        self.apply(x).into_iter().zip(&self.rhs).map(|(l, r)| l - r).collect()
    }
}

/// A solution of the marginal equations with entries of either sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSection {
    pub columns: Vec<GlobalAssignment>,
    pub values: Vec<Rational>,
}

impl SignedSection {
    pub fn has_negative_entry(&self) -> bool {
        self.values.iter().any(Signed::is_negative)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&GlobalAssignment, &Rational)> {
        self.columns.iter().zip(&self.values).filter(|(_, v)| !v.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextualityReport {
    pub semiring: Semiring,
    pub probabilistically_contextual: bool,
    pub possibilistically_contextual: bool,
    pub strongly_contextual: bool,
    /// A global distribution in the model's semiring whose marginals are the
    /// model's tables; present iff the model is not contextual in its own
    /// semiring.
    pub global_section: Option<Distribution>,
    /// First supported local assignment that extends to no consistent
    /// global assignment.
    pub witness_section: Option<Assignment>,
    /// `|S_e(X)|`.
    pub consistent_global_count: u128,
}

impl ContextualityReport {
    /// 0 for non-contextual, 1/2/3 for probabilistic/possibilistic/strong.
    pub fn level(&self) -> u8 {
        if self.strongly_contextual {
            3
        } else if self.possibilistically_contextual {
            2
        } else if self.probabilistically_contextual {
            1
        } else {
            0
        }
    }
}

/// Analysis entry points with a configurable incidence-column cap.
#[derive(Clone, Copy, Debug)]
pub struct Analyzer {
    pub column_cap: u128,
}

impl Default for Analyzer {
    fn default() -> Self {
        Analyzer {
            column_cap: DEFAULT_COLUMN_CAP,
        }
    }
}

impl Analyzer {
    pub fn with_cap(column_cap: u128) -> Self {
        Analyzer { column_cap }
    }

    pub fn build_incidence(&self, model: &EmpiricalModel) -> Result<IncidenceSystem> {
        let s = model.scenario();
        let required = s.global_count();
        if required > self.column_cap {
            return Err(Error::ColumnCap {
                required,
                cap: self.column_cap,
            });
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut offsets = Vec::with_capacity(s.contexts().len());
        for (i, ctx) in s.contexts().iter().enumerate() {
            offsets.push(rows.len());
            for a in s.enumerate_assignments(ctx)? {
                rhs.push(model.tables()[i].weight(&a));
                rows.push((i, a));
            }
        }
        let columns = s.enumerate_globals();
        let column_hits = columns
            .iter()
            .map(|g| {
                s.contexts()
                    .iter()
                    .zip(&offsets)
                    .map(|(ctx, &off)| off + block_index(s, ctx.vars(), g))
                    .collect()
            })
            .collect();
        Ok(IncidenceSystem {
            rows,
            columns,
            column_hits,
            rhs,
        })
    }

    /// A probability distribution on all global assignments whose marginals
    /// are the model's tables, or `None` when the model is contextual.
    pub fn probabilistic_global_section(&self, model: &EmpiricalModel) -> Result<Option<Distribution>> {
        model.require(Semiring::Rational)?;
        model.ensure_compatible()?;
        let system = self.build_incidence(model)?;
        let Some(x) = simplex::find_nonnegative(&system.dense(), &system.rhs) else {
            return Ok(None);
        };
        let full = model.scenario().full_context();
        let cells = system
            .columns
            .iter()
            .zip(x)
            .map(|(g, w)| (g.restrict(&full), w))
            .collect::<Vec<_>>();
        Ok(Some(Distribution::new(Semiring::Rational, full, cells)?))
    }

    /// Solves the marginal equations with no sign constraint.
    pub fn signed_global_section(&self, model: &EmpiricalModel) -> Result<SignedSection> {
        model.require(Semiring::Rational)?;
        model.ensure_compatible()?;
        let system = self.build_incidence(model)?;
        let values = linear::solve(&system.dense(), &system.rhs).ok_or(Error::NoSignedSolution)?;
        Ok(SignedSection {
            columns: system.columns,
            values,
        })
    }

    /// Decides all three levels and assembles the report.
    pub fn classify(&self, model: &EmpiricalModel) -> Result<ContextualityReport> {
        let violations = model.validate();
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        model.ensure_compatible()?;
        let boolean = model.to_boolean();
        let witness_section = possibilistic_contextuality(&boolean);
        let constraints = SupportConstraints::from_model(&boolean);
        let consistent_global_count = constraints.count();
        let strongly_contextual = consistent_global_count == 0;
        let possibilistically_contextual = witness_section.is_some();

        let (probabilistically_contextual, global_section) = match model.semiring() {
            Semiring::Rational => {
                let section = self.probabilistic_global_section(model)?;
                (section.is_none(), section)
            }
            Semiring::Boolean => {
                let section = (!possibilistically_contextual)
                    .then(|| boolean_global_section(model.scenario(), &constraints))
                    .transpose()?;
                (possibilistically_contextual, section)
            }
        };

        assert!(
            !strongly_contextual || possibilistically_contextual,
            "strong contextuality without a possibilistic witness"
        );
        assert!(
            !possibilistically_contextual || probabilistically_contextual,
            "possibilistically contextual model with a probabilistic global section"
        );

        Ok(ContextualityReport {
            semiring: model.semiring(),
            probabilistically_contextual,
            possibilistically_contextual,
            strongly_contextual,
            global_section,
            witness_section,
            consistent_global_count,
        })
    }
}

/// Position of `g|_C` in the enumeration order of `C` (first variable
/// varying fastest).
fn block_index(s: &Scenario, vars: &[usize], g: &GlobalAssignment) -> usize {
    let mut index = 0;
    let mut stride = 1;
    for &v in vars {
        index += g.0[v] * stride;
        stride *= s.outcomes(v).len();
    }
    index
}

/// The boolean distribution on `S_e(X)`.
fn boolean_global_section(scenario: &Scenario, constraints: &SupportConstraints) -> Result<Distribution> {
    let full = scenario.full_context();
    Distribution::boolean_set(full.clone(), constraints.all().iter().map(|g| g.restrict(&full)))
}

pub fn build_incidence(model: &EmpiricalModel) -> Result<IncidenceSystem> {
    Analyzer::default().build_incidence(model)
}

pub fn probabilistic_global_section(model: &EmpiricalModel) -> Result<Option<Distribution>> {
    Analyzer::default().probabilistic_global_section(model)
}

pub fn signed_global_section(model: &EmpiricalModel) -> Result<SignedSection> {
    Analyzer::default().signed_global_section(model)
}

pub fn classify(model: &EmpiricalModel) -> Result<ContextualityReport> {
    Analyzer::default().classify(model)
}

/// `S_e(X)`: global assignments whose restriction to every maximal context
/// is supported. Rational models are collapsed first.
pub fn consistent_globals(model: &EmpiricalModel) -> Vec<GlobalAssignment> {
    SupportConstraints::from_model(&model.to_boolean()).all()
}

/// The first supported local assignment (contexts in scenario order,
/// outcomes in enumeration order) that no consistent global assignment
/// restricts to.
pub fn possibilistic_contextuality(model: &EmpiricalModel) -> Option<Assignment> {
    let boolean = model.to_boolean();
    let constraints = SupportConstraints::from_model(&boolean);
    let n = boolean.scenario().var_count();
    for table in boolean.tables() {
        for s in table.support_set() {
            let mut fixed = vec![None; n];
            for (v, o) in s.iter() {
                fixed[v] = Some(o);
            }
            if constraints.first(&fixed).is_none() {
                return Some(s.clone());
            }
        }
    }
    None
}

/// `S_e(X) = ∅`.
pub fn strong_contextuality(model: &EmpiricalModel) -> bool {
    let boolean = model.to_boolean();
    let n = boolean.scenario().var_count();
    SupportConstraints::from_model(&boolean).first(&vec![None; n]).is_none()
}
