//! Exact contextuality analysis of empirical models.

pub mod analysis;
pub mod bundle;
pub mod cli;
pub mod corpus;
pub mod distribution;
pub mod error;
pub mod json;
pub mod logical_bell;
pub mod model;
pub mod quantum;
pub mod rational;
pub mod scenario;

pub use analysis::{classify, Analyzer, ContextualityReport};
pub use distribution::{Distribution, Semiring};
pub use error::{Error, Result};
pub use model::EmpiricalModel;
pub use rational::Rational;
pub use scenario::{Assignment, Context, GlobalAssignment, Scenario};
