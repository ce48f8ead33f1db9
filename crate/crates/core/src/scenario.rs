//! Measurement scenarios, local and global assignments, and restriction.
//!
//! A scenario is stored by its maximal contexts only. Variables and outcomes
//! are referred to internally by index; names are kept for I/O.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub type VarId = usize;

/// A set of variables, stored sorted by canonical variable index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Context(Vec<VarId>);

impl Context {
    pub fn new(vars: impl IntoIterator<Item = VarId>) -> Self {
        let mut vars: Vec<VarId> = vars.into_iter().collect();
        vars.sort_unstable();
        vars.dedup();
        Context(vars)
    }

    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.0.binary_search(&var).is_ok()
    }

    pub fn position(&self, var: VarId) -> Option<usize> {
        self.0.binary_search(&var).ok()
    }

    pub fn is_subset(&self, other: &Context) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// `C ∩ D`.
    pub fn overlap(&self, other: &Context) -> Context {
        Context(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }
}

/// A joint outcome for a context: one outcome index per variable of the
/// context, aligned with `context.vars()`.
///
/// Assignments over the same context are ordered with the first variable
/// varying fastest, which matches the column order of the usual two-party
/// tables: (0,0), (1,0), (0,1), (1,1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    context: Context,
    values: Vec<usize>,
}

impl Assignment {
    /// Builds an assignment without consulting a scenario; `values` must be
    /// aligned with `context.vars()`.
    pub fn new(context: Context, values: Vec<usize>) -> Result<Self> {
        if context.len() != values.len() {
            return Err(Error::Scenario(format!(
                "assignment has {} values for a context of {} variables",
                values.len(),
                context.len()
            )));
        }
        Ok(Assignment { context, values })
    }

    pub fn empty() -> Self {
        Assignment {
            context: Context::empty(),
            values: Vec::new(),
        }
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value_of(&self, var: VarId) -> Option<usize> {
        self.context.position(var).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.context.vars().iter().copied().zip(self.values.iter().copied())
    }

    /// Function restriction `s|_sub`.
    pub fn restrict(&self, sub: &Context) -> Result<Assignment> {
        let mut values = Vec::with_capacity(sub.len());
        for &var in sub.vars() {
            match self.value_of(var) {
                Some(v) => values.push(v),
                None => {
                    return Err(Error::NotASubcontext {
                        sub: format!("{:?}", sub.vars()),
                        context: format!("{:?}", self.context.vars()),
                    })
                }
            }
        }
        Ok(Assignment {
            context: sub.clone(),
            values,
        })
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.context
            .cmp(&other.context)
            .then_with(|| self.values.iter().rev().cmp(other.values.iter().rev()))
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A total assignment of outcomes to every variable, indexed by `VarId`.
/// Ordered lexicographically with the first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalAssignment(pub Vec<usize>);

impl GlobalAssignment {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn restrict(&self, context: &Context) -> Assignment {
        Assignment {
            context: context.clone(),
            values: context.vars().iter().map(|&v| self.0[v]).collect(),
        }
    }
}

/// Equality ignores the load-time warnings.
#[derive(Clone, Debug)]
pub struct Scenario {
    variables: Vec<String>,
    contexts: Vec<Context>,
    outcomes: Vec<Vec<String>>,
    warnings: Vec<String>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables && self.contexts == other.contexts && self.outcomes == other.outcomes
    }
}

impl Eq for Scenario {}

impl Scenario {
    /// Validates and normalizes raw scenario data. `outcomes[i]` is the
    /// outcome list of `variables[i]`. Contexts contained in other contexts
    /// are dropped and recorded in [`Scenario::warnings`].
    pub fn new<V: AsRef<str>, C: AsRef<str>, O: AsRef<str>>(
        variables: &[V],
        contexts: &[Vec<C>],
        outcomes: &[Vec<O>],
    ) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::Scenario("empty variable set".into()));
        }
        let variables: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        let mut seen = HashSet::new();
        for v in &variables {
            if v.is_empty() || v.contains(',') || v.contains('=') {
                return Err(Error::Scenario(format!(
                    "variable name `{v}` must be nonempty and contain no ',' or '='"
                )));
            }
            if !seen.insert(v.as_str()) {
                return Err(Error::Scenario(format!("duplicate variable `{v}`")));
            }
        }
        if outcomes.len() != variables.len() {
            return Err(Error::Scenario(format!(
                "{} outcome sets for {} variables",
                outcomes.len(),
                variables.len()
            )));
        }
        let mut outcome_sets = Vec::with_capacity(outcomes.len());
        for (var, outs) in variables.iter().zip(outcomes) {
            if outs.is_empty() {
                return Err(Error::Scenario(format!("variable `{var}` has no outcomes")));
            }
            let outs: Vec<String> = outs.iter().map(|o| o.as_ref().to_string()).collect();
            let mut seen = HashSet::new();
            for o in &outs {
                if o.is_empty() || o.contains(',') {
                    return Err(Error::Scenario(format!(
                        "outcome label `{o}` of `{var}` must be nonempty and contain no ','"
                    )));
                }
                if !seen.insert(o.as_str()) {
                    return Err(Error::Scenario(format!("duplicate outcome `{o}` for `{var}`")));
                }
            }
            outcome_sets.push(outs);
        }

        let index_of = |name: &str| {
            variables
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut raw = Vec::with_capacity(contexts.len());
        for ctx in contexts {
            if ctx.is_empty() {
                return Err(Error::Scenario("empty context".into()));
            }
            let ids = ctx.iter().map(|n| index_of(n.as_ref())).collect::<Result<Vec<_>>>()?;
            raw.push(Context::new(ids));
        }
        let before = raw.len();
        raw.sort();
        raw.dedup();

        let mut warnings = Vec::new();
        if raw.len() < before {
            warnings.push("duplicate contexts were merged".into());
        }
        let mut maximal = Vec::with_capacity(raw.len());
        for (i, c) in raw.iter().enumerate() {
            let dominated = raw.iter().enumerate().any(|(j, d)| i != j && c.is_subset(d));
            if dominated {
                let names: Vec<&str> = c.vars().iter().map(|&v| variables[v].as_str()).collect();
                warnings.push(format!(
                    "context {{{}}} is contained in another context and was removed",
                    names.join(",")
                ));
            } else {
                maximal.push(c.clone());
            }
        }
        for (v, name) in variables.iter().enumerate() {
            if !maximal.iter().any(|c| c.contains(v)) {
                return Err(Error::Scenario(format!("variable `{name}` appears in no context")));
            }
        }

        Ok(Scenario {
            variables,
            contexts: maximal,
            outcomes: outcome_sets,
            warnings,
        })
    }

    /// Scenario where every variable shares the same outcome labels.
    pub fn with_shared_outcomes<S: AsRef<str>>(
        variables: &[S],
        contexts: &[Vec<S>],
        outcomes: &[S],
    ) -> Result<Self> {
        let per_var: Vec<Vec<&str>> = variables
            .iter()
            .map(|_| outcomes.iter().map(|o| o.as_ref()).collect())
            .collect();
        let contexts: Vec<Vec<&str>> = contexts
            .iter()
            .map(|c| c.iter().map(|v| v.as_ref()).collect())
            .collect();
        let variables: Vec<&str> = variables.iter().map(|v| v.as_ref()).collect();
        Scenario::new(&variables, &contexts, &per_var)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn outcomes(&self, var: VarId) -> &[String] {
        &self.outcomes[var]
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn outcome_id(&self, var: VarId, label: &str) -> Result<usize> {
        self.outcomes[var]
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::UnknownOutcome {
                variable: self.variables[var].clone(),
                outcome: label.to_string(),
            })
    }

    /// Context from variable names, in any order.
    pub fn context_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Context> {
        let ids = names.iter().map(|n| self.var_id(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(Context::new(ids))
    }

    pub fn full_context(&self) -> Context {
        Context::new(0..self.variables.len())
    }

    pub fn context_index(&self, context: &Context) -> Option<usize> {
        self.contexts.iter().position(|c| c == context)
    }

    fn check_context(&self, context: &Context) -> Result<()> {
        match context.vars().iter().find(|&&v| v >= self.variables.len()) {
            Some(v) => Err(Error::UnknownVariable(format!("#{v}"))),
            None => Ok(()),
        }
    }

    /// Assignment from `(variable, outcome)` label pairs.
    pub fn assignment<S: AsRef<str>>(&self, pairs: &[(S, S)]) -> Result<Assignment> {
        let mut cells = Vec::with_capacity(pairs.len());
        for (var, out) in pairs {
            let v = self.var_id(var.as_ref())?;
            cells.push((v, self.outcome_id(v, out.as_ref())?));
        }
        cells.sort_unstable();
        if cells.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Scenario("variable assigned twice".into()));
        }
        let context = Context::new(cells.iter().map(|c| c.0));
        Ok(Assignment {
            context,
            values: cells.into_iter().map(|c| c.1).collect(),
        })
    }

    /// Assignment over `context` from outcome labels listed in the
    /// context's canonical variable order.
    pub fn assignment_from_labels<S: AsRef<str>>(
        &self,
        context: &Context,
        labels: &[S],
    ) -> Result<Assignment> {
        self.check_context(context)?;
        if labels.len() != context.len() {
            return Err(Error::Format(format!(
                "expected {} outcome labels, got {}",
                context.len(),
                labels.len()
            )));
        }
        let values = context
            .vars()
            .iter()
            .zip(labels)
            .map(|(&v, l)| self.outcome_id(v, l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Assignment {
            context: context.clone(),
            values,
        })
    }

    pub fn global_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<GlobalAssignment> {
        let a = self.assignment_from_labels(&self.full_context(), labels)?;
        Ok(GlobalAssignment(a.values))
    }

    /// Number of joint outcomes `∏_{x∈C} |O_x|`, saturating at `u128::MAX`.
    pub fn assignment_count(&self, context: &Context) -> u128 {
        context
            .vars()
            .iter()
            .fold(1u128, |acc, &v| acc.saturating_mul(self.outcomes[v].len() as u128))
    }

    pub fn global_count(&self) -> u128 {
        self.assignment_count(&self.full_context())
    }

    /// All assignments over `context`, first variable varying fastest.
    pub fn enumerate_assignments(&self, context: &Context) -> Result<Vec<Assignment>> {
        self.check_context(context)?;
        let radices: Vec<usize> = context.vars().iter().map(|&v| self.outcomes[v].len()).collect();
        let total = self.assignment_count(context);
        let mut out = Vec::with_capacity(usize::try_from(total).unwrap_or(0).min(1 << 24));
        let mut values = vec![0usize; radices.len()];
        loop {
            out.push(Assignment {
                context: context.clone(),
                values: values.clone(),
            });
            let mut i = 0;
            loop {
                if i == radices.len() {
                    return Ok(out);
                }
                values[i] += 1;
                if values[i] < radices[i] {
                    break;
                }
                values[i] = 0;
                i += 1;
            }
        }
    }

    /// All global assignments in lexicographic order (first variable most
    /// significant).
    pub fn enumerate_globals(&self) -> Vec<GlobalAssignment> {
        let radices: Vec<usize> = self.outcomes.iter().map(Vec::len).collect();
        let mut out = Vec::new();
        let mut values = vec![0usize; radices.len()];
        loop {
            out.push(GlobalAssignment(values.clone()));
            let mut i = radices.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                values[i] += 1;
                if values[i] < radices[i] {
                    break;
                }
                values[i] = 0;
            }
        }
    }

    pub fn context_names(&self, context: &Context) -> Vec<&str> {
        context.vars().iter().map(|&v| self.variables[v].as_str()).collect()
    }

    /// Comma-joined variable names, e.g. `a1,b1`.
    pub fn context_key(&self, context: &Context) -> String {
        self.context_names(context).join(",")
    }

    /// Comma-joined outcome labels in context order, e.g. `0,1`.
    pub fn assignment_key(&self, assignment: &Assignment) -> String {
        assignment
            .iter()
            .map(|(v, o)| self.outcomes[v][o].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// `a1=0,b1=1` form.
    pub fn describe_assignment(&self, assignment: &Assignment) -> String {
        assignment
            .iter()
            .map(|(v, o)| format!("{}={}", self.variables[v], self.outcomes[v][o]))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn describe_global(&self, global: &GlobalAssignment) -> String {
        self.describe_assignment(&global.restrict(&self.full_context()))
    }

    /// Same scenario with variables renamed; canonical order is unchanged.
    pub fn rename(&self, rename: impl Fn(&str) -> String) -> Result<Scenario> {
        let variables: Vec<String> = self.variables.iter().map(|v| rename(v)).collect();
        let contexts: Vec<Vec<String>> = self
            .contexts
            .iter()
            .map(|c| c.vars().iter().map(|&v| variables[v].clone()).collect())
            .collect();
        Scenario::new(&variables, &contexts, &self.outcomes)
    }

    /// Same scenario with a different canonical variable order.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Scenario> {
        if order.len() != self.variables.len() {
            return Err(Error::Scenario("reorder must list every variable once".into()));
        }
        let ids = order.iter().map(|n| self.var_id(n.as_ref())).collect::<Result<Vec<_>>>()?;
        let variables: Vec<&str> = ids.iter().map(|&v| self.variables[v].as_str()).collect();
        let outcomes: Vec<Vec<String>> = ids.iter().map(|&v| self.outcomes[v].clone()).collect();
        let contexts: Vec<Vec<&str>> = self.contexts.iter().map(|c| self.context_names(c)).collect();
        Scenario::new(&variables, &contexts, &outcomes)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctxs: Vec<String> = self
            .contexts
            .iter()
            .map(|c| format!("{{{}}}", self.context_key(c)))
            .collect();
        write!(f, "X = {{{}}}, Cont = {}", self.variables.join(","), ctxs.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bell() -> Scenario {
        Scenario::with_shared_outcomes(
            &["a1", "a2", "b1", "b2"],
            &[
                vec!["a1", "b1"],
                vec!["a2", "b1"],
                vec!["a1", "b2"],
                vec!["a2", "b2"],
            ],
            &["0", "1"],
        )
        .unwrap()
    }

    #[test]
    fn bell_scenario_is_sorted() {
        let s = bell();
        let keys: Vec<String> = s.contexts().iter().map(|c| s.context_key(c)).collect();
        assert_eq!(keys, ["a1,b1", "a1,b2", "a2,b1", "a2,b2"]);
        assert!(s.warnings().is_empty());
    }

    #[test]
    fn singleton_scenario() {
        let s = Scenario::new(&["x"], &[vec!["x"]], &[vec!["0"]]).unwrap();
        assert_eq!(s.contexts().len(), 1);
        assert_eq!(s.global_count(), 1);
    }

    #[test]
    fn antichain_normalization_warns() {
        let s = Scenario::with_shared_outcomes(&["a", "b"], &[vec!["a", "b"], vec!["a"]], &["0", "1"])
            .unwrap();
        assert_eq!(s.contexts().len(), 1);
        assert_eq!(s.context_key(&s.contexts()[0]), "a,b");
        assert_eq!(s.warnings().len(), 1);
    }

    #[test]
    fn construction_errors() {
        let none: [Vec<&str>; 0] = [];
        assert!(Scenario::new(&[] as &[&str], &none, &none).is_err());
        assert!(matches!(
            Scenario::with_shared_outcomes(&["a"], &[vec!["a", "z"]], &["0"]),
            Err(Error::UnknownVariable(_))
        ));
        assert!(Scenario::new(&["a"], &[vec!["a"]], &[Vec::<&str>::new()]).is_err());
        assert!(Scenario::with_shared_outcomes(&["a", "b"], &[vec!["a"]], &["0"]).is_err());
    }

    #[test]
    fn enumerates_bell_columns_in_table_order() {
        let s = bell();
        let ctx = s.context_of(&["a1", "b1"]).unwrap();
        let keys: Vec<String> = s
            .enumerate_assignments(&ctx)
            .unwrap()
            .iter()
            .map(|a| s.assignment_key(a))
            .collect();
        assert_eq!(keys, ["0,0", "1,0", "0,1", "1,1"]);
    }

    #[test]
    fn empty_context_has_one_assignment() {
        let s = bell();
        let all = s.enumerate_assignments(&Context::empty()).unwrap();
        assert_eq!(all, vec![Assignment::empty()]);
    }

    #[test]
    fn three_binary_variables_have_eight_assignments() {
        let s = Scenario::with_shared_outcomes(&["x", "y", "z"], &[vec!["x", "y", "z"]], &["0", "1"])
            .unwrap();
        let all = s.enumerate_assignments(&s.full_context()).unwrap();
        // brute-force product oracle
        let mut oracle = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    oracle.push(vec![x, y, z]);
                }
            }
        }
        let mut got: Vec<Vec<usize>> = all.iter().map(|a| a.values().to_vec()).collect();
        got.sort();
        assert_eq!(got, oracle);
    }

    #[test]
    fn restriction_and_overlap() {
        let s = bell();
        let a = s.assignment(&[("a1", "0"), ("b1", "0")]).unwrap();
        let a1 = s.context_of(&["a1"]).unwrap();
        assert_eq!(a.restrict(&a1).unwrap(), s.assignment(&[("a1", "0")]).unwrap());
        assert_eq!(a.restrict(a.context()).unwrap(), a);
        let b2 = s.context_of(&["b2"]).unwrap();
        assert!(matches!(a.restrict(&b2), Err(Error::NotASubcontext { .. })));

        let c = s.context_of(&["a1", "b1"]).unwrap();
        let d = s.context_of(&["a1", "b2"]).unwrap();
        assert_eq!(c.overlap(&d), a1);
        assert_eq!(c.overlap(&c), c);
        let e = s.context_of(&["a2", "b2"]).unwrap();
        assert!(c.overlap(&e).is_empty());
    }

    proptest! {
        #[test]
        fn restriction_is_functorial(
            values in proptest::collection::vec(0usize..3, 5),
            mask_d in 0u32..32,
            mask_c in 0u32..32,
        ) {
            let e = Context::new(0..5);
            let d = Context::new((0..5).filter(|i| mask_d & (1 << i) != 0));
            let c = Context::new(d.vars().iter().copied().filter(|i| mask_c & (1 << i) != 0));
            let s = Assignment::new(e.clone(), values).unwrap();
            let two_step = s.restrict(&d).unwrap().restrict(&c).unwrap();
            prop_assert_eq!(two_step, s.restrict(&c).unwrap());
            prop_assert_eq!(s.restrict(&e).unwrap(), s);
        }

        #[test]
        fn enumeration_count_matches_product(sizes in proptest::collection::vec(1usize..4, 1..5)) {
            let vars: Vec<String> = (0..sizes.len()).map(|i| format!("v{i}")).collect();
            let outcomes: Vec<Vec<String>> =
                sizes.iter().map(|&n| (0..n).map(|o| o.to_string()).collect()).collect();
            let s = Scenario::new(&vars, std::slice::from_ref(&vars), &outcomes).unwrap();
            let all = s.enumerate_assignments(&s.full_context()).unwrap();
            let distinct: HashSet<_> = all.iter().cloned().collect();
            prop_assert_eq!(all.len(), sizes.iter().product::<usize>());
            prop_assert_eq!(distinct.len(), all.len());
            prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
