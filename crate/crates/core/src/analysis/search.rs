//! Depth-first search for global assignments consistent with a family of
//! per-context supports.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::model::EmpiricalModel;
use crate::scenario::{Context, GlobalAssignment};

/// Allowed joint outcomes per context, indexed for pruning.
#[derive(Clone, Debug)]
pub struct SupportConstraints {
    radices: Vec<usize>,
    constraints: Vec<(Context, HashSet<Vec<usize>>)>,
    /// `completes_at[v]`: constraints whose highest variable is `v`.
    completes_at: Vec<Vec<usize>>,
}

impl SupportConstraints {
    pub fn new(radices: Vec<usize>, constraints: Vec<(Context, HashSet<Vec<usize>>)>) -> Self {
        let mut completes_at = vec![Vec::new(); radices.len()];
        for (i, (ctx, _)) in constraints.iter().enumerate() {
            if let Some(&last) = ctx.vars().last() {
                completes_at[last].push(i);
            }
        }
        SupportConstraints {
            radices,
            constraints,
            completes_at,
        }
    }

    /// One constraint per table: the table's support.
    pub fn from_model(model: &EmpiricalModel) -> Self {
        let s = model.scenario();
        let radices = (0..s.var_count()).map(|v| s.outcomes(v).len()).collect();
        let constraints = model
            .tables()
            .iter()
            .map(|t| {
                let allowed = t.support_set().map(|a| a.values().to_vec()).collect();
                (t.context().clone(), allowed)
            })
            .collect();
        SupportConstraints::new(radices, constraints)
    }

    /// Visits every consistent global assignment agreeing with `fixed`, in
    /// lexicographic order (variables in canonical order, outcomes in
    /// outcome-set order). The visitor may stop the search early.
    pub fn visit<B>(
        &self,
        fixed: &[Option<usize>],
        mut visitor: impl FnMut(&GlobalAssignment) -> ControlFlow<B>,
    ) -> Option<B> {
        let n = self.radices.len();
        debug_assert_eq!(fixed.len(), n);
        let mut current = GlobalAssignment(vec![0; n]);
        match self.descend(0, fixed, &mut current, &mut visitor) {
            ControlFlow::Break(b) => Some(b),
            ControlFlow::Continue(()) => None,
        }
    }

    fn descend<B>(
        &self,
        var: usize,
        fixed: &[Option<usize>],
        current: &mut GlobalAssignment,
        visitor: &mut impl FnMut(&GlobalAssignment) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if var == self.radices.len() {
            return visitor(current);
        }
        let range = match fixed[var] {
            Some(v) => v..v + 1,
            None => 0..self.radices[var],
        };
        for value in range {
            current.0[var] = value;
            let ok = self.completes_at[var].iter().all(|&i| {
                let (ctx, allowed) = &self.constraints[i];
                let key: Vec<usize> = ctx.vars().iter().map(|&v| current.0[v]).collect();
                allowed.contains(&key)
            });
            if ok {
                self.descend(var + 1, fixed, current, visitor)?;
            }
        }
        ControlFlow::Continue(())
    }

    pub fn all(&self) -> Vec<GlobalAssignment> {
        let mut out = Vec::new();
        let free = vec![None; self.radices.len()];
        self.visit::<()>(&free, |g| {
            out.push(g.clone());
            ControlFlow::Continue(())
        });
        out
    }

    pub fn count(&self) -> u128 {
        let mut n = 0u128;
        let free = vec![None; self.radices.len()];
        self.visit::<()>(&free, |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    /// First consistent global assignment agreeing with `fixed`.
    pub fn first(&self, fixed: &[Option<usize>]) -> Option<GlobalAssignment> {
        self.visit(fixed, |g| ControlFlow::Break(g.clone()))
    }
}
