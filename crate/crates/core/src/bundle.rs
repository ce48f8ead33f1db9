//! Bundle diagrams of rank-2 models.
//!
//! Base vertices are the variables and base edges the two-variable
//! contexts. Over each variable sits the fibre of its outcomes, and a bundle
//! edge joins two outcomes when that joint outcome is possible. A univocal
//! closed path picks one outcome per fibre using only bundle edges, which is
//! exactly a global assignment consistent with every support.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::analysis::search::SupportConstraints;
use crate::error::{Error, Result};
use crate::model::EmpiricalModel;
use crate::scenario::{Assignment, Context, GlobalAssignment, Scenario, VarId};

/// A possible joint outcome over one base edge, values in context order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BundleEdge {
    pub base: Context,
    pub values: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleDiagram {
    scenario: Scenario,
    base_edges: Vec<Context>,
    bundle_edges: Vec<BTreeSet<(usize, usize)>>,
}

/// Rational models are collapsed to their supports first.
pub fn build_bundle(model: &EmpiricalModel) -> Result<BundleDiagram> {
    let boolean = model.to_boolean();
    let scenario = boolean.scenario().clone();
    if scenario.contexts().iter().any(|c| c.len() != 2) {
        return Err(Error::Bundle("bundle view requires rank-2 scenarios".into()));
    }
    let bundle_edges = boolean
        .tables()
        .iter()
        .map(|t| t.support_set().map(|a| (a.values()[0], a.values()[1])).collect())
        .collect();
    Ok(BundleDiagram {
        base_edges: scenario.contexts().to_vec(),
        scenario,
        bundle_edges,
    })
}

impl BundleDiagram {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn base_vertices(&self) -> impl Iterator<Item = VarId> {
        0..self.scenario.var_count()
    }

    pub fn base_edges(&self) -> &[Context] {
        &self.base_edges
    }

    pub fn fibre(&self, var: VarId) -> &[String] {
        self.scenario.outcomes(var)
    }

    /// Outcome pairs over the `i`-th base edge.
    pub fn edges_over(&self, i: usize) -> &BTreeSet<(usize, usize)> {
        &self.bundle_edges[i]
    }

    pub fn bundle_edges(&self) -> impl Iterator<Item = BundleEdge> + '_ {
        self.base_edges.iter().zip(&self.bundle_edges).flat_map(|(base, pairs)| {
            pairs.iter().map(|&values| BundleEdge {
                base: base.clone(),
                values,
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.bundle_edges.iter().map(BTreeSet::len).sum()
    }

    pub fn contains(&self, edge: &BundleEdge) -> bool {
        self.base_edges
            .iter()
            .position(|b| b == &edge.base)
            .is_some_and(|i| self.bundle_edges[i].contains(&edge.values))
    }

    /// Parses `x=o,y=p` into a bundle edge of this diagram.
    pub fn parse_edge(&self, text: &str) -> Result<BundleEdge> {
        let pairs = text
            .split(',')
            .map(|part| {
                part.split_once('=')
                    .map(|(v, o)| (v.trim(), o.trim()))
                    .ok_or_else(|| Error::Bundle(format!("edge `{text}` must look like `x=0,y=1`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let a = self.scenario.assignment(&pairs)?;
        self.edge_of(&a)
            .ok_or_else(|| Error::Bundle(format!("`{text}` is not a bundle edge")))
    }

    fn edge_of(&self, a: &Assignment) -> Option<BundleEdge> {
        if a.values().len() != 2 {
            return None;
        }
        let edge = BundleEdge {
            base: a.context().clone(),
            values: (a.values()[0], a.values()[1]),
        };
        self.contains(&edge).then_some(edge)
    }

    pub fn describe_edge(&self, edge: &BundleEdge) -> String {
        let a = Assignment::new(edge.base.clone(), vec![edge.values.0, edge.values.1]).expect("rank-2 edge");
        self.scenario.describe_assignment(&a)
    }

    /// The bundle edges a global assignment runs along.
    pub fn path_edges(&self, global: &GlobalAssignment) -> Vec<BundleEdge> {
        self.base_edges
            .iter()
            .map(|base| {
                let r = global.restrict(base);
                BundleEdge {
                    base: base.clone(),
                    values: (r.values()[0], r.values()[1]),
                }
            })
            .collect()
    }

    fn constraints(&self) -> SupportConstraints {
        let radices = self.base_vertices().map(|v| self.fibre(v).len()).collect();
        let constraints = self
            .base_edges
            .iter()
            .zip(&self.bundle_edges)
            .map(|(base, pairs)| {
                let allowed: HashSet<Vec<usize>> = pairs.iter().map(|&(x, y)| vec![x, y]).collect();
                (base.clone(), allowed)
            })
            .collect();
        SupportConstraints::new(radices, constraints)
    }

    fn ensure_connected(&self) -> Result<()> {
        let n = self.scenario.var_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in self.base_edges.iter().filter(|e| e.contains(v)) {
                for &w in e.vars() {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        match seen.iter().position(|s| !s) {
            None => Ok(()),
            Some(v) => Err(Error::Bundle(format!(
                "base graph is disconnected: `{}` is unreachable from `{}`",
                self.scenario.variables()[v],
                self.scenario.variables()[0]
            ))),
        }
    }
}

/// Lexicographically first univocal closed path, if any.
pub fn find_univocal_cycle(diagram: &BundleDiagram) -> Result<Option<GlobalAssignment>> {
    diagram.ensure_connected()?;
    let n = diagram.scenario.var_count();
    Ok(diagram.constraints().first(&vec![None; n]))
}

/// First univocal closed path running along `edge`.
pub fn extend_edge(diagram: &BundleDiagram, edge: &BundleEdge) -> Result<Option<GlobalAssignment>> {
    if !diagram.contains(edge) {
        return Err(Error::Bundle(format!(
            "no bundle edge {:?} over {{{}}}",
            edge.values,
            diagram.scenario.context_key(&edge.base)
        )));
    }
    diagram.ensure_connected()?;
    let mut fixed = vec![None; diagram.scenario.var_count()];
    fixed[edge.base.vars()[0]] = Some(edge.values.0);
    fixed[edge.base.vars()[1]] = Some(edge.values.1);
    Ok(diagram.constraints().first(&fixed))
}

/// Follows bundle edges along the base walk `walk`, starting from
/// `walk[0] = seed`. Every step must be forced: exactly one outcome of the
/// next fibre is joined to the current one. Returns the value reached at
/// each position of the walk.
pub fn propagate(diagram: &BundleDiagram, walk: &[VarId], seed: usize) -> Result<Vec<usize>> {
    let s = &diagram.scenario;
    let first = *walk.first().ok_or_else(|| Error::Bundle("empty walk".into()))?;
    if seed >= s.outcomes(first).len() {
        return Err(Error::Bundle(format!("seed {seed} is not an outcome of `{}`", s.variables()[first])));
    }
    let mut values = vec![seed];
    for step in walk.windows(2) {
        let (u, w) = (step[0], step[1]);
        let base = Context::new([u, w]);
        let i = diagram.base_edges.iter().position(|b| b == &base).ok_or_else(|| {
            Error::Bundle(format!(
                "`{}` and `{}` are not joined by a base edge",
                s.variables()[u],
                s.variables()[w]
            ))
        })?;
        let x = *values.last().expect("nonempty");
        let u_first = base.vars()[0] == u;
        let next: Vec<usize> = diagram.bundle_edges[i]
            .iter()
            .filter_map(|&(a, b)| match u_first {
                true if a == x => Some(b),
                false if b == x => Some(a),
                _ => None,
            })
            .collect();
        match next.as_slice() {
            [y] => values.push(*y),
            _ => {
                return Err(Error::Bundle(format!(
                    "{}={} does not force a unique value of `{}` ({} candidates)",
                    s.variables()[u],
                    s.outcomes(u)[x],
                    s.variables()[w],
                    next.len()
                )))
            }
        }
    }
    Ok(values)
}

/// Graphviz text: one cluster per fibre, the base graph as its own
/// subgraph, bundle edges between clusters. `highlights` get `penwidth=3`.
pub fn emit_dot(diagram: &BundleDiagram, highlights: &[BundleEdge]) -> Result<String> {
    if let Some(h) = highlights.iter().find(|h| !diagram.contains(h)) {
        return Err(Error::Bundle(format!(
            "highlight {:?} over {{{}}} is not a bundle edge",
            h.values,
            diagram.scenario.context_key(&h.base)
        )));
    }
    let s = &diagram.scenario;
    let name = |v: VarId| &s.variables()[v];
    let node = |v: VarId, o: usize| quote(&format!("{}_{}", name(v), s.outcomes(v)[o]));

    let mut out = String::new();
    out.push_str("graph bundle {\n  rankdir=BT;\n  node [shape=circle];\n");
    for v in diagram.base_vertices() {
        let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{}", name(v))));
        let _ = writeln!(out, "    label={};", quote(name(v)));
        for (o, label) in diagram.fibre(v).iter().enumerate() {
            let _ = writeln!(out, "    {} [label={}];", node(v, o), quote(label));
        }
        out.push_str("  }\n");
    }
    out.push_str("  subgraph base {\n    node [shape=box];\n");
    for v in diagram.base_vertices() {
        let _ = writeln!(out, "    {} [label={}];", quote(&format!("base_{}", name(v))), quote(name(v)));
    }
    for base in &diagram.base_edges {
        let [x, y] = [base.vars()[0], base.vars()[1]];
        let _ = writeln!(
            out,
            "    {} -- {};",
            quote(&format!("base_{}", name(x))),
            quote(&format!("base_{}", name(y)))
        );
    }
    out.push_str("  }\n");
    for edge in diagram.bundle_edges() {
        let [x, y] = [edge.base.vars()[0], edge.base.vars()[1]];
        let style = if highlights.contains(&edge) { " [penwidth=3]" } else { "" };
        let _ = writeln!(out, "  {} -- {}{};", node(x, edge.values.0), node(y, edge.values.1), style);
    }
    out.push_str("}\n");
    Ok(out)
}

fn quote(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}
