//! Model generators and independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ctx_core::corpus;
use ctx_core::distribution::{Distribution, Semiring};
use ctx_core::model::EmpiricalModel;
use ctx_core::rational::{int, ratio, Rational};
use ctx_core::scenario::{Assignment, Context, GlobalAssignment, Scenario};
use num::rational::Ratio;
use num::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector of length `n`; each entry is nonzero with
/// probability `density`, and at least one entry is.
pub fn random_weights(rng: &mut impl Rng, n: usize, density: f64) -> Vec<Rational> {
    let mut raw: Vec<i64> = (0..n)
        .map(|_| if rng.gen_bool(density) { rng.gen_range(1..=9) } else { 0 })
        .collect();
    if raw.iter().all(|&w| w == 0) {
        raw[rng.gen_range(0..n)] = rng.gen_range(1..=9);
    }
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| ratio(w, total)).collect()
}

pub fn random_distribution(rng: &mut impl Rng, scenario: &Scenario, context: &Context) -> Distribution {
    let cells = scenario.enumerate_assignments(context).unwrap();
    let density = rng.gen_range(0.2..=1.0);
    let weights = random_weights(rng, cells.len(), density);
    Distribution::new(Semiring::Rational, context.clone(), cells.into_iter().zip(weights)).unwrap()
}

/// Non-contextual by construction.
pub fn random_global_model(rng: &mut impl Rng, scenario: &Scenario) -> EmpiricalModel {
    let g = random_distribution(rng, scenario, &scenario.full_context());
    EmpiricalModel::from_global(scenario, &g).unwrap()
}

/// Independent random tables, usually signalling.
pub fn random_table_model(rng: &mut impl Rng, scenario: &Scenario) -> EmpiricalModel {
    let tables = scenario
        .contexts()
        .iter()
        .map(|c| random_distribution(rng, scenario, c))
        .collect();
    EmpiricalModel::new(scenario.clone(), Semiring::Rational, tables).unwrap()
}

/// 2–4 variables with 2–3 outcomes and random contexts of size 1–3.
pub fn random_scenario(rng: &mut impl Rng) -> Scenario {
    let n = rng.gen_range(2..=4);
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let outcomes: Vec<Vec<String>> = (0..n)
        .map(|_| {
            let k = if rng.gen_bool(0.7) { 2 } else { 3 };
            (0..k).map(|o| o.to_string()).collect()
        })
        .collect();
    let mut contexts: Vec<Vec<String>> = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let size = rng.gen_range(1..=n.min(3));
        let mut pick = names.clone();
        pick.shuffle(rng);
        pick.truncate(size);
        contexts.push(pick);
    }
    for name in &names {
        if !contexts.iter().flatten().any(|v| v == name) {
            contexts.push(vec![name.clone()]);
        }
    }
    Scenario::new(&names, &contexts, &outcomes).unwrap()
}

fn bipartite_rational(rows: [[i64; 4]; 4], denom: i64) -> EmpiricalModel {
    let s = corpus::bell().scenario().clone();
    let tables = s
        .contexts()
        .iter()
        .zip(rows)
        .map(|(c, row)| {
            let cells = s.enumerate_assignments(c).unwrap().into_iter().zip(row.map(|w| ratio(w, denom)));
            Distribution::new(Semiring::Rational, c.clone(), cells).unwrap()
        })
        .collect();
    EmpiricalModel::new(s, Semiring::Rational, tables).unwrap()
}

/// PR box with uniform weights.
pub fn pr_rational() -> EmpiricalModel {
    corpus::pr_box().uniform_on_support().unwrap()
}

/// a1b1 correlated, the other three rows anticorrelated. Its supports sit
/// inside Hardy's.
pub fn hardy_pr_variant() -> EmpiricalModel {
    bipartite_rational([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [0, 1, 1, 0]], 2)
}

/// Uniform distribution over Hardy's consistent global assignments.
pub fn hardy_global() -> EmpiricalModel {
    let hardy = corpus::hardy();
    let s = hardy.scenario().clone();
    let globals = ctx_core::analysis::consistent_globals(&hardy);
    let w = ratio(1, globals.len() as i64);
    let full = s.full_context();
    let g = Distribution::new(
        Semiring::Rational,
        full.clone(),
        globals.iter().map(|g| (g.restrict(&full), w.clone())),
    )
    .unwrap();
    EmpiricalModel::from_global(&s, &g).unwrap()
}

/// A compatible rational model with exactly Hardy's support pattern.
pub fn hardy_rational() -> EmpiricalModel {
    EmpiricalModel::mixture(&[hardy_pr_variant(), hardy_global()], &[ratio(1, 2), ratio(1, 2)]).unwrap()
}

fn mix(rng: &mut impl Rng, parts: &[EmpiricalModel]) -> EmpiricalModel {
    let weights = random_weights(rng, parts.len(), 1.0);
    EmpiricalModel::mixture(parts, &weights).unwrap()
}

/// Compatible rational models spread over all four contextuality levels.
pub fn random_compatible_model(rng: &mut impl Rng) -> EmpiricalModel {
    match rng.gen_range(0..4) {
        0 => {
            let s = corpus::bell().scenario().clone();
            let mut pool = [corpus::bell(),
                pr_rational(),
                hardy_pr_variant(),
                hardy_global(),
                random_global_model(rng, &s)];
            pool.shuffle(rng);
            let k = rng.gen_range(1..=3);
            mix(rng, &pool[..k])
        }
        1 => {
            let base = match rng.gen_range(0..3) {
                0 => corpus::specker_triangle().uniform_on_support().unwrap(),
                1 => corpus::liar_cycle(rng.gen_range(3..=6)).unwrap().uniform_on_support().unwrap(),
                _ => ctx_core::quantum::ghz_model().unwrap(),
            };
            if rng.gen_bool(0.5) {
                base
            } else {
                let noise = random_global_model(rng, &base.scenario().clone());
                mix(rng, &[base, noise])
            }
        }
        2 => {
            let s = random_scenario(rng);
            random_global_model(rng, &s)
        }
        _ => {
            let s = random_scenario(rng);
            let a = random_global_model(rng, &s);
            let b = random_global_model(rng, &s);
            mix(rng, &[a, b])
        }
    }
}

/// Every corpus model, with the liar cycles that can be built.
pub fn corpus_models() -> Vec<(String, EmpiricalModel)> {
    let mut out: Vec<(String, EmpiricalModel)> = ["bell", "hardy", "pr", "ghz", "specker"]
        .iter()
        .map(|n| (n.to_string(), corpus::builtin(n).unwrap()))
        .collect();
    for n in 3..=8 {
        out.push((format!("liar:{n}"), corpus::liar_cycle(n).unwrap()));
    }
    out
}

/// Compatible families of local sections: one supported assignment per
/// maximal context, agreeing on every overlap. Plain product enumeration.
pub fn compatible_families(model: &EmpiricalModel) -> Vec<Vec<Assignment>> {
    let supports: Vec<Vec<Assignment>> = model
        .tables()
        .iter()
        .map(|t| t.support_set().cloned().collect())
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; supports.len()];
    if supports.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let family: Vec<Assignment> = idx.iter().zip(&supports).map(|(&i, s)| s[i].clone()).collect();
        let agrees = (0..family.len()).all(|i| {
            (i + 1..family.len()).all(|j| {
                family[i]
                    .iter()
                    .all(|(v, o)| family[j].value_of(v).is_none_or(|p| p == o))
            })
        });
        if agrees {
            out.push(family);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < supports[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn restrict_family(model: &EmpiricalModel, g: &GlobalAssignment) -> Vec<Assignment> {
    model.tables().iter().map(|t| g.restrict(t.context())).collect()
}

type Q = Ratio<i128>;

fn small(x: &Rational) -> Q {
    Q::new(x.numer().to_i128().unwrap(), x.denom().to_i128().unwrap())
}

/// Brute-force feasibility of `A x = b, x ≥ 0`: some basic solution on a set
/// of linearly independent columns is nonnegative. Exponential in the
/// number of columns; uses its own small-integer rational elimination.
pub fn brute_force_feasible(a: &[Vec<Rational>], b: &[Rational]) -> bool {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    assert!(n <= 16, "oracle is exponential in the column count");
    let a: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(small).collect()).collect();
    let b: Vec<Q> = b.iter().map(small).collect();
    if b.iter().all(Zero::is_zero) {
        return true;
    }
    (1u32..(1 << n)).any(|mask| {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        cols.len() <= m && basic_solution(&a, &b, &cols).is_some_and(|x| x.iter().all(|v| *v >= Q::zero()))
    })
}

/// Unique solution of the system restricted to `cols`, if the columns are
/// independent and the system is consistent.
fn basic_solution(a: &[Vec<Q>], b: &[Q], cols: &[usize]) -> Option<Vec<Q>> {
    let k = cols.len();
    let mut rows: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| cols.iter().map(|&j| r[j]).chain(std::iter::once(*bi)).collect())
        .collect();
    let m = rows.len();
    for c in 0..k {
        let p = (c..m).find(|&i| !rows[i][c].is_zero())?;
        rows.swap(c, p);
        let pivot = rows[c][c];
        for v in rows[c].iter_mut() {
            *v /= pivot;
        }
        for i in 0..m {
            if i != c && !rows[i][c].is_zero() {
                let f = rows[i][c];
                let pivot_row = rows[c].clone();
                for (x, p) in rows[i].iter_mut().zip(pivot_row).skip(c) {
                    *x -= f * p;
                }
            }
        }
    }
    if rows[k..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| rows[i][k]).collect())
}

/// Every scenario (up to naming) whose global assignment count is at most
/// `limit`, over at most three variables with at least two outcomes each.
pub fn small_scenarios(limit: usize) -> Vec<Scenario> {
    let mut profiles: Vec<Vec<usize>> = Vec::new();
    for a in 2..=limit {
        profiles.push(vec![a]);
        for b in 2..=limit / a {
            profiles.push(vec![a, b]);
            for c in 2..=limit / (a * b) {
                profiles.push(vec![a, b, c]);
            }
        }
    }
    let mut out = Vec::new();
    for sizes in profiles {
        let n = sizes.len();
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let outcomes: Vec<Vec<String>> = sizes.iter().map(|&k| (0..k).map(|o| o.to_string()).collect()).collect();
        let subsets: Vec<u32> = (1..(1u32 << n)).collect();
        let mut seen = BTreeSet::new();
        for family in 1u32..(1 << subsets.len()) {
            let chosen: Vec<u32> = subsets
                .iter()
                .enumerate()
                .filter(|(i, _)| family & (1 << i) != 0)
                .map(|(_, &s)| s)
                .collect();
            let antichain = chosen
                .iter()
                .all(|&x| chosen.iter().all(|&y| x == y || x & y != x));
            let covers = chosen.iter().fold(0, |acc, s| acc | s) == (1 << n) - 1;
            if !antichain || !covers || !seen.insert(chosen.clone()) {
                continue;
            }
            let contexts: Vec<Vec<String>> = chosen
                .iter()
                .map(|&s| (0..n).filter(|i| s & (1 << i) != 0).map(|i| names[i].clone()).collect())
                .collect();
            out.push(Scenario::new(&names, &contexts, &outcomes).unwrap());
        }
    }
    out
}

pub fn zero_residual(residual: &[Rational]) -> bool {
    residual.iter().all(Zero::is_zero)
}

pub fn one() -> Rational {
    int(1)
}
