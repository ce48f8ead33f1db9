//! Finite-support distributions valued in one of two semirings: the
//! nonnegative rationals or the booleans.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::scenario::{Assignment, Context, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semiring {
    /// `(ℚ≥0, +, 0, ·, 1)`
    Rational,
    /// `({0,1}, ∨, 0, ∧, 1)`
    Boolean,
}

impl Semiring {
    pub fn name(self) -> &'static str {
        match self {
            Semiring::Rational => "rational",
            Semiring::Boolean => "boolean",
        }
    }

    pub fn zero(self) -> Rational {
        Rational::zero()
    }

    pub fn one(self) -> Rational {
        Rational::one()
    }

    pub fn add(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            Semiring::Rational => a + b,
            Semiring::Boolean => bool_value(!a.is_zero() || !b.is_zero()),
        }
    }

    pub fn mul(self, a: &Rational, b: &Rational) -> Rational {
        match self {
            Semiring::Rational => a * b,
            Semiring::Boolean => bool_value(!a.is_zero() && !b.is_zero()),
        }
    }

    pub fn contains(self, value: &Rational) -> bool {
        match self {
            Semiring::Rational => !value.is_negative(),
            Semiring::Boolean => value.is_zero() || value.is_one(),
        }
    }
}

fn bool_value(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// A semiring-valued distribution over the joint outcomes of one context.
/// Zero weights are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    semiring: Semiring,
    context: Context,
    weights: BTreeMap<Assignment, Rational>,
}

impl Distribution {
    /// Checked constructor: enforces the value domain and normalization.
    pub fn new(
        semiring: Semiring,
        context: Context,
        weights: impl IntoIterator<Item = (Assignment, Rational)>,
    ) -> Result<Self> {
        let d = Self::unnormalized(semiring, context, weights)?;
        match d.normalization_error() {
            Some(msg) => Err(Error::Distribution(msg)),
            None => Ok(d),
        }
    }

    /// Like [`Distribution::new`] but skips the normalization check, so that
    /// loaders can report every problem at once through validation.
    pub fn unnormalized(
        semiring: Semiring,
        context: Context,
        weights: impl IntoIterator<Item = (Assignment, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, w) in weights {
            if a.context() != &context {
                return Err(Error::Distribution(format!(
                    "assignment over {:?} in a distribution over {:?}",
                    a.context().vars(),
                    context.vars()
                )));
            }
            if !semiring.contains(&w) {
                return Err(Error::Distribution(format!(
                    "weight {} is not a {} value",
                    rational::format(&w),
                    semiring.name()
                )));
            }
            if w.is_zero() {
                continue;
            }
            if map.insert(a, w).is_some() {
                return Err(Error::Distribution("assignment listed twice".into()));
            }
        }
        Ok(Distribution {
            semiring,
            context,
            weights: map,
        })
    }

    pub fn point_mass(semiring: Semiring, assignment: Assignment) -> Self {
        let context = assignment.context().clone();
        let mut weights = BTreeMap::new();
        weights.insert(assignment, Rational::one());
        Distribution {
            semiring,
            context,
            weights,
        }
    }

    /// Uniform rational distribution on all joint outcomes of `context`.
    pub fn uniform(scenario: &Scenario, context: &Context) -> Result<Self> {
        let all = scenario.enumerate_assignments(context)?;
        let w = Rational::new(1.into(), all.len().into());
        Distribution::new(Semiring::Rational, context.clone(), all.into_iter().map(|a| (a, w.clone())))
    }

    /// Boolean distribution given by a nonempty set of joint outcomes.
    pub fn boolean_set(context: Context, support: impl IntoIterator<Item = Assignment>) -> Result<Self> {
        Distribution::new(
            Semiring::Boolean,
            context,
            support.into_iter().map(|a| (a, Rational::one())),
        )
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn weight(&self, assignment: &Assignment) -> Rational {
        self.weights.get(assignment).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero entries in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Assignment, &Rational)> {
        self.weights.iter()
    }

    pub fn support_set(&self) -> impl Iterator<Item = &Assignment> {
        self.weights.keys()
    }

    pub fn is_supported(&self, assignment: &Assignment) -> bool {
        self.weights.contains_key(assignment)
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Semiring sum of all weights.
    pub fn total(&self) -> Rational {
        self.weights
            .values()
            .fold(self.semiring.zero(), |acc, w| self.semiring.add(&acc, w))
    }

    /// Describes why the normalization condition fails, if it does.
    pub fn normalization_error(&self) -> Option<String> {
        match self.semiring {
            Semiring::Rational => {
                let total = self.total();
                (!total.is_one()).then(|| format!("weights sum to {}", rational::format(&total)))
            }
            Semiring::Boolean => self.weights.is_empty().then(|| "support is empty".to_string()),
        }
    }

    /// Restriction along `sub ⊆ context`: the weight of `t` is the semiring
    /// sum of the weights of all `s` with `s|_sub = t`.
    pub fn marginalize(&self, sub: &Context) -> Result<Distribution> {
        if !sub.is_subset(&self.context) {
            return Err(Error::NotASubcontext {
                sub: format!("{:?}", sub.vars()),
                context: format!("{:?}", self.context.vars()),
            });
        }
        let mut out: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (a, w) in &self.weights {
            let key = a.restrict(sub)?;
            let slot = out.entry(key).or_insert_with(|| self.semiring.zero());
            *slot = self.semiring.add(slot, w);
        }
        Ok(Distribution {
            semiring: self.semiring,
            context: sub.clone(),
            weights: out,
        })
    }

    /// Push-forward along a relabeling of joint outcomes.
    pub fn push_forward(&self, relabeling: &Relabeling) -> Result<Distribution> {
        let mut out: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (a, w) in &self.weights {
            let image = relabeling
                .map
                .get(a)
                .ok_or_else(|| Error::NotTotal(format!("{:?}", a.values())))?;
            let slot = out.entry(image.clone()).or_insert_with(|| self.semiring.zero());
            *slot = self.semiring.add(slot, w);
        }
        Ok(Distribution {
            semiring: self.semiring,
            context: relabeling.target.clone(),
            weights: out,
        })
    }

    /// The boolean distribution marking where this one is nonzero.
    pub fn support(&self) -> Distribution {
        Distribution {
            semiring: Semiring::Boolean,
            context: self.context.clone(),
            weights: self.weights.keys().map(|a| (a.clone(), Rational::one())).collect(),
        }
    }

    /// Pointwise convex combination of rational distributions over one context.
    pub fn mixture(dists: &[Distribution], weights: &[Rational]) -> Result<Distribution> {
        let first = dists
            .first()
            .ok_or_else(|| Error::Distribution("empty mixture".into()))?;
        if dists.len() != weights.len() {
            return Err(Error::Distribution("one weight per distribution is required".into()));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::Distribution("negative mixture weight".into()));
        }
        if !rational::sum(weights).is_one() {
            return Err(Error::Distribution("mixture weights do not sum to 1".into()));
        }
        let mut out: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (d, lambda) in dists.iter().zip(weights) {
            if d.semiring != Semiring::Rational {
                return Err(Error::WrongSemiring {
                    expected: "rational",
                    actual: d.semiring.name(),
                });
            }
            if d.context != first.context {
                return Err(Error::Distribution("mixture of distributions over different contexts".into()));
            }
            for (a, w) in &d.weights {
                *out.entry(a.clone()).or_insert_with(Rational::zero) += w * lambda;
            }
        }
        out.retain(|_, w| !w.is_zero());
        Ok(Distribution {
            semiring: Semiring::Rational,
            context: first.context.clone(),
            weights: out,
        })
    }
}

/// A total function between the joint-outcome sets of two contexts.
#[derive(Clone, Debug)]
pub struct Relabeling {
    target: Context,
    map: BTreeMap<Assignment, Assignment>,
}

impl Relabeling {
    /// Tabulates `f` on every joint outcome of `source`; fails if `f` is
    /// undefined anywhere or lands outside `target`.
    pub fn from_fn(
        scenario: &Scenario,
        source: &Context,
        target: &Context,
        f: impl Fn(&Assignment) -> Option<Assignment>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for a in scenario.enumerate_assignments(source)? {
            let image = f(&a).ok_or_else(|| Error::NotTotal(scenario.describe_assignment(&a)))?;
            if image.context() != target {
                return Err(Error::Distribution("relabeling leaves the target context".into()));
            }
            map.insert(a, image);
        }
        Ok(Relabeling {
            target: target.clone(),
            map,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn bell_row(scenario: &Scenario, vars: [&str; 2], cells: [Rational; 4]) -> Distribution {
        let ctx = scenario.context_of(&vars).unwrap();
        let all = scenario.enumerate_assignments(&ctx).unwrap();
        Distribution::new(Semiring::Rational, ctx, all.into_iter().zip(cells)).unwrap()
    }

    fn bell_scenario() -> Scenario {
        Scenario::with_shared_outcomes(
            &["a1", "a2", "b1", "b2"],
            &[vec!["a1", "b1"], vec!["a1", "b2"], vec!["a2", "b1"], vec!["a2", "b2"]],
            &["0", "1"],
        )
        .unwrap()
    }

    #[test]
    fn marginalizes_bell_row() {
        let s = bell_scenario();
        let row = bell_row(&s, ["a1", "b1"], [ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(1, 2)]);
        let a1 = s.context_of(&["a1"]).unwrap();
        let m = row.marginalize(&a1).unwrap();
        assert_eq!(m.weight(&s.assignment(&[("a1", "0")]).unwrap()), ratio(1, 2));
        assert_eq!(m.weight(&s.assignment(&[("a1", "1")]).unwrap()), ratio(1, 2));
        assert_eq!(row.marginalize(row.context()).unwrap(), row);
        let b2 = s.context_of(&["b2"]).unwrap();
        assert!(row.marginalize(&b2).is_err());
    }

    #[test]
    fn support_of_bell_row() {
        let s = bell_scenario();
        let row = bell_row(&s, ["a1", "b1"], [ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(1, 2)]);
        let keys: Vec<String> = row.support().support_set().map(|a| s.assignment_key(a)).collect();
        assert_eq!(keys, ["0,0", "1,1"]);
        let pm = Distribution::point_mass(Semiring::Rational, s.assignment(&[("a1", "1")]).unwrap());
        assert_eq!(pm.support().support_len(), 1);
    }

    #[test]
    fn push_forward_identity_constant_and_flip() {
        let s = bell_scenario();
        let row = bell_row(&s, ["a2", "b2"], [ratio(1, 8), ratio(3, 8), ratio(3, 8), ratio(1, 8)]);
        let ctx = row.context().clone();

        let id = Relabeling::from_fn(&s, &ctx, &ctx, |a| Some(a.clone())).unwrap();
        assert_eq!(row.push_forward(&id).unwrap(), row);

        let target = s.assignment(&[("a2", "0"), ("b2", "0")]).unwrap();
        let constant = Relabeling::from_fn(&s, &ctx, &ctx, |_| Some(target.clone())).unwrap();
        assert_eq!(
            row.push_forward(&constant).unwrap(),
            Distribution::point_mass(Semiring::Rational, target)
        );

        let flip = |a: &Assignment| {
            Assignment::new(a.context().clone(), a.values().iter().map(|v| 1 - v).collect()).ok()
        };
        let relabel = Relabeling::from_fn(&s, &ctx, &ctx, flip).unwrap();
        let pushed = row.push_forward(&relabel).unwrap();
        // preimage-sum oracle: d(f⁻¹(t)) for each target point t
        for t in s.enumerate_assignments(&ctx).unwrap() {
            let pre: Rational = s
                .enumerate_assignments(&ctx)
                .unwrap()
                .into_iter()
                .filter(|a| flip(a).as_ref() == Some(&t))
                .map(|a| row.weight(&a))
                .sum();
            assert_eq!(pushed.weight(&t), pre);
        }
        assert_eq!(pushed, row);

        let partial = Relabeling::from_fn(&s, &ctx, &ctx, |a| (a.values()[0] == 0).then(|| a.clone()));
        assert!(matches!(partial, Err(Error::NotTotal(_))));
    }

    #[test]
    fn mixtures() {
        let s = bell_scenario();
        let ctx = s.context_of(&["a1", "b1"]).unwrap();
        let u = Distribution::uniform(&s, &ctx).unwrap();
        assert_eq!(Distribution::mixture(std::slice::from_ref(&u), &[ratio(1, 1)]).unwrap(), u);

        let p = s.assignment(&[("a1", "0"), ("b1", "0")]).unwrap();
        let q = s.assignment(&[("a1", "1"), ("b1", "1")]).unwrap();
        let m = Distribution::mixture(
            &[
                Distribution::point_mass(Semiring::Rational, p.clone()),
                Distribution::point_mass(Semiring::Rational, q.clone()),
            ],
            &[ratio(1, 2), ratio(1, 2)],
        )
        .unwrap();
        assert_eq!(m.weight(&p), ratio(1, 2));
        assert_eq!(m.weight(&q), ratio(1, 2));
        assert_eq!(m.support_len(), 2);

        assert!(Distribution::mixture(std::slice::from_ref(&u), &[ratio(1, 2)]).is_err());
        let other = Distribution::uniform(&s, &s.context_of(&["a1", "b2"]).unwrap()).unwrap();
        assert!(Distribution::mixture(&[u, other], &[ratio(1, 2), ratio(1, 2)]).is_err());
    }

    #[test]
    fn normalization_is_enforced() {
        let s = bell_scenario();
        let ctx = s.context_of(&["a1", "b1"]).unwrap();
        let a = s.assignment(&[("a1", "0"), ("b1", "0")]).unwrap();
        assert!(Distribution::new(Semiring::Rational, ctx.clone(), [(a.clone(), ratio(9, 8))]).is_err());
        let loose = Distribution::unnormalized(Semiring::Rational, ctx.clone(), [(a.clone(), ratio(9, 8))]).unwrap();
        assert_eq!(loose.normalization_error().unwrap(), "weights sum to 9/8");
        assert!(Distribution::new(Semiring::Boolean, ctx.clone(), []).is_err());
        assert!(Distribution::new(Semiring::Boolean, ctx, [(a, ratio(1, 2))]).is_err());
    }

    fn three_bit_scenario() -> Scenario {
        Scenario::with_shared_outcomes(&["x", "y", "z"], &[vec!["x", "y", "z"]], &["0", "1"]).unwrap()
    }

    prop_compose! {
        fn random_distribution()(raw in proptest::collection::vec(0u32..5, 8)) -> Distribution {
            let s = three_bit_scenario();
            let ctx = s.full_context();
            let mut raw = raw;
            if raw.iter().all(|&w| w == 0) {
                raw[0] = 1;
            }
            let total: u32 = raw.iter().sum();
            let all = s.enumerate_assignments(&ctx).unwrap();
            let cells = all.into_iter().zip(raw.iter().map(|&w| ratio(w as i64, total as i64)));
            Distribution::new(Semiring::Rational, ctx, cells).unwrap()
        }
    }

    proptest! {
        #[test]
        fn marginal_matches_direct_summation(d in random_distribution(), var in 0usize..3) {
            let s = three_bit_scenario();
            let sub = Context::new([var]);
            let m = d.marginalize(&sub).unwrap();
            for t in s.enumerate_assignments(&sub).unwrap() {
                let direct: Rational = s
                    .enumerate_assignments(&s.full_context())
                    .unwrap()
                    .iter()
                    .filter(|a| a.values()[var] == t.values()[0])
                    .map(|a| d.weight(a))
                    .sum();
                prop_assert_eq!(m.weight(&t), direct);
            }
            prop_assert!(m.normalization_error().is_none());
        }

        #[test]
        fn marginalization_functorial_and_support_natural(d in random_distribution(), mask_d in 0u32..8, mask_c in 0u32..8) {
            let mid = Context::new((0..3).filter(|i| mask_d & (1 << i) != 0));
            let small = Context::new(mid.vars().iter().copied().filter(|i| mask_c & (1 << i) != 0));
            let two_step = d.marginalize(&mid).unwrap().marginalize(&small).unwrap();
            prop_assert_eq!(&two_step, &d.marginalize(&small).unwrap());
            prop_assert_eq!(
                d.marginalize(&small).unwrap().support(),
                d.support().marginalize(&small).unwrap()
            );
        }

        #[test]
        fn mixture_stays_normalized(a in random_distribution(), b in random_distribution(), k in 0i64..=10) {
            let m = Distribution::mixture(&[a, b], &[ratio(k, 10), ratio(10 - k, 10)]).unwrap();
            prop_assert!(m.normalization_error().is_none());
        }

        #[test]
        fn semiring_laws(x in 0i64..4, y in 0i64..4, z in 0i64..4, bx: bool, by: bool, bz: bool) {
            let b = |v: bool| if v { ratio(1, 1) } else { ratio(0, 1) };
            let cases = [
                (Semiring::Rational, ratio(x, 3), ratio(y, 2), ratio(z, 5)),
                (Semiring::Boolean, b(bx), b(by), b(bz)),
            ];
            for (r, a, bb, c) in cases {
                prop_assert_eq!(r.add(&a, &r.add(&bb, &c)), r.add(&r.add(&a, &bb), &c));
                prop_assert_eq!(r.mul(&a, &r.mul(&bb, &c)), r.mul(&r.mul(&a, &bb), &c));
                prop_assert_eq!(r.add(&a, &bb), r.add(&bb, &a));
                prop_assert_eq!(r.mul(&a, &bb), r.mul(&bb, &a));
                prop_assert_eq!(r.mul(&a, &r.add(&bb, &c)), r.add(&r.mul(&a, &bb), &r.mul(&a, &c)));
                prop_assert_eq!(r.add(&a, &r.zero()), a.clone());
                prop_assert_eq!(r.mul(&a, &r.one()), a.clone());
            }
        }
    }
}
