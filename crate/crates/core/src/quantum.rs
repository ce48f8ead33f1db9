//! Empirical models from pure multi-qubit states measured in the XY plane.
//!
//! Floating point lives only here. Every generated cell is snapped to an
//! exact rational before it leaves the module.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::integer::Integer;
use num::{One, Signed, ToPrimitive, Zero};

use crate::distribution::{Distribution, Semiring};
use crate::error::{Error, Result};
use crate::model::EmpiricalModel;
use crate::rational::Rational;
use crate::scenario::Scenario;

const NORM_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 64;
pub const DEFAULT_SNAP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Amplitudes in the computational basis, qubit 0 as the most
    /// significant bit of the index.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Quantum(format!("{len} amplitudes is not 2^n for n >= 1")));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Quantum("non-finite amplitude".into()));
        }
        let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Quantum(format!("state has squared norm {norm}, expected 1")));
        }
        Ok(StateVector {
            qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn with_global_phase(&self, theta: f64) -> StateVector {
        let phase = Complex64::from_polar(1.0, theta);
        StateVector {
            qubits: self.qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_state() -> StateVector {
    ghz_state(2).expect("n = 2 is valid")
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n ≥ 2` qubits.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::Quantum(format!("GHZ state needs at least 2 qubits, got {n}")));
    }
    if n > 24 {
        return Err(Error::Quantum(format!("{n} qubits is too many for a dense state")));
    }
    let mut amplitudes = vec![Complex64::zero(); 1 << n];
    amplitudes[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[(1 << n) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::new(amplitudes)
}

/// Per party (qubit), the XY-plane angle of each of its measurement
/// variables.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingTable {
    parties: Vec<Vec<(String, f64)>>,
}

impl SettingTable {
    pub fn new(parties: Vec<Vec<(String, f64)>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (name, angle) in parties.iter().flatten() {
            if !angle.is_finite() {
                return Err(Error::Quantum(format!("angle for `{name}` is not finite")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Quantum(format!("`{name}` belongs to more than one party")));
            }
        }
        Ok(SettingTable { parties })
    }

    pub fn parties(&self) -> &[Vec<(String, f64)>] {
        &self.parties
    }

    /// `(party, angle)` of a measurement variable.
    pub fn lookup(&self, variable: &str) -> Option<(usize, f64)> {
        self.parties.iter().enumerate().find_map(|(p, vars)| {
            vars.iter().find(|(n, _)| n == variable).map(|(_, a)| (p, *a))
        })
    }
}

/// Born-rule probability of `outcomes` (one bit per party) when party `k`
/// measures in the basis `(|0⟩ ± e^{iφ_k}|1⟩)/√2`, `+` for outcome 0.
pub fn born_probability(state: &StateVector, angles: &[f64], outcomes: &[usize]) -> Result<f64> {
    let n = state.qubits;
    if angles.len() != n || outcomes.len() != n {
        return Err(Error::Quantum(format!(
            "{} settings and {} outcomes for {n} parties",
            angles.len(),
            outcomes.len()
        )));
    }
    if let Some(o) = outcomes.iter().find(|&&o| o > 1) {
        return Err(Error::Quantum(format!("outcome {o} is not a bit")));
    }
    // ⟨u_o|0⟩ = 1/√2, ⟨u_o|1⟩ = ±e^{-iφ}/√2
    let one_coeff: Vec<Complex64> = angles
        .iter()
        .zip(outcomes)
        .map(|(&phi, &o)| {
            let sign = if o == 0 { 1.0 } else { -1.0 };
            Complex64::from_polar(sign * FRAC_1_SQRT_2, -phi)
        })
        .collect();
    let zero_coeff = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut amp = Complex64::zero();
    for (index, a) in state.amplitudes.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mut c = Complex64::one();
        for (k, one) in one_coeff.iter().enumerate() {
            let bit = (index >> (n - 1 - k)) & 1;
            c *= if bit == 1 { *one } else { zero_coeff };
        }
        amp += c * a;
    }
    Ok(amp.norm_sqr())
}

/// Fills every table cell with its Born probability and snaps it to the
/// nearest rational with denominator at most `max_denominator`.
pub fn generate_model(
    state: &StateVector,
    settings: &SettingTable,
    scenario: &Scenario,
    max_denominator: u64,
    snap_tolerance: f64,
) -> Result<EmpiricalModel> {
    let n = state.qubits;
    let mut tables = Vec::with_capacity(scenario.contexts().len());
    for ctx in scenario.contexts() {
        let key = scenario.context_key(ctx);
        // party of each context variable, in context order
        let mut parties = Vec::with_capacity(ctx.len());
        let mut angles = vec![0.0; n];
        let mut covered = vec![false; n];
        for &v in ctx.vars() {
            let name = &scenario.variables()[v];
            let (p, angle) = settings
                .lookup(name)
                .ok_or_else(|| Error::Quantum(format!("no setting for variable `{name}`")))?;
            if p >= n {
                return Err(Error::Quantum(format!("`{name}` belongs to party {p} of a {n}-qubit state")));
            }
            if covered[p] {
                return Err(Error::Quantum(format!("context {{{key}}} has two settings for party {p}")));
            }
            if scenario.outcomes(v).len() != 2 {
                return Err(Error::Quantum(format!("`{name}` must have exactly two outcomes")));
            }
            covered[p] = true;
            angles[p] = angle;
            parties.push(p);
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::Quantum(format!("context {{{key}}} does not pick a setting for every party")));
        }

        let mut cells = Vec::new();
        let mut float_total = 0.0;
        for a in scenario.enumerate_assignments(ctx)? {
            let mut outcomes = vec![0; n];
            for (&p, &o) in parties.iter().zip(a.values()) {
                outcomes[p] = o;
            }
            let prob = born_probability(state, &angles, &outcomes)?;
            float_total += prob;
            let snapped = rationalize(prob, max_denominator, snap_tolerance).ok_or_else(|| Error::Snap {
                context: key.clone(),
                assignment: scenario.assignment_key(&a),
                value: prob,
                max_denominator,
            })?;
            cells.push((a, snapped));
        }
        if (float_total - 1.0).abs() > 4.0 * NORM_TOLERANCE {
            return Err(Error::Quantum(format!("context {{{key}}} probabilities sum to {float_total}")));
        }
        let table = Distribution::unnormalized(Semiring::Rational, ctx.clone(), cells)?;
        if let Some(msg) = table.normalization_error() {
            return Err(Error::Quantum(format!("snapped context {{{key}}}: {msg}")));
        }
        tables.push(table);
    }
    EmpiricalModel::new(scenario.clone(), Semiring::Rational, tables)
}

/// Nearest fraction `p/q` with `q ≤ max_denominator`, returned only if it
/// lies within `tolerance` of `value`.
pub fn rationalize(value: f64, max_denominator: u64, tolerance: f64) -> Option<Rational> {
    if !value.is_finite() || max_denominator == 0 {
        return None;
    }
    let exact = Rational::from_float(value)?;
    let best = limit_denominator(&exact, &BigInt::from(max_denominator));
    let error = (&best - &exact).abs().to_f64()?;
    (error <= tolerance).then_some(best)
}

/// Best rational approximation with bounded denominator, via continued
/// fraction convergents and the final semiconvergent.
fn limit_denominator(x: &Rational, max_den: &BigInt) -> Rational {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (max_den - &q0).div_floor(&q1);
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    if (&conv - x).abs() <= (&semi - x).abs() {
        conv
    } else {
        semi
    }
}

/// XY-plane angles realizing the four-row Bell table with the Bell state:
/// `a1 = b1 = 0`, `a2 = b2 = π/3`. Under the basis convention of
/// [`born_probability`] the probability of equal outcomes is
/// `(1 + cos(φ_A + φ_B))/2`.
pub fn bell_settings() -> SettingTable {
    SettingTable::new(vec![
        vec![("a1".into(), 0.0), ("a2".into(), FRAC_PI_3)],
        vec![("b1".into(), 0.0), ("b2".into(), FRAC_PI_3)],
    ])
    .expect("static settings")
}

/// X (angle 0) and Y (angle π/2) for each of three parties.
pub fn ghz_settings() -> SettingTable {
    SettingTable::new(vec![
        vec![("a1".into(), 0.0), ("a2".into(), FRAC_PI_2)],
        vec![("b1".into(), 0.0), ("b2".into(), FRAC_PI_2)],
        vec![("c1".into(), 0.0), ("c2".into(), FRAC_PI_2)],
    ])
    .expect("static settings")
}

/// The XXX, XYY, YXY, YYX contexts over `a1 a2 b1 b2 c1 c2`, where index 1
/// is X and index 2 is Y.
pub fn ghz_scenario() -> Scenario {
    Scenario::with_shared_outcomes(
        &["a1", "a2", "b1", "b2", "c1", "c2"],
        &[
            vec!["a1", "b1", "c1"],
            vec!["a1", "b2", "c2"],
            vec!["a2", "b1", "c2"],
            vec!["a2", "b2", "c1"],
        ],
        &["0", "1"],
    )
    .expect("static scenario")
}

/// Exact GHZ model generated from the 3-qubit GHZ state.
pub fn ghz_model() -> Result<EmpiricalModel> {
    generate_model(
        &ghz_state(3)?,
        &ghz_settings(),
        &ghz_scenario(),
        DEFAULT_MAX_DENOMINATOR,
        DEFAULT_SNAP_TOLERANCE,
    )
}
