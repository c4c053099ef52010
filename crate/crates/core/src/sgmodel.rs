//! Outcome probabilities of the sequence-counting model for two rotated
//! detectors.
//!
//! For a fixed experiment configuration the two elementary state spaces hold
//! the partner sequences compatible with one fixed event (Alice's for side
//! `a`, Bob's for side `b`). Their cardinalities are paired and summed over
//! the pair-only number `μ` (and, in interference mode, over pairs of
//! differing `μ` with sign `(-1)^{|Δμ|/2}`), then over `l_a1`, `l_b2`, and
//! finally normalized over `m_b2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmath::{self, perm_ratio, ExactRatio, ExactWeight, Natural};
use crate::statespace::{base8_from_quantum, l_range, marginals, Base8Counts, LocalConfig};
use crate::wignerqm::wigner_d_squared_on_grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Pairs share every quantum number, `μ` included.
    Plain,
    /// Pairs may differ in `μ`; cross pairs carry `(-1)^{|Δμ|/2}`.
    Interference,
}

impl Mode {
    /// Plain counting for spin 1/2, interference otherwise.
    pub fn default_for(two_j: u32) -> Mode {
        if two_j == 1 {
            Mode::Plain
        } else {
            Mode::Interference
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "plain" => Ok(Mode::Plain),
            "interference" => Ok(Mode::Interference),
            other => Err(Error::domain(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Interference => "interference",
        })
    }
}

/// Which event is held fixed in an elementary state space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// How `l_a1` enters the probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum LCondition {
    /// Sum over every admissible `l_a1`.
    #[default]
    SumAll,
    /// Condition on a single doubled `l_a1`.
    Fixed(i32),
    /// Condition on `l_a1 = ±v/2`, with `v` from [`paper_tuned_two_l`].
    PaperTuned,
}

impl LCondition {
    /// The doubled `l_a1` values to sum over, or `None` for all of them.
    pub fn resolve(&self, n: u32, two_j: u32) -> Option<Vec<i32>> {
        match *self {
            LCondition::SumAll => None,
            LCondition::Fixed(v) => Some(vec![v]),
            LCondition::PaperTuned => {
                let v = paper_tuned_two_l(n, two_j);
                if v == 0 {
                    Some(vec![0])
                } else {
                    Some(vec![-v, v])
                }
            }
        }
    }
}

impl FromStr for LCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<LCondition> {
        match s {
            "sum-all" => Ok(LCondition::SumAll),
            "paper-tuned" => Ok(LCondition::PaperTuned),
            other => other
                .parse::<i32>()
                .map(LCondition::Fixed)
                .map_err(|_| Error::domain(format!("bad l condition `{other}`"))),
        }
    }
}

impl fmt::Display for LCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LCondition::SumAll => f.write_str("sum-all"),
            LCondition::Fixed(v) => write!(f, "{v}"),
            LCondition::PaperTuned => f.write_str("paper-tuned"),
        }
    }
}

impl Serialize for LCondition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Doubled tuning value `2·l_a1 ≈ n/2 - j`: the largest admissible `two_l`
/// not exceeding `(n - two_j)/2`, or the smallest admissible one when none
/// does. For `n = 100, two_j = 1` this is 49.
pub fn paper_tuned_two_l(n: u32, two_j: u32) -> i32 {
    let g = n as i32 - two_j as i32;
    if g <= 0 {
        return 0;
    }
    let mut v = g / 2;
    if (g - v) % 2 != 0 {
        v -= 1;
    }
    v.max(g % 2)
}

/// Conditioning set of a probability query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModelQuery {
    pub n: u32,
    pub two_j: u32,
    pub two_m_a1: i32,
    pub b_map: u32,
    pub mode: Mode,
    pub l_condition: LCondition,
}

impl ModelQuery {
    /// Query with the default mode for `two_j` and `l_a1` summed over.
    pub fn new(n: u32, two_j: u32, two_m_a1: i32, b_map: u32) -> Result<Self> {
        let q = ModelQuery {
            n,
            two_j,
            two_m_a1,
            b_map,
            mode: Mode::default_for(two_j),
            l_condition: LCondition::SumAll,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_l_condition(mut self, l_condition: LCondition) -> Self {
        self.l_condition = l_condition;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let limit = exactmath::DEFAULT_N_MAX as u32;
        if self.n == 0 || self.n > limit {
            return Err(Error::domain(format!(
                "n = {} outside [1, {limit}]",
                self.n
            )));
        }
        if self.two_j > self.n {
            return Err(Error::domain(format!(
                "two_j = {} exceeds n = {}",
                self.two_j, self.n
            )));
        }
        check_projection(self.two_j, self.two_m_a1, "two_m_a1")?;
        if self.b_map > self.n {
            return Err(Error::domain(format!(
                "b_map = {} outside [0, {}]",
                self.b_map, self.n
            )));
        }
        if let Some(values) = self.l_condition.resolve(self.n, self.two_j) {
            let g = self.n as i32 - self.two_j as i32;
            for v in values {
                if v.abs() > g || (g - v).rem_euclid(2) != 0 {
                    return Err(Error::domain(format!(
                        "two_l_a1 = {v} is not admissible for n - two_j = {g}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every admissible doubled `m_b2`, ascending.
    pub fn outcomes(&self) -> impl Iterator<Item = i32> {
        let j = self.two_j as i32;
        (-j..=j).step_by(2)
    }
}

fn check_projection(two_j: u32, two_m: i32, name: &str) -> Result<()> {
    let j = two_j as i32;
    if two_m.abs() > j || (j - two_m).rem_euclid(2) != 0 {
        return Err(Error::domain(format!(
            "{name} = {two_m} is not a projection of two_j = {j}"
        )));
    }
    Ok(())
}

/// `|ε^a|` or `|ε^b|`: the number of partner sequences compatible with one
/// fixed event, as a ratio of the fixed side's base-4 factorials over the
/// eight base-8 factorials.
pub fn epsilon_cardinality(counts: &Base8Counts, side: Side) -> Result<Natural> {
    let m = marginals(counts);
    let fixed = match side {
        Side::A => m.a1,
        Side::B => m.b2,
    };
    let num = fixed.to_array().map(|x| x as usize);
    let den = counts.to_array().map(|x| x as usize);
    perm_ratio(&num, &den)
}

/// The same cardinality as a product of four binomials read from the shared
/// Pascal table; this is what the counting sums use.
pub(crate) fn epsilon_product(counts: &Base8Counts, side: Side) -> Result<Natural> {
    let c = counts.to_array().map(|x| x as usize);
    let [aa, ab, ba, bb, cc, cd, dc, dd] = c;
    let t = exactmath::table();
    let pairs = match side {
        Side::A => [(aa + ab, aa), (ba + bb, ba), (cc + cd, cc), (dc + dd, dc)],
        Side::B => [(aa + ba, aa), (ab + bb, ab), (cc + dc, cc), (cd + dd, cd)],
    };
    let mut acc = t.binomial(pairs[0].0, pairs[0].1)?.clone();
    for &(k, r) in &pairs[1..] {
        if r != 0 && r != k {
            acc *= t.binomial(k, r)?;
        }
    }
    Ok(acc)
}

struct MuTerm {
    two_mu: i32,
    eps_a: Natural,
    eps_b: Natural,
}

fn mu_terms(local: &LocalConfig) -> Result<Vec<MuTerm>> {
    let mut terms = Vec::new();
    for two_mu in local.mu_candidates() {
        if let Ok(counts) = base8_from_quantum(&local.with_mu(two_mu)) {
            terms.push(MuTerm {
                two_mu,
                eps_a: epsilon_product(&counts, Side::A)?,
                eps_b: epsilon_product(&counts, Side::B)?,
            });
        }
    }
    Ok(terms)
}

/// Sign `(-1)^{|Δμ|/2}` for two doubled `μ` values. Feasible values differ by
/// multiples of four, so `|Δμ|/2 = |Δ two_mu|/4` is an integer.
pub fn interference_sign(two_mu_a: i32, two_mu_b: i32) -> i32 {
    let delta = (two_mu_a - two_mu_b).abs();
    debug_assert_eq!(delta % 4, 0);
    if (delta / 4) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Elementary counting sum `υ` at fixed local quantum numbers.
pub fn upsilon(local: &LocalConfig, mode: Mode) -> Result<ExactWeight> {
    let terms = mu_terms(local)?;
    let mut acc = BigInt::zero();
    match mode {
        Mode::Plain => {
            for t in &terms {
                acc += BigInt::from_biguint(Sign::Plus, &t.eps_a * &t.eps_b);
            }
        }
        Mode::Interference => {
            for ta in &terms {
                for tb in &terms {
                    let mag = BigInt::from_biguint(Sign::Plus, &ta.eps_a * &tb.eps_b);
                    if interference_sign(ta.two_mu, tb.two_mu) > 0 {
                        acc += mag;
                    } else {
                        acc -= mag;
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// `Υ`: `υ` summed over `l_b2` and over `l_a1` (or the conditioned values).
pub fn big_upsilon(query: &ModelQuery, two_m_b2: i32) -> Result<ExactWeight> {
    query.validate()?;
    check_projection(query.two_j, two_m_b2, "two_m_b2")?;
    let la_values: Vec<i32> = match query.l_condition.resolve(query.n, query.two_j) {
        Some(v) => v,
        None => l_range(query.n, query.two_j).collect(),
    };
    let mut acc = BigInt::zero();
    for &la in &la_values {
        for lb in l_range(query.n, query.two_j) {
            let local = LocalConfig {
                n: query.n,
                two_j: query.two_j,
                two_m_a1: query.two_m_a1,
                two_m_b2,
                two_l_a1: la,
                two_l_b2: lb,
                b_map: query.b_map,
            };
            acc += upsilon(&local, query.mode)?;
        }
    }
    Ok(acc)
}

/// A model pathology that is reported rather than hidden.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    NegativeWeight {
        two_m_b2: i32,
        #[serde(serialize_with = "as_string")]
        weight: ExactWeight,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NegativeWeight { two_m_b2, weight } => {
                write!(f, "negative weight {weight} at two_m_b2={two_m_b2}")
            }
        }
    }
}

fn as_string<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub two_m_b2: i32,
    #[serde(serialize_with = "as_string")]
    pub weight: ExactWeight,
    pub probability: ExactRatio,
    pub p_model: f64,
    pub p_qm: Option<f64>,
    pub abs_delta: Option<f64>,
}

/// Exact outcome probabilities for every `m_b2`, ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityTable {
    pub query: ModelQuery,
    pub rows: Vec<OutcomeRow>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ProbabilityTable {
    pub fn get(&self, two_m_b2: i32) -> Option<&OutcomeRow> {
        self.rows.iter().find(|r| r.two_m_b2 == two_m_b2)
    }

    pub fn total(&self) -> ExactRatio {
        self.rows.iter().map(|r| &r.probability).sum()
    }

    pub fn has_negative_weight(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| matches!(d, Diagnostic::NegativeWeight { .. }))
    }

    /// Fills `p_qm` and `abs_delta` from the Wigner reference at the same
    /// grid angle.
    pub fn attach_qm_reference(&mut self) -> Result<()> {
        let q = self.query;
        for row in &mut self.rows {
            let p_qm = wigner_d_squared_on_grid(q.two_j, q.two_m_a1, row.two_m_b2, q.n, q.b_map)?;
            row.p_qm = Some(p_qm);
            row.abs_delta = Some((row.p_model - p_qm).abs());
        }
        Ok(())
    }

    pub fn max_abs_delta(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.abs_delta)
            .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
    }
}

/// `P(m_b2 | n, j, m_a1, θ)` for every `m_b2`.
pub fn probability(query: &ModelQuery) -> Result<ProbabilityTable> {
    query.validate()?;
    let weights: Vec<(i32, ExactWeight)> = query
        .outcomes()
        .map(|mb| big_upsilon(query, mb).map(|w| (mb, w)))
        .collect::<Result<_>>()?;
    let total: BigInt = weights.iter().map(|(_, w)| w).sum();
    if total.is_zero() {
        return Err(Error::DegenerateNormalization);
    }
    let mut diagnostics = Vec::new();
    let mut rows = Vec::with_capacity(weights.len());
    for (two_m_b2, weight) in weights {
        if weight.is_negative() {
            diagnostics.push(Diagnostic::NegativeWeight {
                two_m_b2,
                weight: weight.clone(),
            });
        }
        let probability = ExactRatio::new(weight.clone(), total.clone())?;
        let p_model = probability.to_f64();
        rows.push(OutcomeRow {
            two_m_b2,
            weight,
            probability,
            p_model,
            p_qm: None,
            abs_delta: None,
        });
    }
    Ok(ProbabilityTable {
        query: *query,
        rows,
        diagnostics,
    })
}
