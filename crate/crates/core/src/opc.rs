//! Outcome spaces, gambles and finite-outcome outer probability contents.
//!
//! Forecaster's move each round is an [`ExpectationFunctional`]: a probability
//! vector over a finite [`OutcomeSpace`] that prices a [`Gamble`] by its
//! weighted average. Payoffs live in `[0, +inf]`; arithmetic follows the
//! extended-real conventions `0 * inf = 0` and `a + inf = inf` for `a >= 0`.
//!
//! [`check_axioms`] verifies the four axioms of an outer probability content
//! (monotonicity, positive homogeneity, subadditivity, normalization) by
//! randomized search, and [`check_pair`] runs them for one explicit pair.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the sum of forecast weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Relative tolerance used when comparing functional values in axiom checks.
const AXIOM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpcError {
    #[error("an outcome space needs at least two outcomes, got {0}")]
    TooFewOutcomes(usize),
    #[error("duplicate outcome label {0:?}")]
    DuplicateOutcome(String),
    #[error("unknown outcome {0:?}")]
    UnknownOutcome(String),
    #[error("outcome index {index} is out of range for a space of {size} outcomes")]
    OutcomeOutOfRange { index: usize, size: usize },
    #[error("expected {expected} values, one per outcome, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands are defined on different outcome spaces")]
    SpaceMismatch,
    #[error("payoff {value} at outcome {outcome:?} is not in [0, +inf]")]
    InvalidPayoff { outcome: String, value: f64 },
    #[error("weight {value} at outcome {outcome:?} is not in [0, 1]")]
    InvalidWeight { outcome: String, value: f64 },
    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),
}

/// Multiplication on `[0, +inf]` with `0 * inf = 0`.
#[inline]
pub fn mul_ext(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Ordered finite set of distinct outcome labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct OutcomeSpace {
    labels: Vec<String>,
}

impl OutcomeSpace {
    pub fn new<I, S>(labels: I) -> Result<Self, OpcError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(OpcError::TooFewOutcomes(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(OpcError::DuplicateOutcome(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// The coin space `{"0", "1"}`.
    pub fn binary() -> Self {
        Self {
            labels: vec!["0".to_owned(), "1".to_owned()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, outcome: usize) -> Option<&str> {
        self.labels.get(outcome).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Result<usize, OpcError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| OpcError::UnknownOutcome(label.to_owned()))
    }

    pub fn check_index(&self, outcome: usize) -> Result<(), OpcError> {
        if outcome < self.len() {
            Ok(())
        } else {
            Err(OpcError::OutcomeOutOfRange {
                index: outcome,
                size: self.len(),
            })
        }
    }
}

impl TryFrom<Vec<String>> for OutcomeSpace {
    type Error = OpcError;

    fn try_from(labels: Vec<String>) -> Result<Self, Self::Error> {
        Self::new(labels)
    }
}

impl From<OutcomeSpace> for Vec<String> {
    fn from(space: OutcomeSpace) -> Self {
        space.labels
    }
}

impl fmt::Display for OutcomeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

fn same_space(a: &Arc<OutcomeSpace>, b: &Arc<OutcomeSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A nonnegative extended-real payoff function on an outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamble {
    space: Arc<OutcomeSpace>,
    payoffs: Vec<f64>,
}

impl Gamble {
    pub fn new(space: Arc<OutcomeSpace>, payoffs: Vec<f64>) -> Result<Self, OpcError> {
        if payoffs.len() != space.len() {
            return Err(OpcError::LengthMismatch {
                expected: space.len(),
                got: payoffs.len(),
            });
        }
        for (label, &value) in space.labels().iter().zip(&payoffs) {
            if value.is_nan() || value < 0.0 {
                return Err(OpcError::InvalidPayoff {
                    outcome: label.clone(),
                    value,
                });
            }
        }
        Ok(Self { space, payoffs })
    }

    pub fn constant(space: Arc<OutcomeSpace>, value: f64) -> Result<Self, OpcError> {
        let payoffs = vec![value; space.len()];
        Self::new(space, payoffs)
    }

    pub fn zero(space: Arc<OutcomeSpace>) -> Self {
        let payoffs = vec![0.0; space.len()];
        Self { space, payoffs }
    }

    /// Builds a gamble from `(label, payoff)` pairs; unlisted outcomes pay 0.
    pub fn from_labels(
        space: Arc<OutcomeSpace>,
        entries: &[(&str, f64)],
    ) -> Result<Self, OpcError> {
        let mut payoffs = vec![0.0; space.len()];
        for &(label, value) in entries {
            payoffs[space.index_of(label)?] = value;
        }
        Self::new(space, payoffs)
    }

    pub fn space(&self) -> &Arc<OutcomeSpace> {
        &self.space
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    /// Payoff at an outcome index. Panics if the index is out of range.
    pub fn payoff(&self, outcome: usize) -> f64 {
        self.payoffs[outcome]
    }

    pub fn payoff_of(&self, label: &str) -> Result<f64, OpcError> {
        Ok(self.payoffs[self.space.index_of(label)?])
    }

    pub fn is_constant(&self) -> bool {
        self.payoffs.windows(2).all(|w| w[0] == w[1])
    }

    /// `weight * self + constant`, pointwise, for finite `weight, constant >= 0`.
    pub fn affine(&self, weight: f64, constant: f64) -> Gamble {
        debug_assert!(weight >= 0.0 && constant >= 0.0);
        Gamble {
            space: Arc::clone(&self.space),
            payoffs: self
                .payoffs
                .iter()
                .map(|&v| mul_ext(weight, v) + constant)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Gamble {
        self.affine(factor, 0.0)
    }

    pub fn try_add(&self, other: &Gamble) -> Result<Gamble, OpcError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_min(&self, other: &Gamble) -> Result<Gamble, OpcError> {
        self.zip_with(other, f64::min)
    }

    /// Pointwise `self <= other`.
    pub fn is_dominated_by(&self, other: &Gamble) -> Result<bool, OpcError> {
        if !same_space(&self.space, &other.space) {
            return Err(OpcError::SpaceMismatch);
        }
        Ok(self.payoffs.iter().zip(&other.payoffs).all(|(a, b)| a <= b))
    }

    fn zip_with(&self, other: &Gamble, op: impl Fn(f64, f64) -> f64) -> Result<Gamble, OpcError> {
        if !same_space(&self.space, &other.space) {
            return Err(OpcError::SpaceMismatch);
        }
        Ok(Gamble {
            space: Arc::clone(&self.space),
            payoffs: self
                .payoffs
                .iter()
                .zip(&other.payoffs)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }
}

impl fmt::Display for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (label, v)) in self.space.labels().iter().zip(&self.payoffs).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{label}->{v}")?;
        }
        write!(f, ")")
    }
}

/// Forecaster's pricing functional: `E(f) = sum_x w(x) f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunctional", into = "RawFunctional")]
pub struct ExpectationFunctional {
    space: Arc<OutcomeSpace>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctional {
    outcomes: Vec<String>,
    weights: Vec<f64>,
}

impl TryFrom<RawFunctional> for ExpectationFunctional {
    type Error = OpcError;

    fn try_from(raw: RawFunctional) -> Result<Self, Self::Error> {
        Self::new(Arc::new(OutcomeSpace::new(raw.outcomes)?), raw.weights)
    }
}

impl From<ExpectationFunctional> for RawFunctional {
    fn from(e: ExpectationFunctional) -> Self {
        RawFunctional {
            outcomes: e.space.labels().to_vec(),
            weights: e.weights,
        }
    }
}

impl ExpectationFunctional {
    /// A probability-vector functional; weights in `[0, 1]` summing to 1.
    pub fn new(space: Arc<OutcomeSpace>, weights: Vec<f64>) -> Result<Self, OpcError> {
        let e = Self::unnormalized(space, weights)?;
        for (label, &w) in e.space.labels().iter().zip(&e.weights) {
            if w > 1.0 {
                return Err(OpcError::InvalidWeight {
                    outcome: label.clone(),
                    value: w,
                });
            }
        }
        let total: f64 = e.weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(OpcError::NotNormalized(total));
        }
        Ok(e)
    }

    /// Any finite nonnegative weight vector. Such a functional need not be an
    /// outer probability content; [`check_axioms`] reports which axioms fail.
    pub fn unnormalized(space: Arc<OutcomeSpace>, weights: Vec<f64>) -> Result<Self, OpcError> {
        if weights.len() != space.len() {
            return Err(OpcError::LengthMismatch {
                expected: space.len(),
                got: weights.len(),
            });
        }
        for (label, &w) in space.labels().iter().zip(&weights) {
            if !w.is_finite() || w < 0.0 {
                return Err(OpcError::InvalidWeight {
                    outcome: label.clone(),
                    value: w,
                });
            }
        }
        Ok(Self { space, weights })
    }

    pub fn uniform(space: Arc<OutcomeSpace>) -> Self {
        let w = 1.0 / space.len() as f64;
        let weights = vec![w; space.len()];
        Self { space, weights }
    }

    pub fn space(&self) -> &Arc<OutcomeSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_of(&self, label: &str) -> Result<f64, OpcError> {
        Ok(self.weights[self.space.index_of(label)?])
    }

    pub fn evaluate(&self, f: &Gamble) -> Result<f64, OpcError> {
        if !same_space(&self.space, &f.space) {
            return Err(OpcError::SpaceMismatch);
        }
        Ok(self
            .weights
            .iter()
            .zip(&f.payoffs)
            .map(|(&w, &v)| mul_ext(w, v))
            .sum())
    }

    /// Samples an outcome index with probabilities proportional to the weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total: f64 = self.weights.iter().sum();
        let mut target = rng.random::<f64>() * total;
        for (i, &w) in self.weights.iter().enumerate() {
            if target < w {
                return i;
            }
            target -= w;
        }
        // rounding can leave target marginally above the last positive weight
        self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }
}

/// A random probability-vector functional on `size` outcomes labelled `"0"..`.
/// Roughly one weight in five is exactly zero, to exercise `0 * inf`.
pub fn random_functional<R: Rng + ?Sized>(rng: &mut R, size: usize) -> ExpectationFunctional {
    let space =
        OutcomeSpace::new((0..size.max(2)).map(|i| i.to_string())).expect("labels are distinct");
    let mut raw: Vec<f64> = (0..space.len())
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()
            }
        })
        .collect();
    if raw.iter().all(|&w| w == 0.0) {
        let i = rng.random_range(0..raw.len());
        raw[i] = 1.0;
    }
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    ExpectationFunctional::new(Arc::new(space), weights).expect("normalized by construction")
}

/// A random gamble: 5% `+inf`, 5% exactly zero, otherwise log-uniform on
/// `[1e-3, 10]`.
pub fn random_gamble<R: Rng + ?Sized>(rng: &mut R, space: &Arc<OutcomeSpace>) -> Gamble {
    let payoffs = (0..space.len()).map(|_| random_payoff(rng)).collect();
    Gamble {
        space: Arc::clone(space),
        payoffs,
    }
}

fn random_payoff<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    if u < 0.05 {
        f64::INFINITY
    } else if u < 0.10 {
        0.0
    } else {
        10f64.powf(rng.random_range(-3.0..=1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Monotonicity,
    Homogeneity,
    Subadditivity,
    Normalization,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::Monotonicity,
        Axiom::Homogeneity,
        Axiom::Subadditivity,
        Axiom::Normalization,
    ];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::Homogeneity => "homogeneity",
            Axiom::Subadditivity => "subadditivity",
            Axiom::Normalization => "normalization",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxiomCheck {
    Pass,
    NotApplicable,
    Fail(String),
}

impl AxiomCheck {
    pub fn is_fail(&self) -> bool {
        matches!(self, AxiomCheck::Fail(_))
    }
}

/// Outcome of the four axiom checks on one `(f, g, c)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCheck {
    pub monotonicity: AxiomCheck,
    pub homogeneity: AxiomCheck,
    pub subadditivity: AxiomCheck,
    pub normalization: AxiomCheck,
}

impl PairCheck {
    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        match axiom {
            Axiom::Monotonicity => &self.monotonicity,
            Axiom::Homogeneity => &self.homogeneity,
            Axiom::Subadditivity => &self.subadditivity,
            Axiom::Normalization => &self.normalization,
        }
    }
}

fn ext_le(a: f64, b: f64) -> bool {
    a <= b || a - b <= AXIOM_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn ext_eq(a: f64, b: f64) -> bool {
    ext_le(a, b) && ext_le(b, a)
}

/// Checks the four axioms on one pair of gambles and one scalar `c > 0`.
/// Normalization is checked on the constant gamble `c`; monotonicity is
/// not applicable unless `f <= g` pointwise.
pub fn check_pair(
    e: &ExpectationFunctional,
    f: &Gamble,
    g: &Gamble,
    c: f64,
) -> Result<PairCheck, OpcError> {
    let ef = e.evaluate(f)?;
    let eg = e.evaluate(g)?;

    let monotonicity = if f.is_dominated_by(g)? {
        if ext_le(ef, eg) {
            AxiomCheck::Pass
        } else {
            AxiomCheck::Fail(format!("f={f} <= g={g} but E(f)={ef} > E(g)={eg}"))
        }
    } else {
        AxiomCheck::NotApplicable
    };

    let ecf = e.evaluate(&f.scale(c))?;
    let homogeneity = if ext_eq(ecf, mul_ext(c, ef)) {
        AxiomCheck::Pass
    } else {
        AxiomCheck::Fail(format!("c={c}, f={f}: E(cf)={ecf} != cE(f)={}", c * ef))
    };

    let esum = e.evaluate(&f.try_add(g)?)?;
    let subadditivity = if ext_le(esum, ef + eg) {
        AxiomCheck::Pass
    } else {
        AxiomCheck::Fail(format!(
            "f={f}, g={g}: E(f+g)={esum} > E(f)+E(g)={}",
            ef + eg
        ))
    };

    let ec = e.evaluate(&Gamble::constant(Arc::clone(e.space()), c)?)?;
    let normalization = if ext_eq(ec, c) {
        AxiomCheck::Pass
    } else {
        AxiomCheck::Fail(format!("E({c}) = {ec} != {c}"))
    };

    Ok(PairCheck {
        monotonicity,
        homogeneity,
        subadditivity,
        normalization,
    })
}

/// Per-axiom tally from [`check_axioms`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomTally {
    pub axiom: Axiom,
    pub checked: usize,
    pub not_applicable: usize,
    pub failures: usize,
    /// First few failure descriptions.
    pub witnesses: Vec<String>,
}

impl AxiomTally {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub seed: u64,
    pub tallies: Vec<AxiomTally>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.tallies.iter().all(AxiomTally::passed)
    }

    pub fn tally(&self, axiom: Axiom) -> &AxiomTally {
        self.tallies
            .iter()
            .find(|t| t.axiom == axiom)
            .expect("every axiom is tallied")
    }
}

const MAX_WITNESSES: usize = 5;

/// Randomized check of the four axioms on `trials` seeded `(f, g, c)` triples.
/// Half the pairs are built with `g >= f` so monotonicity gets exercised.
pub fn check_axioms(e: &ExpectationFunctional, trials: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies: Vec<AxiomTally> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomTally {
            axiom,
            checked: 0,
            not_applicable: 0,
            failures: 0,
            witnesses: Vec::new(),
        })
        .collect();

    for _ in 0..trials {
        let f = random_gamble(&mut rng, e.space());
        let g = if rng.random_bool(0.5) {
            f.try_add(&random_gamble(&mut rng, e.space()))
                .expect("same space")
        } else {
            random_gamble(&mut rng, e.space())
        };
        let c = 10f64.powf(rng.random_range(-2.0..=2.0));
        let outcome = check_pair(e, &f, &g, c).expect("gambles are built on e's space");
        for tally in &mut tallies {
            match outcome.get(tally.axiom) {
                AxiomCheck::Pass => tally.checked += 1,
                AxiomCheck::NotApplicable => tally.not_applicable += 1,
                AxiomCheck::Fail(witness) => {
                    tally.checked += 1;
                    tally.failures += 1;
                    if tally.witnesses.len() < MAX_WITNESSES {
                        tally.witnesses.push(witness.clone());
                    }
                }
            }
        }
    }

    AxiomReport {
        trials,
        seed,
        tallies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin() -> Arc<OutcomeSpace> {
        Arc::new(OutcomeSpace::binary())
    }

    #[test]
    fn space_needs_two_distinct_outcomes() {
        assert_eq!(OutcomeSpace::new(["a"]), Err(OpcError::TooFewOutcomes(1)));
        assert_eq!(
            OutcomeSpace::new(["a", "a"]),
            Err(OpcError::DuplicateOutcome("a".into()))
        );
        assert!(OutcomeSpace::new(["a", "b", "c"]).is_ok());
    }

    #[test]
    fn evaluate_two_point_average() {
        let s = coin();
        let e = ExpectationFunctional::new(s.clone(), vec![0.5, 0.5]).unwrap();
        let f = Gamble::new(s, vec![0.0, 2.0]).unwrap();
        assert_eq!(e.evaluate(&f).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_constant_is_constant() {
        let s = coin();
        let e = ExpectationFunctional::new(s.clone(), vec![0.3, 0.7]).unwrap();
        for c in [0.0, 1.0, 3.25, 1e6] {
            let f = Gamble::constant(s.clone(), c).unwrap();
            assert!((e.evaluate(&f).unwrap() - c).abs() <= 1e-12 * c.max(1.0));
        }
    }

    #[test]
    fn positive_mass_on_infinite_payoff() {
        let s = coin();
        let e = ExpectationFunctional::new(s.clone(), vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let f = Gamble::new(s.clone(), vec![3.0, f64::INFINITY]).unwrap();
        assert_eq!(e.evaluate(&f).unwrap(), f64::INFINITY);

        let point = ExpectationFunctional::new(s, vec![1.0, 0.0]).unwrap();
        assert_eq!(point.evaluate(&f).unwrap(), 3.0);
    }

    #[test]
    fn mismatched_space_is_an_error() {
        let e = ExpectationFunctional::uniform(coin());
        let other = Arc::new(OutcomeSpace::new(["a", "b"]).unwrap());
        let f = Gamble::zero(other);
        assert_eq!(e.evaluate(&f), Err(OpcError::SpaceMismatch));
    }

    #[test]
    fn rejects_bad_weights_and_payoffs() {
        let s = coin();
        assert!(matches!(
            ExpectationFunctional::new(s.clone(), vec![0.6, 0.6]),
            Err(OpcError::NotNormalized(_))
        ));
        assert!(matches!(
            ExpectationFunctional::new(s.clone(), vec![-0.5, 1.5]),
            Err(OpcError::InvalidWeight { .. })
        ));
        assert!(matches!(
            Gamble::new(s.clone(), vec![-1.0, 0.0]),
            Err(OpcError::InvalidPayoff { .. })
        ));
        assert!(matches!(
            Gamble::new(s, vec![f64::NAN, 0.0]),
            Err(OpcError::InvalidPayoff { .. })
        ));
    }

    #[test]
    fn valid_functional_passes_all_axioms() {
        let e = ExpectationFunctional::new(coin(), vec![0.25, 0.75]).unwrap();
        let report = check_axioms(&e, 1000, 7);
        assert!(report.all_passed(), "{report:?}");
        assert!(report.tally(Axiom::Monotonicity).checked > 0);
    }

    #[test]
    fn unnormalized_weights_fail_normalization() {
        let s = coin();
        let e = ExpectationFunctional::unnormalized(s.clone(), vec![0.6, 0.6]).unwrap();
        let one = Gamble::constant(s, 1.0).unwrap();
        assert!((e.evaluate(&one).unwrap() - 1.2).abs() < 1e-12);
        let report = check_axioms(&e, 200, 1);
        assert!(!report.tally(Axiom::Normalization).passed());
        assert!(report.tally(Axiom::Homogeneity).passed());
        assert!(report.tally(Axiom::Subadditivity).passed());
    }

    #[test]
    fn monotonicity_not_applicable_to_incomparable_pair() {
        let s = coin();
        let e = ExpectationFunctional::new(s.clone(), vec![1.0, 0.0]).unwrap();
        let f = Gamble::new(s.clone(), vec![1.0, 5.0]).unwrap();
        let g = Gamble::new(s, vec![2.0, 0.0]).unwrap();
        let check = check_pair(&e, &f, &g, 2.0).unwrap();
        assert_eq!(check.monotonicity, AxiomCheck::NotApplicable);
        assert_eq!(check.homogeneity, AxiomCheck::Pass);
    }

    #[test]
    fn functional_json_shape() {
        let e = ExpectationFunctional::new(coin(), vec![0.5, 0.5]).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"outcomes":["0","1"],"weights":[0.5,0.5]}"#);
        let back: ExpectationFunctional = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<ExpectationFunctional>(
            r#"{"outcomes":["0","1"],"weights":[0.9,0.5]}"#
        )
        .is_err());
    }

    #[test]
    fn affine_respects_zero_times_infinity() {
        let s = coin();
        let f = Gamble::new(s, vec![f64::INFINITY, 2.0]).unwrap();
        assert_eq!(f.affine(0.0, 1.5).payoffs(), &[1.5, 1.5]);
        assert_eq!(f.affine(0.5, 1.0).payoffs(), &[f64::INFINITY, 2.0]);
    }

    #[test]
    fn sampling_follows_weights() {
        let e = ExpectationFunctional::new(coin(), vec![0.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..100).all(|_| e.sample(&mut rng) == 1));
    }
}
