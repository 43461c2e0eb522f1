//! Players of the competitive scepticism game.
//!
//! Each round Forecaster announces a pricing functional `E_n`, Sceptic a
//! gamble `f_n` with `E_n(f_n) <= K_{n-1}`, and Rival Sceptic a gamble `f'_n`
//! with `E_n(f'_n) <= K'_{n-1}`. Rival Sceptic moves after Sceptic and sees
//! `f_n`; every Rival strategy here is affine in it, `f'_n = w * f_n + b`.
//!
//! The strategies are immutable rules. Per-game state (capitals, running
//! maximum, history) is owned by the engine and passed in on every call.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::calibrator::{
    CalibrationMeasure, Calibrator, CalibratorError, InsuranceParams, EXACT_TOLERANCE,
};
use crate::engine::{Transcript, GUARANTEE_TOLERANCE};
use crate::opc::{
    mul_ext, random_functional, ExpectationFunctional, Gamble, OpcError, OutcomeSpace,
};

/// Relative slack allowed on budget constraints, `E_n(f) <= K (1 + tol)`.
pub const BUDGET_TOLERANCE: f64 = 1e-12;

/// Relative tolerance for the exact mixture capital identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Opc(#[from] OpcError),
    #[error(transparent)]
    Calibrator(#[from] CalibratorError),
    #[error("step {step}: Sceptic's move costs {price} but his capital is {capital}")]
    BaseBudget {
        step: usize,
        price: f64,
        capital: f64,
    },
    #[error("mixture needs a probability measure, total mass is {total_mass}")]
    NotProbability { total_mass: f64 },
    #[error("insurance needs int F(y)/y^2 dy <= 1 - c, got {integral} with c = {c}")]
    InsuranceCondition { integral: f64, c: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `price <= capital` up to [`BUDGET_TOLERANCE`], relative for large capitals.
pub fn within_budget(price: f64, capital: f64) -> bool {
    price <= capital || price - capital <= BUDGET_TOLERANCE * capital.abs().max(1.0)
}

pub trait Forecaster: Send + Sync {
    /// `E_n` given the outcomes `x_1..x_{n-1}` (as indices into the space).
    fn forecast(&self, step: usize, history: &[usize]) -> ExpectationFunctional;
}

/// Prices `f` at `(1/a) f(1) + (1 - 1/a) f(0)` every round.
#[derive(Debug, Clone)]
pub struct CoinForecaster {
    a: f64,
    functional: ExpectationFunctional,
}

impl CoinForecaster {
    pub fn new(a: f64) -> Result<Self, StrategyError> {
        if !(a.is_finite() && a > 1.0) {
            return Err(StrategyError::InvalidParameter(format!(
                "coin forecaster needs a > 1, got {a}"
            )));
        }
        let up = 1.0 / a;
        let functional =
            ExpectationFunctional::new(Arc::new(OutcomeSpace::binary()), vec![1.0 - up, up])?;
        Ok(Self { a, functional })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn functional(&self) -> &ExpectationFunctional {
        &self.functional
    }
}

impl Forecaster for CoinForecaster {
    fn forecast(&self, _step: usize, _history: &[usize]) -> ExpectationFunctional {
        self.functional.clone()
    }
}

/// Announces the same functional every round.
#[derive(Debug, Clone)]
pub struct ConstantForecaster(pub ExpectationFunctional);

impl Forecaster for ConstantForecaster {
    fn forecast(&self, _step: usize, _history: &[usize]) -> ExpectationFunctional {
        self.0.clone()
    }
}

/// A fresh pseudo-random functional each round, determined by the seed and
/// the step index.
#[derive(Debug, Clone)]
pub struct RandomForecaster {
    seed: u64,
    outcomes: usize,
}

impl RandomForecaster {
    pub fn new(seed: u64, outcomes: usize) -> Result<Self, StrategyError> {
        if outcomes < 2 {
            return Err(OpcError::TooFewOutcomes(outcomes).into());
        }
        Ok(Self { seed, outcomes })
    }
}

impl Forecaster for RandomForecaster {
    fn forecast(&self, step: usize, _history: &[usize]) -> ExpectationFunctional {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, step as u64));
        random_functional(&mut rng, self.outcomes)
    }
}

/// What Sceptic sees before moving.
#[derive(Debug, Clone, Copy)]
pub struct ScepticState<'a> {
    /// Round index `n`, starting at 1.
    pub step: usize,
    /// Outcomes `x_1..x_{n-1}`.
    pub history: &'a [usize],
    /// `K_{n-1}`.
    pub capital: f64,
    pub forecast: &'a ExpectationFunctional,
}

pub trait ScepticStrategy: Send + Sync {
    fn next_move(&self, state: &ScepticState<'_>) -> Result<Gamble, StrategyError>;
}

/// Bets the whole capital on one outcome at Forecaster's odds:
/// `f_n(target) = a K_{n-1}`, zero elsewhere. Once broke, stays broke.
#[derive(Debug, Clone)]
pub struct DoublingSceptic {
    a: f64,
    target: String,
}

impl DoublingSceptic {
    pub fn new(a: f64) -> Result<Self, StrategyError> {
        Self::with_target(a, "1")
    }

    pub fn with_target(a: f64, target: impl Into<String>) -> Result<Self, StrategyError> {
        if !(a.is_finite() && a > 1.0) {
            return Err(StrategyError::InvalidParameter(format!(
                "doubling sceptic needs a > 1, got {a}"
            )));
        }
        Ok(Self {
            a,
            target: target.into(),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

impl ScepticStrategy for DoublingSceptic {
    fn next_move(&self, state: &ScepticState<'_>) -> Result<Gamble, StrategyError> {
        let space = state.forecast.space();
        let target = space.index_of(&self.target)?;
        let mut payoffs = vec![0.0; space.len()];
        payoffs[target] = self.a * state.capital;
        Ok(Gamble::new(Arc::clone(space), payoffs)?)
    }
}

/// Keeps the capital unchanged: `f_n == K_{n-1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeverBetSceptic;

impl ScepticStrategy for NeverBetSceptic {
    fn next_move(&self, state: &ScepticState<'_>) -> Result<Gamble, StrategyError> {
        Ok(Gamble::constant(
            Arc::clone(state.forecast.space()),
            state.capital,
        )?)
    }
}

/// Spends exactly its capital on a pseudo-random finite gamble each round.
/// The move is a deterministic function of the seed, step and history.
#[derive(Debug, Clone, Copy)]
pub struct RandomSceptic {
    seed: u64,
}

impl RandomSceptic {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }
}

impl ScepticStrategy for RandomSceptic {
    fn next_move(&self, state: &ScepticState<'_>) -> Result<Gamble, StrategyError> {
        let key = state
            .history
            .iter()
            .fold(mix(self.seed, state.step as u64), |h, &x| mix(h, x as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let space = state.forecast.space();
        let raw: Vec<f64> = (0..space.len())
            .map(|_| {
                // heavy-ish tails so that capital can both grow and collapse
                let u: f64 = rng.random();
                if u < 0.1 {
                    0.0
                } else {
                    10f64.powf(rng.random_range(-2.0..=1.0))
                }
            })
            .collect();
        let raw = Gamble::new(Arc::clone(space), raw)?;
        let price = state.forecast.evaluate(&raw)?;
        if price > 0.0 && state.capital.is_finite() {
            Ok(raw.scale(state.capital / price))
        } else {
            Ok(Gamble::constant(Arc::clone(space), state.capital)?)
        }
    }
}

/// What Rival Sceptic sees before moving, including Sceptic's move.
#[derive(Debug, Clone, Copy)]
pub struct RivalState<'a> {
    pub step: usize,
    pub history: &'a [usize],
    /// `K'_{n-1}`.
    pub capital: f64,
    /// `K_{n-1}`.
    pub sceptic_capital: f64,
    /// `K*_{n-1}`, with `K*_0 = 1`.
    pub sceptic_max: f64,
    pub forecast: &'a ExpectationFunctional,
    /// `f_n`.
    pub sceptic_move: &'a Gamble,
}

impl RivalState<'_> {
    fn check_sceptic_budget(&self) -> Result<(), StrategyError> {
        let price = self.forecast.evaluate(self.sceptic_move)?;
        if within_budget(price, self.sceptic_capital) {
            Ok(())
        } else {
            Err(StrategyError::BaseBudget {
                step: self.step,
                price,
                capital: self.sceptic_capital,
            })
        }
    }
}

/// Rival Sceptic's gamble, with its affine decomposition
/// `gamble = weight * f_n + floor` when the strategy has one.
#[derive(Debug, Clone, PartialEq)]
pub struct RivalMove {
    pub gamble: Gamble,
    pub weight: Option<f64>,
    pub floor: Option<f64>,
}

impl RivalMove {
    pub fn affine(sceptic_move: &Gamble, weight: f64, floor: f64) -> Self {
        Self {
            gamble: sceptic_move.affine(weight, floor),
            weight: Some(weight),
            floor: Some(floor),
        }
    }

    pub fn opaque(gamble: Gamble) -> Self {
        Self {
            gamble,
            weight: None,
            floor: None,
        }
    }
}

pub trait RivalStrategy: Send + Sync {
    fn next_move(&self, state: &RivalState<'_>) -> Result<RivalMove, StrategyError>;
}

/// Holds the capital: `f'_n == K'_{n-1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeverBetRival;

impl RivalStrategy for NeverBetRival {
    fn next_move(&self, state: &RivalState<'_>) -> Result<RivalMove, StrategyError> {
        Ok(RivalMove::affine(state.sceptic_move, 0.0, state.capital))
    }
}

/// Copies Sceptic: `f'_n = f_n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CopyRival;

impl RivalStrategy for CopyRival {
    fn next_move(&self, state: &RivalState<'_>) -> Result<RivalMove, StrategyError> {
        Ok(RivalMove::affine(state.sceptic_move, 1.0, 0.0))
    }
}

/// Follows Sceptic while his running maximum is below `u`, then holds `u`.
///
/// The comparison `K*_{n-1} < u` is strict: reaching `u` exactly stops.
#[derive(Debug, Clone, Copy)]
pub struct StoppedStrategy {
    threshold: f64,
}

impl StoppedStrategy {
    pub fn new(threshold: f64) -> Result<Self, StrategyError> {
        if !(threshold.is_finite() && threshold >= 1.0) {
            return Err(StrategyError::InvalidParameter(format!(
                "stopping level must be finite and >= 1, got {threshold}"
            )));
        }
        Ok(Self { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_stopped(&self, sceptic_max: f64) -> bool {
        sceptic_max >= self.threshold
    }
}

impl RivalStrategy for StoppedStrategy {
    fn next_move(&self, state: &RivalState<'_>) -> Result<RivalMove, StrategyError> {
        if self.is_stopped(state.sceptic_max) {
            Ok(RivalMove::affine(state.sceptic_move, 0.0, self.threshold))
        } else {
            state.check_sceptic_budget()?;
            Ok(RivalMove::affine(state.sceptic_move, 1.0, 0.0))
        }
    }
}

/// The `P`-average of the stopped strategies, in closed form:
/// `f'_n = P((K*_{n-1}, inf)) f_n + F(K*_{n-1})` with
/// `F(y) = int_[1,y] u P(du)`.
#[derive(Debug, Clone)]
pub struct MixtureStrategy {
    measure: CalibrationMeasure,
}

impl MixtureStrategy {
    pub fn new(measure: CalibrationMeasure) -> Result<Self, StrategyError> {
        if !measure.is_probability() {
            return Err(StrategyError::NotProbability {
                total_mass: measure.total_mass(),
            });
        }
        Ok(Self { measure })
    }

    /// Mixture for an admissible calibrator.
    pub fn from_calibrator(f: &Calibrator) -> Result<Self, StrategyError> {
        Self::new(f.measure()?)
    }

    pub fn measure(&self) -> &CalibrationMeasure {
        &self.measure
    }

    /// `(weight, floor)` for a running maximum `K*_{n-1}`.
    pub fn coefficients(&self, sceptic_max: f64) -> (f64, f64) {
        (
            self.measure.tail_mass(sceptic_max),
            self.measure.partial_first_moment(sceptic_max),
        )
    }
}

impl RivalStrategy for MixtureStrategy {
    fn next_move(&self, state: &RivalState<'_>) -> Result<RivalMove, StrategyError> {
        state.check_sceptic_budget()?;
        let (weight, floor) = self.coefficients(state.sceptic_max);
        Ok(RivalMove::affine(state.sceptic_move, weight, floor))
    }
}

/// `c f_n + (1 - c) f'_n`, where `f'` is the mixture for `F / (1 - c)`
/// (completed to an admissible calibrator if it has slack). Guarantees
/// `K'_n >= c K_n + F(K*_n)`.
#[derive(Debug, Clone)]
pub struct InsuranceStrategy {
    c: f64,
    calibrator: Calibrator,
    inner: Option<MixtureStrategy>,
}

impl InsuranceStrategy {
    pub fn new(c: f64, calibrator: Calibrator) -> Result<Self, StrategyError> {
        let c = InsuranceParams::new(c)?.c();
        let integral = calibrator.calibration_integral();
        if integral > 1.0 - c + EXACT_TOLERANCE {
            return Err(StrategyError::InsuranceCondition { integral, c });
        }
        let inner = if c < 1.0 {
            let mut rescaled = calibrator.scaled(1.0 / (1.0 - c))?;
            // the tolerance on the condition can leave the rescaled integral just above 1
            let inner_integral = rescaled.calibration_integral();
            if inner_integral > 1.0 {
                rescaled = rescaled.scaled(1.0 / inner_integral)?;
            }
            Some(MixtureStrategy::from_calibrator(
                &rescaled.dominate_to_admissible()?,
            )?)
        } else {
            None
        };
        Ok(Self {
            c,
            calibrator,
            inner,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn calibrator(&self) -> &Calibrator {
        &self.calibrator
    }

    pub fn inner(&self) -> Option<&MixtureStrategy> {
        self.inner.as_ref()
    }
}

impl RivalStrategy for InsuranceStrategy {
    fn next_move(&self, state: &RivalState<'_>) -> Result<RivalMove, StrategyError> {
        state.check_sceptic_budget()?;
        let (weight, floor) = match &self.inner {
            Some(inner) => {
                let (w, b) = inner.coefficients(state.sceptic_max);
                (self.c + (1.0 - self.c) * w, (1.0 - self.c) * b)
            }
            None => (1.0, 0.0),
        };
        Ok(RivalMove::affine(state.sceptic_move, weight, floor))
    }
}

/// Which capital relation a mixture transcript broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MixtureBound {
    /// `K'_n = P((K*_{n-1}, inf)) K_n + F(K*_{n-1})`.
    Identity,
    /// `K'_n >= P((K*_n, inf)) K_n + F(K*_n)`.
    Stronger,
    /// `K'_n >= F(K*_n)`.
    Floor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub n: usize,
    /// `K'_n` minus the identity's right-hand side.
    pub identity_error: f64,
    pub stronger_slack: f64,
    pub floor_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub steps: Vec<IdentityCheck>,
    /// `(step, bound)` for every failed relation.
    pub violations: Vec<(usize, MixtureBound)>,
}

impl IdentityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn ext_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

/// Checks a transcript whose Rival played `mixture` against the closed-form
/// capital identity and the two guarantees it implies.
pub fn mixture_capital_identity(t: &Transcript, mixture: &MixtureStrategy) -> IdentityReport {
    let p = mixture.measure();
    let mut steps = Vec::with_capacity(t.len());
    let mut violations = Vec::new();
    for s in t.steps() {
        let previous_max = t.running_max(s.n - 1);
        let k = s.capital;
        let rival = s.rival_capital;

        let identity = mul_ext(p.tail_mass(previous_max), k) + p.partial_first_moment(previous_max);
        let identity_error = ext_diff(rival, identity);
        if identity_error.abs() > IDENTITY_TOLERANCE * rival.abs().max(1.0)
            && !identity_error.is_nan()
        {
            violations.push((s.n, MixtureBound::Identity));
        }

        let stronger =
            mul_ext(p.tail_mass(s.running_max), k) + p.partial_first_moment(s.running_max);
        let stronger_slack = ext_diff(rival, stronger);
        if stronger_slack < -GUARANTEE_TOLERANCE {
            violations.push((s.n, MixtureBound::Stronger));
        }

        let floor_slack = ext_diff(rival, p.partial_first_moment(s.running_max));
        if floor_slack < -GUARANTEE_TOLERANCE {
            violations.push((s.n, MixtureBound::Floor));
        }

        steps.push(IdentityCheck {
            n: s.n,
            identity_error,
            stronger_slack,
            floor_slack,
        });
    }
    IdentityReport { steps, violations }
}

/// SplitMix64 step over a running key.
pub(crate) fn mix(key: u64, value: u64) -> u64 {
    let mut z = key ^ value.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
