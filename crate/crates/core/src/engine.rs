//! The competitive scepticism protocol, run step by step.
//!
//! `K_0 = K'_0 = 1`. In round `n` Forecaster announces `E_n`, Sceptic `f_n`,
//! Rival Sceptic `f'_n`, Reality `x_n`; then `K_n = f_n(x_n)` and
//! `K'_n = f'_n(x_n)`. Both budgets `E_n(f_n) <= K_{n-1}` and
//! `E_n(f'_n) <= K'_{n-1}` are enforced every round. The running maximum
//! `K*_n = max(1, K_1, .., K_n)` is tracked alongside.

use std::fmt;
use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::calibrator::{CalibrationMeasure, Calibrator};
use crate::opc::{mul_ext, ExpectationFunctional, Gamble, OpcError};
use crate::strategy::{
    within_budget, Forecaster, RivalState, RivalStrategy, ScepticState, ScepticStrategy,
    StrategyError,
};

/// Absolute tolerance for guarantee checks `K'_n >= bound`.
pub const GUARANTEE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Forecaster,
    Sceptic,
    RivalSceptic,
    Reality,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Forecaster => "Forecaster",
            Player::Sceptic => "Sceptic",
            Player::RivalSceptic => "Rival Sceptic",
            Player::Reality => "Reality",
        })
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("step {step}: {player} spent {price} with capital {capital}")]
    BudgetViolation {
        player: Player,
        step: usize,
        price: f64,
        capital: f64,
    },
    #[error("step {step}: Reality chose {outcome:?}, which is not in the outcome space")]
    OutcomeOutOfSpace { step: usize, outcome: String },
    #[error("step {step}: Reality's script is exhausted")]
    ScriptExhausted { step: usize },
    #[error("step {step}: {player}: {source}")]
    Player {
        player: Player,
        step: usize,
        #[source]
        source: StrategyError,
    },
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("transcript output failed: {0}")]
    Output(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl EngineError {
    fn player(player: Player, step: usize, source: impl Into<StrategyError>) -> Self {
        EngineError::Player {
            player,
            step,
            source: source.into(),
        }
    }
}

/// What Reality sees: everything announced so far this round.
#[derive(Debug, Clone, Copy)]
pub struct RealityState<'a> {
    pub step: usize,
    pub history: &'a [usize],
    pub forecast: &'a ExpectationFunctional,
    pub sceptic_move: &'a Gamble,
    pub rival_move: &'a Gamble,
}

pub trait Reality {
    fn next_outcome(&mut self, state: &RealityState<'_>) -> Result<usize, EngineError>;
}

/// Plays a fixed sequence of outcome labels.
#[derive(Debug, Clone)]
pub struct ScriptedReality {
    script: Vec<String>,
}

impl ScriptedReality {
    pub fn new<I, S>(script: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            script: script.into_iter().map(Into::into).collect(),
        }
    }
}

fn resolve(label: &str, state: &RealityState<'_>) -> Result<usize, EngineError> {
    state
        .forecast
        .space()
        .index_of(label)
        .map_err(|_| EngineError::OutcomeOutOfSpace {
            step: state.step,
            outcome: label.to_owned(),
        })
}

impl Reality for ScriptedReality {
    fn next_outcome(&mut self, state: &RealityState<'_>) -> Result<usize, EngineError> {
        let label = self
            .script
            .get(state.step - 1)
            .ok_or(EngineError::ScriptExhausted { step: state.step })?;
        resolve(label, state)
    }
}

/// Always plays the same outcome.
#[derive(Debug, Clone)]
pub struct ConstantReality(pub String);

impl Reality for ConstantReality {
    fn next_outcome(&mut self, state: &RealityState<'_>) -> Result<usize, EngineError> {
        resolve(&self.0, state)
    }
}

/// Samples outcomes i.i.d., either from Forecaster's own weights or from a
/// fixed probability vector over the outcome space.
#[derive(Debug, Clone)]
pub struct SampledReality {
    rng: ChaCha8Rng,
    weights: Option<Vec<f64>>,
}

impl SampledReality {
    /// Samples from Forecaster's weights each round.
    pub fn from_forecasts(seed: u64, stream: u64) -> Self {
        Self {
            rng: seeded(seed, stream),
            weights: None,
        }
    }

    /// Samples from a fixed probability vector.
    pub fn with_weights(seed: u64, stream: u64, weights: Vec<f64>) -> Self {
        Self {
            rng: seeded(seed, stream),
            weights: Some(weights),
        }
    }
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Reality for SampledReality {
    fn next_outcome(&mut self, state: &RealityState<'_>) -> Result<usize, EngineError> {
        match &self.weights {
            None => Ok(state.forecast.sample(&mut self.rng)),
            Some(w) => {
                let dist = ExpectationFunctional::new(state.forecast.space().clone(), w.clone())
                    .map_err(|e| EngineError::player(Player::Reality, state.step, e))?;
                Ok(dist.sample(&mut self.rng))
            }
        }
    }
}

/// One round of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub forecast: ExpectationFunctional,
    pub sceptic_move: Gamble,
    pub rival_move: Gamble,
    pub outcome: usize,
    /// `K_n`.
    pub capital: f64,
    /// `K'_n`.
    pub rival_capital: f64,
    /// `K*_n`.
    pub running_max: f64,
    /// Rival's move decomposed as `weight * f_n + floor`, when affine.
    pub weight: Option<f64>,
    pub floor: Option<f64>,
}

impl StepRecord {
    pub fn outcome_label(&self) -> &str {
        self.forecast.space().label(self.outcome).unwrap_or("?")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    steps: Vec<StepRecord>,
}

impl Transcript {
    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `K_n` for `n = 0..=N`.
    pub fn capital(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.steps[n - 1].capital
        }
    }

    /// `K'_n` for `n = 0..=N`.
    pub fn rival_capital(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.steps[n - 1].rival_capital
        }
    }

    /// `K*_n` for `n = 0..=N`.
    pub fn running_max(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.steps[n - 1].running_max
        }
    }

    pub fn capitals(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.capital).collect()
    }

    pub fn rival_capitals(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.rival_capital).collect()
    }

    pub fn running_maxima(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.running_max).collect()
    }

    pub fn outcome_labels(&self) -> Vec<&str> {
        self.steps.iter().map(StepRecord::outcome_label).collect()
    }

    /// Flat per-step rows; the guarantee fills the `floor_ok` and
    /// `insurance_ok` columns.
    pub fn rows(&self, guarantee: Option<&Guarantee>) -> Vec<TranscriptRow> {
        self.steps
            .iter()
            .map(|s| {
                let (floor_ok, insurance_ok) = match guarantee {
                    Some(g) => (
                        Some(meets(s.rival_capital, g.floor.value(s.running_max))),
                        Some(meets(s.rival_capital, g.bound(s.capital, s.running_max))),
                    ),
                    None => (None, None),
                };
                TranscriptRow {
                    n: s.n,
                    x: s.outcome_label().to_owned(),
                    capital: s.capital,
                    rival_capital: s.rival_capital,
                    running_max: s.running_max,
                    weight: s.weight,
                    floor: s.floor,
                    floor_ok,
                    insurance_ok,
                }
            })
            .collect()
    }

    /// CSV with columns `n, x, K, Kprime, Kstar, weight, floor, floor_ok, insurance_ok`.
    pub fn write_csv<W: io::Write>(
        &self,
        writer: W,
        guarantee: Option<&Guarantee>,
    ) -> Result<(), EngineError> {
        let mut out = csv::Writer::from_writer(writer);
        for row in self.rows(guarantee) {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptRow {
    pub n: usize,
    pub x: String,
    #[serde(rename = "K")]
    pub capital: f64,
    #[serde(rename = "Kprime")]
    pub rival_capital: f64,
    #[serde(rename = "Kstar")]
    pub running_max: f64,
    pub weight: Option<f64>,
    pub floor: Option<f64>,
    pub floor_ok: Option<bool>,
    pub insurance_ok: Option<bool>,
}

/// Runs `horizon` rounds of the protocol.
///
/// Aborts at the first round where a player overspends, names an outcome
/// outside the space, or its strategy fails.
pub fn run(
    forecaster: &dyn Forecaster,
    sceptic: &dyn ScepticStrategy,
    rival: &dyn RivalStrategy,
    reality: &mut dyn Reality,
    horizon: usize,
) -> Result<Transcript, EngineError> {
    if horizon == 0 {
        return Err(EngineError::EmptyHorizon);
    }
    let mut steps = Vec::with_capacity(horizon);
    let mut history = Vec::with_capacity(horizon);
    let mut capital = 1.0;
    let mut rival_capital = 1.0;
    let mut running_max = 1.0_f64;

    for n in 1..=horizon {
        let forecast = forecaster.forecast(n, &history);

        let sceptic_move = sceptic
            .next_move(&ScepticState {
                step: n,
                history: &history,
                capital,
                forecast: &forecast,
            })
            .map_err(|e| EngineError::player(Player::Sceptic, n, e))?;
        check_budget(Player::Sceptic, n, &forecast, &sceptic_move, capital)?;

        let rival_move = rival
            .next_move(&RivalState {
                step: n,
                history: &history,
                capital: rival_capital,
                sceptic_capital: capital,
                sceptic_max: running_max,
                forecast: &forecast,
                sceptic_move: &sceptic_move,
            })
            .map_err(|e| EngineError::player(Player::RivalSceptic, n, e))?;
        check_budget(
            Player::RivalSceptic,
            n,
            &forecast,
            &rival_move.gamble,
            rival_capital,
        )?;

        let outcome = reality.next_outcome(&RealityState {
            step: n,
            history: &history,
            forecast: &forecast,
            sceptic_move: &sceptic_move,
            rival_move: &rival_move.gamble,
        })?;
        if forecast.space().check_index(outcome).is_err() {
            return Err(EngineError::OutcomeOutOfSpace {
                step: n,
                outcome: outcome.to_string(),
            });
        }

        capital = sceptic_move.payoff(outcome);
        rival_capital = rival_move.gamble.payoff(outcome);
        running_max = running_max.max(capital);
        history.push(outcome);

        steps.push(StepRecord {
            n,
            forecast,
            sceptic_move,
            rival_move: rival_move.gamble,
            outcome,
            capital,
            rival_capital,
            running_max,
            weight: rival_move.weight,
            floor: rival_move.floor,
        });
    }
    Ok(Transcript { steps })
}

fn check_budget(
    player: Player,
    step: usize,
    forecast: &ExpectationFunctional,
    gamble: &Gamble,
    capital: f64,
) -> Result<(), EngineError> {
    let price = forecast
        .evaluate(gamble)
        .map_err(|e: OpcError| EngineError::player(player, step, e))?;
    if within_budget(price, capital) {
        Ok(())
    } else {
        Err(EngineError::BudgetViolation {
            player,
            step,
            price,
            capital,
        })
    }
}

/// The increasing function a guarantee is stated in terms of.
#[derive(Debug, Clone, PartialEq)]
pub enum FloorFn {
    Calibrator(Calibrator),
    /// `y -> int_[1,y] u P(du)`.
    Measure(CalibrationMeasure),
}

impl FloorFn {
    pub fn value(&self, y: f64) -> f64 {
        match self {
            FloorFn::Calibrator(f) => f.value(y),
            FloorFn::Measure(p) => p.partial_first_moment(y),
        }
    }
}

/// The target `K'_n >= c K_n + F(K*_n)`; `c = 0` is the plain floor.
#[derive(Debug, Clone, PartialEq)]
pub struct Guarantee {
    pub c: f64,
    pub floor: FloorFn,
}

impl Guarantee {
    pub fn floor(calibrator: Calibrator) -> Self {
        Self {
            c: 0.0,
            floor: FloorFn::Calibrator(calibrator),
        }
    }

    pub fn insured(c: f64, calibrator: Calibrator) -> Self {
        Self {
            c,
            floor: FloorFn::Calibrator(calibrator),
        }
    }

    pub fn bound(&self, capital: f64, running_max: f64) -> f64 {
        mul_ext(self.c, capital) + self.floor.value(running_max)
    }
}

/// `value >= bound - GUARANTEE_TOLERANCE`, with `inf >= anything`.
fn meets(value: f64, bound: f64) -> bool {
    value == f64::INFINITY || value >= bound - GUARANTEE_TOLERANCE
}

fn slack(value: f64, bound: f64) -> f64 {
    if value == f64::INFINITY {
        f64::INFINITY
    } else {
        value - bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCheck {
    pub n: usize,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuaranteeReport {
    pub steps: Vec<StepCheck>,
}

impl GuaranteeReport {
    pub fn all_ok(&self) -> bool {
        self.steps.iter().all(|s| s.ok)
    }

    pub fn min_slack(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.slack)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.steps.iter().find(|s| !s.ok).map(|s| s.n)
    }
}

fn verify_with(t: &Transcript, bound: impl Fn(&StepRecord) -> f64) -> GuaranteeReport {
    GuaranteeReport {
        steps: t
            .steps
            .iter()
            .map(|s| {
                let b = bound(s);
                StepCheck {
                    n: s.n,
                    value: s.rival_capital,
                    bound: b,
                    slack: slack(s.rival_capital, b),
                    ok: meets(s.rival_capital, b),
                }
            })
            .collect(),
    }
}

/// Per-step `K'_n >= F(K*_n)`.
pub fn verify_floor(t: &Transcript, f: &Calibrator) -> GuaranteeReport {
    verify_with(t, |s| f.value(s.running_max))
}

/// Per-step `K'_n >= c K_n + F(K*_n)`.
pub fn verify_insurance(t: &Transcript, c: f64, f: &Calibrator) -> GuaranteeReport {
    verify_guarantee(t, &Guarantee::insured(c, f.clone()))
}

pub fn verify_guarantee(t: &Transcript, g: &Guarantee) -> GuaranteeReport {
    verify_with(t, |s| g.bound(s.capital, s.running_max))
}

/// Minimum slack and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackMin {
    pub slack: f64,
    pub path: usize,
    pub step: usize,
}

impl SlackMin {
    /// Smaller slack wins; ties go to the earlier `(path, step)`, so the
    /// reduction does not depend on evaluation order.
    fn min(self, other: SlackMin) -> SlackMin {
        let key = |s: &SlackMin| (s.slack, s.path, s.step);
        let (a, b) = (key(&self), key(&other));
        match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)) {
            std::cmp::Ordering::Greater => other,
            _ => self,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub paths: usize,
    pub horizon: usize,
    pub seed: u64,
    pub c: Option<f64>,
    /// `min K'_n - F(K*_n)` over all paths and steps.
    pub min_floor_slack: Option<SlackMin>,
    /// `min K'_n - c K_n - F(K*_n)` over all paths and steps.
    pub min_insurance_slack: Option<SlackMin>,
    pub floor_violations: usize,
    pub insurance_violations: usize,
}

impl MonteCarloReport {
    pub fn all_ok(&self) -> bool {
        self.floor_violations == 0 && self.insurance_violations == 0
    }
}

#[derive(Debug, Clone, Copy)]
struct PathSummary {
    floor: Option<SlackMin>,
    insurance: Option<SlackMin>,
    floor_violations: usize,
    insurance_violations: usize,
}

fn merge_min(a: Option<SlackMin>, b: Option<SlackMin>) -> Option<SlackMin> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PathSummary {
    fn merge(self, other: PathSummary) -> PathSummary {
        PathSummary {
            floor: merge_min(self.floor, other.floor),
            insurance: merge_min(self.insurance, other.insurance),
            floor_violations: self.floor_violations + other.floor_violations,
            insurance_violations: self.insurance_violations + other.insurance_violations,
        }
    }

    fn empty() -> PathSummary {
        PathSummary {
            floor: None,
            insurance: None,
            floor_violations: 0,
            insurance_violations: 0,
        }
    }
}

/// Runs `paths` independent games in parallel and reduces the guarantee
/// slacks. Path `p` seeds its Reality from `(seed, p)`, so the report is a
/// pure function of its arguments.
pub fn monte_carlo(
    game: &crate::config::GameSpec,
    paths: usize,
    seed: u64,
) -> Result<MonteCarloReport, EngineError> {
    use rayon::prelude::*;

    if paths == 0 {
        return Err(EngineError::InvalidGame(
            "at least one path is required".into(),
        ));
    }
    let players = game.players()?;
    let guarantee = game.guarantee();

    let summary = (0..paths)
        .into_par_iter()
        .map(|p| -> Result<PathSummary, EngineError> {
            let mut reality = game.reality.build(seed, p as u64);
            let t = run(
                players.forecaster.as_ref(),
                players.sceptic.as_ref(),
                players.rival.as_ref(),
                reality.as_mut(),
                game.horizon,
            )?;
            let Some(g) = &guarantee else {
                return Ok(PathSummary::empty());
            };
            let mut summary = PathSummary::empty();
            for s in t.steps() {
                let floor_bound = g.floor.value(s.running_max);
                let full_bound = g.bound(s.capital, s.running_max);
                let floor = SlackMin {
                    slack: slack(s.rival_capital, floor_bound),
                    path: p,
                    step: s.n,
                };
                let insurance = SlackMin {
                    slack: slack(s.rival_capital, full_bound),
                    path: p,
                    step: s.n,
                };
                summary.floor = merge_min(summary.floor, Some(floor));
                summary.insurance = merge_min(summary.insurance, Some(insurance));
                summary.floor_violations += usize::from(!meets(s.rival_capital, floor_bound));
                summary.insurance_violations += usize::from(!meets(s.rival_capital, full_bound));
            }
            Ok(summary)
        })
        .try_reduce(PathSummary::empty, |a, b| Ok(a.merge(b)))?;

    Ok(MonteCarloReport {
        paths,
        horizon: game.horizon,
        seed,
        c: guarantee.as_ref().map(|g| g.c),
        min_floor_slack: summary.floor,
        min_insurance_slack: summary.insurance,
        floor_violations: summary.floor_violations,
        insurance_violations: summary.insurance_violations,
    })
}
