//! Superhedging prices on the coin game, and a falsifier for would-be
//! calibrators.
//!
//! Forecaster prices every round at `(1/a) f(1) + (1 - 1/a) f(0)` and Sceptic
//! bets everything on `1`, so after `N` rounds `K*_N = a^n` where `n` is the
//! length of the initial run of ones. A Rival target `c K_N + G(K*_N)` then
//! costs
//!
//! ```text
//! c + sum_{k<N} G(a^k) a^-k (1 - 1/a) + G(a^N) a^-N
//! ```
//!
//! up front. [`closed_form_price`] evaluates that sum; [`dp_price`] gets the
//! same number by backward induction over the run-length states, pricing each
//! node with Forecaster's functional. If the price of `F(K*_N)` (plus `c`)
//! exceeds 1 for some `a` and `N`, `F` cannot be guaranteed from unit capital.

use serde::Serialize;
use thiserror::Error;

use crate::calibrator::{Calibrator, EXACT_TOLERANCE};
use crate::opc::{mul_ext, Gamble};
use crate::strategy::{
    CoinForecaster, DoublingSceptic, ScepticState, ScepticStrategy, StrategyError,
};

/// Default cap on `N` for [`falsify`].
pub const DEFAULT_MAX_HORIZON: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid counterexample parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// How the table treats the last grid point `a^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    /// `G(a^N) = 0`: the minorant vanishes on `[a^N, inf)`.
    Zero,
    /// `G(a^N) = F(a^N)`: the exact target on the doubling paths.
    Evaluate,
}

/// `G` on the grid `1, a, .., a^N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffTable {
    a: f64,
    values: Vec<f64>,
}

impl PayoffTable {
    /// `values[k] = G(a^k)` for `k = 0..=N`.
    pub fn new(a: f64, values: Vec<f64>) -> Result<Self, OracleError> {
        check_a(a)?;
        if values.len() < 2 {
            return Err(OracleError::InvalidParams(
                "a payoff table needs N >= 1, i.e. at least two values".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(OracleError::InvalidParams(
                "payoff values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { a, values })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_a(a: f64) -> Result<(), OracleError> {
    if a.is_finite() && a > 1.0 {
        Ok(())
    } else {
        Err(OracleError::InvalidParams(format!("need a > 1, got {a}")))
    }
}

/// The Rival's target after `N` rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// `G(K*_N)`.
    Floor,
    /// `c K_N + G(K*_N)`.
    Insured { c: f64 },
}

impl Target {
    fn c(&self) -> f64 {
        match self {
            Target::Floor => 0.0,
            Target::Insured { c } => *c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleParams {
    pub table: PayoffTable,
    pub target: Target,
}

impl CounterexampleParams {
    pub fn floor(table: PayoffTable) -> Self {
        Self {
            table,
            target: Target::Floor,
        }
    }

    pub fn insured(c: f64, table: PayoffTable) -> Result<Self, OracleError> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(OracleError::InvalidParams(format!("need c >= 0, got {c}")));
        }
        Ok(Self {
            table,
            target: Target::Insured { c },
        })
    }
}

/// Table of `F` on `1, a, .., a^N` at the left grid points, which minorizes
/// an increasing `F` on each `[a^k, a^(k+1))`.
pub fn step_minorant(
    f: &Calibrator,
    a: f64,
    horizon: usize,
    terminal: Terminal,
) -> Result<PayoffTable, OracleError> {
    check_a(a)?;
    if horizon == 0 {
        return Err(OracleError::InvalidParams("need N >= 1".into()));
    }
    let mut values: Vec<f64> = (0..horizon).map(|k| f.value(a.powi(k as i32))).collect();
    values.push(match terminal {
        Terminal::Zero => 0.0,
        Terminal::Evaluate => f.value(a.powi(horizon as i32)),
    });
    PayoffTable::new(a, values)
}

/// `c + sum_{k<N} G(a^k) a^-k (1 - 1/a) + G(a^N) a^-N`.
pub fn closed_form_price(params: &CounterexampleParams) -> f64 {
    let a = params.table.a;
    let g = &params.table.values;
    let n = params.table.horizon();
    let stop = 1.0 - 1.0 / a;
    let body: f64 = (0..n).map(|k| g[k] * a.powi(-(k as i32)) * stop).sum();
    params.target.c() + body + g[n] * a.powi(-(n as i32))
}

/// Minimal initial capital for the target, by backward induction.
///
/// The doubling Sceptic's capital is replayed forward to get the run-length
/// states: alive after `n` ones with capital `K_n`, or stopped with `K*`
/// frozen at the grid point reached before the first zero. Each node's value
/// is the cheapest gamble covering its two children, which under a linear
/// Forecaster is the forecast price of the children's values.
pub fn dp_price(params: &CounterexampleParams) -> Result<f64, OracleError> {
    let a = params.table.a;
    let g = &params.table.values;
    let horizon = params.table.horizon();
    let c = params.target.c();

    let forecaster = CoinForecaster::new(a)?;
    let e = forecaster.functional();
    let space = e.space().clone();
    let up = space.index_of("1").map_err(StrategyError::from)?;
    let down = space.index_of("0").map_err(StrategyError::from)?;
    let sceptic = DoublingSceptic::new(a)?;

    // forward pass: capital along the run of ones, and on the first zero
    let mut alive_capital = vec![1.0];
    let mut loss_capital = Vec::with_capacity(horizon);
    let mut history = Vec::with_capacity(horizon);
    for n in 0..horizon {
        let f = sceptic.next_move(&ScepticState {
            step: n + 1,
            history: &history,
            capital: alive_capital[n],
            forecast: e,
        })?;
        alive_capital.push(f.payoff(up));
        loss_capital.push(f.payoff(down));
        history.push(up);
    }

    // stopped[k]: value of the state stopped with K* = a^k (k < current time)
    let mut stopped: Vec<f64> = (0..horizon)
        .map(|k| mul_ext(c, loss_capital[k]) + g[k])
        .collect();
    let mut alive = mul_ext(c, alive_capital[horizon]) + g[horizon];

    let price = |down_value: f64, up_value: f64| -> Result<f64, OracleError> {
        let mut payoffs = vec![0.0; space.len()];
        payoffs[down] = down_value;
        payoffs[up] = up_value;
        let hedge = Gamble::new(space.clone(), payoffs).map_err(StrategyError::from)?;
        Ok(e.evaluate(&hedge).map_err(StrategyError::from)?)
    };

    for n in (0..horizon).rev() {
        for value in stopped.iter_mut().take(n) {
            *value = price(*value, *value)?;
        }
        alive = price(stopped[n], alive)?;
    }
    Ok(alive)
}

/// A proof that `F` is not a calibrator at insurance level `c`: on the coin
/// game with this `a` and `N`, securing the target costs more than 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub a: f64,
    #[serde(rename = "N")]
    pub horizon: usize,
    pub terminal: Terminal,
    pub price: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Falsification {
    Certificate {
        integral: f64,
        certificate: Certificate,
    },
    /// The integral condition holds, so no certificate exists.
    NoViolationFound { integral: f64 },
    /// The integral condition fails but no grid point up to the cap exposed it.
    SearchExhausted { integral: f64, best_price: f64 },
}

impl Falsification {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Falsification::Certificate { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

/// Grid ratios tried by [`falsify`], finest first.
pub fn search_grid() -> [f64; 5] {
    [2f64.powf(0.125), 2f64.powf(0.25), 2f64.sqrt(), 2.0, 4.0]
}

/// Searches for a coin-game certificate that `c K_N + F(K*_N)` cannot be
/// secured from unit capital.
///
/// For `N = 1, 2, ..` and each ratio in [`search_grid`], the zero-terminal
/// minorant is priced first and then the exact target; the first price above
/// `1 + 1e-9` is returned.
pub fn falsify(f: &Calibrator, c: f64, max_horizon: usize) -> Falsification {
    let integral = f.calibration_integral();
    if integral <= 1.0 - c + EXACT_TOLERANCE {
        return Falsification::NoViolationFound { integral };
    }

    let grid = search_grid();
    // running sums of G(a^k) a^-k (1 - 1/a) over k < N, per ratio
    let mut sums = [0.0; 5];
    let mut best_price = f64::NEG_INFINITY;
    for horizon in 1..=max_horizon {
        for (i, &a) in grid.iter().enumerate() {
            let k = (horizon - 1) as i32;
            let discount = a.powi(-k);
            sums[i] += mul_ext(discount * (1.0 - 1.0 / a), f.value(a.powi(k)));

            let zero_terminal = c + sums[i];
            let exact =
                zero_terminal + mul_ext(a.powi(-(horizon as i32)), f.value(a.powi(horizon as i32)));
            for (terminal, price) in [(Terminal::Zero, zero_terminal), (Terminal::Evaluate, exact)]
            {
                best_price = best_price.max(price);
                if price > 1.0 + EXACT_TOLERANCE {
                    return Falsification::Certificate {
                        integral,
                        certificate: Certificate {
                            a,
                            horizon,
                            terminal,
                            price,
                        },
                    };
                }
            }
        }
    }
    Falsification::SearchExhausted {
        integral,
        best_price,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Both prices are at most 1.
    WithinBudget,
    /// Some price exceeds 1: the target cannot be secured from unit capital.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub calibrator: Calibrator,
    pub c: f64,
    pub a: f64,
    #[serde(rename = "N")]
    pub horizon: usize,
    /// Price of `c K_N + F(K*_N)` with `F` evaluated at every grid point.
    pub closed_form_price: f64,
    pub dp_price: f64,
    /// Same with the minorant set to zero at `a^N`.
    pub closed_form_price_zero_terminal: f64,
    pub dp_price_zero_terminal: f64,
    pub verdict: Verdict,
}

pub fn tightness(
    f: &Calibrator,
    c: f64,
    a: f64,
    horizon: usize,
) -> Result<TightnessReport, OracleError> {
    let exact =
        CounterexampleParams::insured(c, step_minorant(f, a, horizon, Terminal::Evaluate)?)?;
    let zero = CounterexampleParams::insured(c, step_minorant(f, a, horizon, Terminal::Zero)?)?;
    let exact_closed = closed_form_price(&exact);
    let exact_dp = dp_price(&exact)?;
    let worst = exact_closed.max(exact_dp);
    Ok(TightnessReport {
        calibrator: f.clone(),
        c,
        a,
        horizon,
        closed_form_price: exact_closed,
        dp_price: exact_dp,
        closed_form_price_zero_terminal: closed_form_price(&zero),
        dp_price_zero_terminal: dp_price(&zero)?,
        verdict: if worst > 1.0 + EXACT_TOLERANCE {
            Verdict::Violation
        } else {
            Verdict::WithinBudget
        },
    })
}
