//! JSON game specifications and the players they build.
//!
//! ```json
//! {
//!   "forecaster": {"kind": "coin", "a": 2},
//!   "sceptic": {"kind": "doubling", "a": 2},
//!   "rival": {"kind": "mixture", "calibrator": {"kind": "power", "alpha": 0.5}},
//!   "reality": {"kind": "script", "outcomes": ["1", "1", "0"]},
//!   "N": 3,
//!   "seed": 0
//! }
//! ```
//!
//! Unknown fields are rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::calibrator::{CalibrationMeasure, Calibrator};
use crate::engine::{
    self, ConstantReality, EngineError, FloorFn, Guarantee, Reality, SampledReality,
    ScriptedReality, Transcript,
};
use crate::opc::ExpectationFunctional;
use crate::strategy::{
    CoinForecaster, ConstantForecaster, CopyRival, DoublingSceptic, Forecaster, InsuranceStrategy,
    MixtureStrategy, NeverBetRival, NeverBetSceptic, RandomForecaster, RandomSceptic,
    RivalStrategy, ScepticStrategy, StoppedStrategy, StrategyError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForecasterSpec {
    Coin { a: f64 },
    Constant { functional: ExpectationFunctional },
    Random { seed: u64, outcomes: usize },
}

impl ForecasterSpec {
    pub fn build(&self) -> Result<Box<dyn Forecaster>, StrategyError> {
        Ok(match self {
            ForecasterSpec::Coin { a } => Box::new(CoinForecaster::new(*a)?),
            ForecasterSpec::Constant { functional } => {
                Box::new(ConstantForecaster(functional.clone()))
            }
            ForecasterSpec::Random { seed, outcomes } => {
                Box::new(RandomForecaster::new(*seed, *outcomes)?)
            }
        })
    }
}

fn default_target() -> String {
    "1".to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScepticSpec {
    Doubling {
        a: f64,
        #[serde(default = "default_target")]
        target: String,
    },
    NeverBet,
    Random {
        seed: u64,
    },
}

impl ScepticSpec {
    pub fn build(&self) -> Result<Box<dyn ScepticStrategy>, StrategyError> {
        Ok(match self {
            ScepticSpec::Doubling { a, target } => {
                Box::new(DoublingSceptic::with_target(*a, target.clone())?)
            }
            ScepticSpec::NeverBet => Box::new(NeverBetSceptic),
            ScepticSpec::Random { seed } => Box::new(RandomSceptic::new(*seed)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RivalSpec {
    NeverBet,
    Copy,
    Stopped {
        u: f64,
    },
    /// Exactly one of `measure` and `calibrator`.
    Mixture {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        measure: Option<CalibrationMeasure>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        calibrator: Option<Calibrator>,
    },
    Insurance {
        c: f64,
        calibrator: Calibrator,
    },
}

impl RivalSpec {
    pub fn build(&self) -> Result<Box<dyn RivalStrategy>, StrategyError> {
        Ok(match self {
            RivalSpec::NeverBet => Box::new(NeverBetRival),
            RivalSpec::Copy => Box::new(CopyRival),
            RivalSpec::Stopped { u } => Box::new(StoppedStrategy::new(*u)?),
            RivalSpec::Mixture {
                measure,
                calibrator,
            } => match (measure, calibrator) {
                (Some(p), None) => Box::new(MixtureStrategy::new(p.clone())?),
                (None, Some(f)) => Box::new(MixtureStrategy::from_calibrator(f)?),
                _ => {
                    return Err(StrategyError::InvalidParameter(
                        "mixture needs exactly one of \"measure\" or \"calibrator\"".into(),
                    ))
                }
            },
            RivalSpec::Insurance { c, calibrator } => {
                Box::new(InsuranceStrategy::new(*c, calibrator.clone())?)
            }
        })
    }

    /// The guarantee this Rival is built to meet, if it has one.
    pub fn implied_guarantee(&self) -> Option<Guarantee> {
        match self {
            RivalSpec::Mixture {
                calibrator: Some(f),
                ..
            } => Some(Guarantee::floor(f.clone())),
            RivalSpec::Mixture {
                measure: Some(p), ..
            } => Some(Guarantee {
                c: 0.0,
                floor: FloorFn::Measure(p.clone()),
            }),
            RivalSpec::Insurance { c, calibrator } => {
                Some(Guarantee::insured(*c, calibrator.clone()))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RealitySpec {
    Script {
        outcomes: Vec<String>,
    },
    Constant {
        outcome: String,
    },
    /// Samples from Forecaster's weights.
    #[default]
    Iid,
    /// Samples from a fixed probability vector.
    Distribution {
        weights: Vec<f64>,
    },
}

impl RealitySpec {
    /// `stream` separates independent paths sharing one seed.
    pub fn build(&self, seed: u64, stream: u64) -> Box<dyn Reality> {
        match self {
            RealitySpec::Script { outcomes } => Box::new(ScriptedReality::new(outcomes.clone())),
            RealitySpec::Constant { outcome } => Box::new(ConstantReality(outcome.clone())),
            RealitySpec::Iid => Box::new(SampledReality::from_forecasts(seed, stream)),
            RealitySpec::Distribution { weights } => {
                Box::new(SampledReality::with_weights(seed, stream, weights.clone()))
            }
        }
    }
}

/// `K'_n >= c K_n + F(K*_n)` to check transcripts against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuaranteeSpec {
    #[serde(default)]
    pub c: f64,
    pub calibrator: Calibrator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub forecaster: ForecasterSpec,
    pub sceptic: ScepticSpec,
    pub rival: RivalSpec,
    #[serde(default)]
    pub reality: RealitySpec,
    #[serde(rename = "N")]
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the guarantee implied by the Rival.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guarantee: Option<GuaranteeSpec>,
}

pub struct Players {
    pub forecaster: Box<dyn Forecaster>,
    pub sceptic: Box<dyn ScepticStrategy>,
    pub rival: Box<dyn RivalStrategy>,
}

impl GameSpec {
    pub fn players(&self) -> Result<Players, EngineError> {
        let invalid = |e: StrategyError| EngineError::InvalidGame(e.to_string());
        Ok(Players {
            forecaster: self.forecaster.build().map_err(invalid)?,
            sceptic: self.sceptic.build().map_err(invalid)?,
            rival: self.rival.build().map_err(invalid)?,
        })
    }

    pub fn guarantee(&self) -> Option<Guarantee> {
        match &self.guarantee {
            Some(g) => Some(Guarantee::insured(g.c, g.calibrator.clone())),
            None => self.rival.implied_guarantee(),
        }
    }

    /// One game, Reality seeded from `self.seed`.
    pub fn run(&self) -> Result<Transcript, EngineError> {
        let players = self.players()?;
        let mut reality = self.reality.build(self.seed, 0);
        engine::run(
            players.forecaster.as_ref(),
            players.sceptic.as_ref(),
            players.rival.as_ref(),
            reality.as_mut(),
            self.horizon,
        )
    }
}
