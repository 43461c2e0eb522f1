mod common;

use lookback_core::calibrator::{CalibrationMeasure, Calibrator};
use lookback_core::config::{ForecasterSpec, GameSpec, RealitySpec, RivalSpec, ScepticSpec};
use lookback_core::engine::{
    self, monte_carlo, verify_floor, verify_insurance, EngineError, Player, SampledReality,
    ScriptedReality, Transcript,
};
use lookback_core::opc::Gamble;
use lookback_core::strategy::{
    mixture_capital_identity, CoinForecaster, DoublingSceptic, Forecaster, InsuranceStrategy,
    MixtureStrategy, RandomForecaster, RandomSceptic, RivalMove, RivalState, RivalStrategy,
    ScepticStrategy, StoppedStrategy, StrategyError,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn random_game(
    seed: u64,
    outcomes: usize,
    rival: &dyn RivalStrategy,
    horizon: usize,
) -> Transcript {
    let forecaster = RandomForecaster::new(seed, outcomes).unwrap();
    let sceptic = RandomSceptic::new(seed);
    let mut reality = SampledReality::from_forecasts(seed, 0);
    engine::run(&forecaster, &sceptic, rival, &mut reality, horizon).unwrap()
}

fn step_calibrator(seed: u64, levels: usize, integral: f64) -> Calibrator {
    random_step_with_integral(&mut ChaCha8Rng::seed_from_u64(seed), levels, integral)
}

/// Bets one unit more than it has at a chosen step.
struct Overbet {
    at: usize,
}

impl RivalStrategy for Overbet {
    fn next_move(&self, state: &RivalState<'_>) -> Result<RivalMove, StrategyError> {
        let extra = if state.step == self.at { 1.0 } else { 0.0 };
        let g = Gamble::constant(state.forecast.space().clone(), state.capital + extra)?;
        Ok(RivalMove::opaque(g))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_move_fits_its_budget(
        seed in any::<u64>(),
        outcomes in 2usize..6,
        levels in 1usize..8,
        c in 0.0..1.0f64,
    ) {
        let f = step_calibrator(seed, levels, 1.0 - c);
        let rival = InsuranceStrategy::new(c, f).unwrap();
        let t = random_game(seed, outcomes, &rival, 100);
        let mut capital: f64 = 1.0;
        let mut rival_capital: f64 = 1.0;
        for s in t.steps() {
            let price = s.forecast.evaluate(&s.sceptic_move).unwrap();
            prop_assert!(price <= capital + 1e-12 * capital.max(1.0));
            let price = s.forecast.evaluate(&s.rival_move).unwrap();
            prop_assert!(price <= rival_capital + 1e-12 * rival_capital.max(1.0));
            capital = s.capital;
            rival_capital = s.rival_capital;
        }
    }

    #[test]
    fn stopped_capital_freezes_at_threshold(seed in any::<u64>(), u in 1.0..20.0f64) {
        let rival = StoppedStrategy::new(u).unwrap();
        let t = random_game(seed, 3, &rival, 150);
        let mut stopped = false;
        for s in t.steps() {
            let expected = if stopped { u } else { s.capital };
            prop_assert!(close_rel(s.rival_capital, expected, 1e-12));
            stopped = stopped || s.capital >= u;
        }
    }

    #[test]
    fn mixture_is_the_average_of_stopped_capitals(
        seed in any::<u64>(),
        atoms in prop::collection::vec((1.0..30.0f64, 0.01..1.0f64), 1..6),
    ) {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let atoms: Vec<_> = atoms.into_iter().map(|(u, m)| (u, m / total)).collect();
        let p = CalibrationMeasure::new(atoms, None).unwrap();
        let mixed = random_game(seed, 3, &MixtureStrategy::new(p.clone()).unwrap(), 80);
        let stopped: Vec<_> = p
            .atoms()
            .iter()
            .map(|&(u, m)| (m, random_game(seed, 3, &StoppedStrategy::new(u).unwrap(), 80)))
            .collect();
        for n in 1..=mixed.len() {
            let want: f64 = stopped.iter().map(|(m, t)| m * t.rival_capital(n)).sum();
            prop_assert!(close_rel(mixed.rival_capital(n), want, 1e-12));
        }
    }

    #[test]
    fn mixture_keeps_its_floor(
        seed in any::<u64>(),
        levels in 1usize..10,
        horizon in 1usize..=200,
    ) {
        let f = step_calibrator(seed, levels, 1.0);
        let rival = MixtureStrategy::from_calibrator(&f).unwrap();
        let t = random_game(seed, 2, &rival, horizon);
        prop_assert!(verify_floor(&t, &f).all_ok());
        prop_assert!(mixture_capital_identity(&t, &rival).is_ok());
    }

    #[test]
    fn insurance_keeps_its_guarantee(
        seed in any::<u64>(),
        levels in 1usize..10,
        c in 0.0..=1.0f64,
        slack in 0.0..0.5f64,
    ) {
        let f = step_calibrator(seed, levels, (1.0 - c) * (1.0 - slack));
        let rival = InsuranceStrategy::new(c, f.clone()).unwrap();
        let t = random_game(seed, 3, &rival, 120);
        let report = verify_insurance(&t, c, &f);
        prop_assert!(report.all_ok(), "first failure {:?}", report.first_failure());
    }

    #[test]
    fn improved_insurance_bound(seed in any::<u64>(), c in 0.0..1.0f64, alpha in 0.05..0.95f64) {
        let f = Calibrator::scaled_power(alpha, 1.0 - c).unwrap();
        let rival = InsuranceStrategy::new(c, f).unwrap();
        let t = random_game(seed, 2, &rival, 120);
        for s in t.steps() {
            let (k, m) = (s.capital, s.running_max);
            let tail = (1.0 - alpha) * m.powf(-alpha);
            let bound = c * k + (1.0 - c) * (tail * k + alpha * m.powf(1.0 - alpha));
            prop_assert!(s.rival_capital >= bound - 1e-9 * bound.max(1.0));
        }
    }

    #[test]
    fn runs_are_deterministic_and_well_formed(seed in any::<u64>(), outcomes in 2usize..5) {
        let rival = MixtureStrategy::from_calibrator(&Calibrator::power(0.3).unwrap()).unwrap();
        let t = random_game(seed, outcomes, &rival, 60);
        prop_assert_eq!(&t, &random_game(seed, outcomes, &rival, 60));
        let mut previous_max = 1.0;
        for s in t.steps() {
            prop_assert!(s.capital >= 0.0 && s.rival_capital >= 0.0);
            prop_assert!(s.running_max >= previous_max);
            prop_assert!(s.running_max >= s.capital);
            previous_max = s.running_max;
        }
    }

    #[test]
    fn overbetting_is_caught_at_its_step(seed in any::<u64>(), at in 1usize..30) {
        let forecaster = RandomForecaster::new(seed, 3).unwrap();
        let sceptic = RandomSceptic::new(seed);
        let mut reality = SampledReality::from_forecasts(seed, 0);
        let err = engine::run(&forecaster, &sceptic, &Overbet { at }, &mut reality, 30).unwrap_err();
        match err {
            EngineError::BudgetViolation { player, step, .. } => {
                prop_assert_eq!(player, Player::RivalSceptic);
                prop_assert_eq!(step, at);
            }
            other => prop_assert!(false, "unexpected {other}"),
        }
    }
}

/// Doubles the stake it is allowed.
struct GreedySceptic;

impl ScepticStrategy for GreedySceptic {
    fn next_move(
        &self,
        state: &lookback_core::strategy::ScepticState<'_>,
    ) -> Result<Gamble, StrategyError> {
        Ok(Gamble::constant(
            state.forecast.space().clone(),
            2.0 * state.capital,
        )?)
    }
}

#[test]
fn overbetting_sceptic_is_caught() {
    let coin = CoinForecaster::new(2.0).unwrap();
    let mut reality = ScriptedReality::new(["1"]);
    let err = engine::run(&coin, &GreedySceptic, &Overbet { at: 0 }, &mut reality, 1).unwrap_err();
    assert!(matches!(
        err,
        EngineError::BudgetViolation {
            player: Player::Sceptic,
            step: 1,
            ..
        }
    ));
}

#[test]
fn unknown_outcome_is_rejected() {
    let coin = CoinForecaster::new(2.0).unwrap();
    let sceptic = DoublingSceptic::new(2.0).unwrap();
    let rival = MixtureStrategy::from_calibrator(&Calibrator::power(0.5).unwrap()).unwrap();
    let mut reality = ScriptedReality::new(["1", "7"]);
    let err = engine::run(&coin, &sceptic, &rival, &mut reality, 2).unwrap_err();
    assert!(matches!(
        err,
        EngineError::OutcomeOutOfSpace { step: 2, .. }
    ));
}

fn coin_game(reality: RealitySpec, horizon: usize) -> GameSpec {
    GameSpec {
        forecaster: ForecasterSpec::Coin { a: 2.0 },
        sceptic: ScepticSpec::Doubling {
            a: 2.0,
            target: "1".into(),
        },
        rival: RivalSpec::Mixture {
            measure: None,
            calibrator: Some(Calibrator::power(0.5).unwrap()),
        },
        reality,
        horizon,
        seed: 17,
        guarantee: None,
    }
}

#[test]
fn monte_carlo_keeps_the_floor() {
    let game = coin_game(RealitySpec::Iid, 200);
    let report = monte_carlo(&game, 1000, 17).unwrap();
    assert!(report.all_ok());
    assert!(report.min_floor_slack.unwrap().slack >= -1e-9);
    assert_eq!(report, monte_carlo(&game, 1000, 17).unwrap());
}

#[test]
fn single_path_monte_carlo_matches_run() {
    let game = coin_game(RealitySpec::Iid, 50);
    let report = monte_carlo(&game, 1, game.seed).unwrap();
    let t = game.run().unwrap();
    let f = Calibrator::power(0.5).unwrap();
    let min = report.min_floor_slack.unwrap();
    let direct = verify_floor(&t, &f);
    assert_eq!(min.path, 0);
    assert_eq!(min.slack, direct.min_slack());
}

#[test]
fn all_ones_reaches_the_top() {
    let n = 20;
    let game = coin_game(
        RealitySpec::Constant {
            outcome: "1".into(),
        },
        n,
    );
    let t = game.run().unwrap();
    let top = 2f64.powi(n as i32);
    assert_eq!(t.capital(n), top);
    assert_eq!(t.running_max(n), top);
    assert!(t.rival_capital(n) >= Calibrator::power(0.5).unwrap().value(top) - 1e-9);
    let report = monte_carlo(&game, 4, 0).unwrap();
    assert_eq!(report.min_floor_slack.unwrap().path, 0);
}

#[test]
fn coin_forecaster_prices_the_doubling_bet_at_capital() {
    let coin = CoinForecaster::new(3.0).unwrap();
    let e = coin.forecast(1, &[]);
    let mut reality = ScriptedReality::new(["1", "1", "0"]);
    let sceptic = DoublingSceptic::new(3.0).unwrap();
    let t = engine::run(&coin, &sceptic, &Overbet { at: 0 }, &mut reality, 3).unwrap();
    assert_eq!(t.capitals(), vec![3.0, 9.0, 0.0]);
    for s in t.steps() {
        assert!((e.evaluate(&s.sceptic_move).unwrap() - t.capital(s.n - 1)).abs() < 1e-12);
    }
}
