use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use log::{debug, info};
use lookback_core::calibrator::{CalibrationMeasure, Calibrator, Classification};
use lookback_core::config::{ForecasterSpec, GameSpec, RealitySpec, RivalSpec, ScepticSpec};
use lookback_core::engine::{monte_carlo as run_monte_carlo, verify_guarantee, TranscriptRow};
use lookback_core::oracle::{self, Falsification, Verdict, DEFAULT_MAX_HORIZON};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Common, Format, Status};

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn json(value: &impl Serialize) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// `None` means plain text.
fn text_or_json(args: &Common) -> Result<Option<Format>> {
    match args.format {
        Some(Format::Csv) => bail!("--format csv is only available for transcripts"),
        other => Ok(other),
    }
}

#[derive(Serialize)]
struct ValidateReport {
    calibrator: Calibrator,
    integral: f64,
    classification: Classification,
    summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    completion: Option<Calibrator>,
    /// The calibration measure of the calibrator, or of its completion.
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<CalibrationMeasure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    falsification: Option<Falsification>,
}

pub fn validate(args: &Common) -> Result<Status> {
    let format = text_or_json(args)?;
    let f: Calibrator = read_config(&args.config)?;
    let integral = f.calibration_integral();
    let classification = f.classify();
    info!("{f}: integral {integral}");

    let mut report = ValidateReport {
        calibrator: f.clone(),
        integral,
        classification,
        summary: String::new(),
        completion: None,
        measure: None,
        falsification: None,
    };
    let status = match classification {
        Classification::Admissible => {
            report.summary = format!("admissible, integral {integral:.6}");
            report.measure = Some(f.measure()?);
            Status::Ok
        }
        Classification::CalibratorSlack { .. } => {
            let completion = f.dominate_to_admissible()?;
            report.summary = format!("{classification}; completion: {completion}");
            report.measure = Some(completion.measure()?);
            report.completion = Some(completion);
            Status::Ok
        }
        Classification::NotCalibrator { .. } => {
            let falsification = oracle::falsify(&f, 0.0, DEFAULT_MAX_HORIZON);
            report.summary = match &falsification {
                Falsification::Certificate { certificate: c, .. } => format!(
                    "{classification}; falsification certificate a={}, N={}, price {:?}",
                    c.a, c.horizon, c.price
                ),
                Falsification::SearchExhausted { best_price, .. } => format!(
                    "{classification}; no certificate up to N={DEFAULT_MAX_HORIZON} \
                     (best price {best_price:?})"
                ),
                Falsification::NoViolationFound { .. } => classification.to_string(),
            };
            report.falsification = Some(falsification);
            Status::Failed
        }
    };

    let text = match format {
        Some(_) => json(&report)?,
        None => format!("{}\n", report.summary),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(status)
}

#[derive(Serialize)]
struct GuaranteeSummary {
    c: f64,
    ok: bool,
    min_slack: f64,
    first_failure: Option<usize>,
}

#[derive(Serialize)]
struct SimulateReport {
    transcript: Vec<TranscriptRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    guarantee: Option<GuaranteeSummary>,
}

fn play(game: &GameSpec, args: &Common) -> Result<Status> {
    let t = game.run()?;
    let guarantee = game.guarantee();
    let summary = guarantee.as_ref().map(|g| {
        let report = verify_guarantee(&t, g);
        GuaranteeSummary {
            c: g.c,
            ok: report.all_ok(),
            min_slack: report.min_slack(),
            first_failure: report.first_failure(),
        }
    });
    let status = match &summary {
        Some(s) if !s.ok => Status::Failed,
        _ => Status::Ok,
    };

    match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buffer = Vec::new();
            t.write_csv(&mut buffer, guarantee.as_ref())?;
            emit(args.out.as_deref(), std::str::from_utf8(&buffer)?)?;
            match &summary {
                Some(s) if s.ok => eprintln!(
                    "guarantee holds at all {} steps (c = {}), min slack {:e}",
                    t.len(),
                    s.c,
                    s.min_slack
                ),
                Some(s) => eprintln!(
                    "guarantee FAILS first at step {} (c = {}), min slack {:e}",
                    s.first_failure.unwrap_or(0),
                    s.c,
                    s.min_slack
                ),
                None => eprintln!("no guarantee to check"),
            }
        }
        Format::Json => {
            let report = SimulateReport {
                transcript: t.rows(guarantee.as_ref()),
                guarantee: summary,
            };
            emit(args.out.as_deref(), &json(&report)?)?;
        }
    }
    Ok(status)
}

pub fn simulate(args: &Common) -> Result<Status> {
    let mut game: GameSpec = read_config(&args.config)?;
    if let Some(seed) = args.seed {
        game.seed = seed;
    }
    debug!("{game:?}");
    play(&game, args)
}

/// A game whose Rival Sceptic is the insured strategy for `c` and `calibrator`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InsureConfig {
    forecaster: ForecasterSpec,
    sceptic: ScepticSpec,
    #[serde(default)]
    reality: RealitySpec,
    #[serde(rename = "N")]
    horizon: usize,
    #[serde(default)]
    seed: u64,
    c: f64,
    calibrator: Calibrator,
}

pub fn insure(args: &Common) -> Result<Status> {
    let config: InsureConfig = read_config(&args.config)?;
    let game = GameSpec {
        forecaster: config.forecaster,
        sceptic: config.sceptic,
        rival: RivalSpec::Insurance {
            c: config.c,
            calibrator: config.calibrator,
        },
        reality: config.reality,
        horizon: config.horizon,
        seed: args.seed.unwrap_or(config.seed),
        guarantee: None,
    };
    debug!("{game:?}");
    play(&game, args)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TightnessConfig {
    calibrator: Calibrator,
    #[serde(default)]
    c: f64,
    a: f64,
    #[serde(rename = "N")]
    horizon: usize,
}

pub fn tightness(args: &Common) -> Result<Status> {
    text_or_json(args)?;
    let config: TightnessConfig = read_config(&args.config)?;
    let report = oracle::tightness(&config.calibrator, config.c, config.a, config.horizon)?;
    if report.verdict == Verdict::Violation {
        info!("price {} exceeds unit capital", report.closed_form_price);
    }
    emit(args.out.as_deref(), &json(&report)?)?;
    Ok(Status::Ok)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MonteCarloConfig {
    game: GameSpec,
    paths: usize,
}

pub fn monte_carlo(args: &Common) -> Result<Status> {
    let format = text_or_json(args)?;
    let config: MonteCarloConfig = read_config(&args.config)?;
    let seed = args.seed.unwrap_or(config.game.seed);
    info!(
        "{} paths of {} steps, seed {seed}",
        config.paths, config.game.horizon
    );
    let report = run_monte_carlo(&config.game, config.paths, seed)?;

    let text = match format {
        Some(_) => json(&report)?,
        None => {
            let mut text = format!(
                "{} paths x {} steps, seed {}\n",
                report.paths, report.horizon, report.seed
            );
            match (report.min_floor_slack, report.min_insurance_slack) {
                (Some(floor), Some(insured)) => {
                    text += &format!(
                        "min floor slack {:e} (path {}, step {}); violations {}\n",
                        floor.slack, floor.path, floor.step, report.floor_violations
                    );
                    text += &format!(
                        "min insured slack {:e} (path {}, step {}); violations {}\n",
                        insured.slack, insured.path, insured.step, report.insurance_violations
                    );
                }
                _ => text += "no guarantee to check\n",
            }
            text
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(if report.all_ok() {
        Status::Ok
    } else {
        Status::Failed
    })
}
