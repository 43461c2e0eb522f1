//! Capital calibration for competitive scepticism.
//!
//! Sceptic bets against Forecaster and his capital `K_n` measures the
//! evidence found so far. Reporting the running maximum `K*_n` instead
//! exaggerates that evidence. A capital calibrator `F` removes the
//! exaggeration: Rival Sceptic, watching Sceptic's moves, can keep
//! `K'_n >= F(K*_n)` at every step, and with insurance level `c` even
//! `K'_n >= c K_n + F(K*_n)`.
//!
//! - [`opc`]: outcome spaces, gambles and Forecaster's pricing functionals.
//! - [`calibrator`]: calibrators, the integral criterion, and calibration measures.
//! - [`strategy`]: Sceptic, Rival Sceptic and Forecaster strategies.
//! - [`engine`]: runs the protocol, records transcripts, verifies guarantees.
//! - [`oracle`]: superhedging prices on the coin game and a falsifier.
//! - [`config`]: JSON game specifications.

pub mod calibrator;
pub mod config;
pub mod engine;
pub mod opc;
pub mod oracle;
pub mod strategy;

pub use calibrator::{CalibrationMeasure, Calibrator, CalibratorError, Classification};
pub use engine::{run, EngineError, Guarantee, Transcript};
pub use opc::{ExpectationFunctional, Gamble, OutcomeSpace};
