//! Capital calibrators and their calibration measures.
//!
//! A capital calibrator is an increasing `F: [1, inf) -> [0, inf)` such that
//! Rival Sceptic can keep his capital above `F` of Sceptic's running maximum.
//! `F` qualifies exactly when `int_1^inf F(y) / y^2 dy <= 1`, and it is
//! admissible (not strictly dominated) when it is right-continuous and the
//! integral equals 1.
//!
//! Admissible calibrators correspond one-to-one with probability measures `P`
//! on `[1, inf)` through `F(y) = int_[1,y] u P(du)`. The measure is what the
//! mixture strategy uses: `P((t, inf))` is the weight it keeps on Sceptic's
//! move and `F(t)` is the floor it has already locked in.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for closed-form identities (integral = 1, total mass = 1).
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibratorError {
    #[error("calibrators are defined on [1, inf), got y = {0}")]
    Domain(f64),
    #[error("invalid step calibrator: {0}")]
    InvalidStep(String),
    #[error("power exponent alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("scale factor must be finite and nonnegative, got {0}")]
    InvalidScale(f64),
    #[error("not a capital calibrator: integral of F(y)/y^2 is {integral} > 1")]
    NotCalibrator { integral: f64 },
    #[error("calibrator is not admissible: integral of F(y)/y^2 is {integral}, expected 1")]
    NotAdmissible { integral: f64 },
    #[error("invalid calibration measure: {0}")]
    InvalidMeasure(String),
    #[error("insurance fraction c must lie in [0, 1], got {0}")]
    InvalidInsurance(f64),
}

/// Right-continuous step function: `F(y) = values[k]` on
/// `[breakpoints[k], breakpoints[k + 1])`, and the last value from the last
/// breakpoint on.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCalibrator {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepCalibrator {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, CalibratorError> {
        let invalid = |msg: String| Err(CalibratorError::InvalidStep(msg));
        if breakpoints.is_empty() {
            return invalid("at least one breakpoint is required".into());
        }
        if breakpoints.len() != values.len() {
            return invalid(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            ));
        }
        if breakpoints[0] != 1.0 {
            return invalid(format!(
                "first breakpoint must be 1, got {}",
                breakpoints[0]
            ));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return invalid("breakpoints must be finite".into());
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("breakpoints must be strictly increasing".into());
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("values must be finite and nonnegative".into());
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return invalid("values must be nondecreasing".into());
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn value_at(&self, y: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= y);
        self.values[k.saturating_sub(1)]
    }

    fn integral(&self) -> f64 {
        let m = self.breakpoints.len();
        (0..m)
            .map(|k| {
                let next = if k + 1 < m {
                    1.0 / self.breakpoints[k + 1]
                } else {
                    0.0
                };
                self.values[k] * (1.0 / self.breakpoints[k] - next)
            })
            .sum()
    }
}

/// `F(y) = scale * alpha * y^(1 - alpha)`; admissible when `scale == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCalibrator {
    alpha: f64,
    scale: f64,
}

impl PowerCalibrator {
    pub fn new(alpha: f64, scale: f64) -> Result<Self, CalibratorError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CalibratorError::InvalidAlpha(alpha));
        }
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(CalibratorError::InvalidScale(scale));
        }
        Ok(Self { alpha, scale })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn value_at(&self, y: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * self.alpha * y.powf(1.0 - self.alpha)
        }
    }
}

/// An increasing nonnegative function on `[1, inf)` in one of the two
/// supported representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCalibrator", into = "RawCalibrator")]
pub enum Calibrator {
    Step(StepCalibrator),
    Power(PowerCalibrator),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawCalibrator {
    Step {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Power {
        alpha: f64,
        #[serde(default = "unit_scale", skip_serializing_if = "is_unit_scale")]
        scale: f64,
    },
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit_scale(scale: &f64) -> bool {
    *scale == 1.0
}

impl TryFrom<RawCalibrator> for Calibrator {
    type Error = CalibratorError;

    fn try_from(raw: RawCalibrator) -> Result<Self, Self::Error> {
        match raw {
            RawCalibrator::Step {
                breakpoints,
                values,
            } => Calibrator::step(breakpoints, values),
            RawCalibrator::Power { alpha, scale } => Calibrator::scaled_power(alpha, scale),
        }
    }
}

impl From<Calibrator> for RawCalibrator {
    fn from(f: Calibrator) -> Self {
        match f {
            Calibrator::Step(s) => RawCalibrator::Step {
                breakpoints: s.breakpoints,
                values: s.values,
            },
            Calibrator::Power(p) => RawCalibrator::Power {
                alpha: p.alpha,
                scale: p.scale,
            },
        }
    }
}

/// Where a calibrator stands with respect to the integral criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    NotCalibrator { integral: f64 },
    CalibratorSlack { integral: f64 },
    Admissible,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::NotCalibrator { integral } => {
                write!(f, "NOT a calibrator (integral {integral:?})")
            }
            Classification::CalibratorSlack { integral } => {
                write!(f, "calibrator with slack {:?}", 1.0 - integral)
            }
            Classification::Admissible => write!(f, "admissible"),
        }
    }
}

impl Calibrator {
    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, CalibratorError> {
        StepCalibrator::new(breakpoints, values).map(Calibrator::Step)
    }

    /// `F(y) = alpha * y^(1 - alpha)`.
    pub fn power(alpha: f64) -> Result<Self, CalibratorError> {
        Self::scaled_power(alpha, 1.0)
    }

    pub fn scaled_power(alpha: f64, scale: f64) -> Result<Self, CalibratorError> {
        PowerCalibrator::new(alpha, scale).map(Calibrator::Power)
    }

    /// The constant calibrator `F == value`.
    pub fn constant(value: f64) -> Result<Self, CalibratorError> {
        Self::step(vec![1.0], vec![value])
    }

    /// `F(y)`. At `y = +inf` this is `lim F`, possibly infinite.
    pub fn eval(&self, y: f64) -> Result<f64, CalibratorError> {
        if y.is_nan() || y < 1.0 {
            return Err(CalibratorError::Domain(y));
        }
        Ok(self.value(y))
    }

    /// `F(y)` for `y >= 1`, without the domain check.
    pub fn value(&self, y: f64) -> f64 {
        match self {
            Calibrator::Step(s) => s.value_at(y),
            Calibrator::Power(p) => p.value_at(y),
        }
    }

    /// `int_1^inf F(y) / y^2 dy` in closed form.
    pub fn calibration_integral(&self) -> f64 {
        match self {
            Calibrator::Step(s) => s.integral(),
            Calibrator::Power(p) => p.scale,
        }
    }

    pub fn classify(&self) -> Classification {
        let integral = self.calibration_integral();
        if integral > 1.0 + EXACT_TOLERANCE {
            Classification::NotCalibrator { integral }
        } else if (integral - 1.0).abs() <= EXACT_TOLERANCE {
            // both representations are right-continuous
            Classification::Admissible
        } else {
            Classification::CalibratorSlack { integral }
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.classify() == Classification::Admissible
    }

    /// `k * F`.
    pub fn scaled(&self, k: f64) -> Result<Self, CalibratorError> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(CalibratorError::InvalidScale(k));
        }
        match self {
            Calibrator::Step(s) => Self::step(
                s.breakpoints.clone(),
                s.values.iter().map(|v| v * k).collect(),
            ),
            Calibrator::Power(p) => Self::scaled_power(p.alpha, p.scale * k),
        }
    }

    /// An admissible calibrator dominating `self` pointwise.
    ///
    /// A step calibrator with slack `s = 1 - integral` is lifted by the
    /// constant `s` (an extra atom of mass `s` at `u = 1`); a scaled-down
    /// power calibrator is restored to scale 1.
    pub fn dominate_to_admissible(&self) -> Result<Self, CalibratorError> {
        match self.classify() {
            Classification::NotCalibrator { integral } => {
                Err(CalibratorError::NotCalibrator { integral })
            }
            Classification::Admissible => Ok(self.clone()),
            Classification::CalibratorSlack { integral } => match self {
                Calibrator::Step(s) => {
                    let slack = 1.0 - integral;
                    Self::step(
                        s.breakpoints.clone(),
                        s.values.iter().map(|v| v + slack).collect(),
                    )
                }
                Calibrator::Power(p) => Self::power(p.alpha),
            },
        }
    }

    /// The probability measure `P(du) = Q(du) / u`, where `Q` has
    /// distribution function `F`.
    pub fn measure(&self) -> Result<CalibrationMeasure, CalibratorError> {
        CalibrationMeasure::from_calibrator(self)
    }
}

impl fmt::Display for Calibrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calibrator::Step(s) if s.values.len() == 1 => write!(f, "constant {}", s.values[0]),
            Calibrator::Step(s) => {
                write!(f, "step")?;
                for (b, v) in s.breakpoints.iter().zip(&s.values) {
                    write!(f, " [{b:?}: {v:?}]")?;
                }
                Ok(())
            }
            Calibrator::Power(p) if p.scale == 1.0 => write!(f, "power alpha={:?}", p.alpha),
            Calibrator::Power(p) => write!(f, "{:?} * power alpha={:?}", p.scale, p.alpha),
        }
    }
}

/// Absolutely continuous part `scale * alpha * (1 - alpha) * u^(-1 - alpha)`
/// on `(1, inf)`, of total mass `scale * (1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTail {
    pub alpha: f64,
    #[serde(default = "unit_scale", skip_serializing_if = "is_unit_scale")]
    pub scale: f64,
}

impl PowerTail {
    fn mass(&self) -> f64 {
        self.scale * (1.0 - self.alpha)
    }

    /// Mass on `(t, inf)` for `t >= 1`.
    fn tail(&self, t: f64) -> f64 {
        if t.is_infinite() {
            0.0
        } else {
            self.scale * (1.0 - self.alpha) * t.powf(-self.alpha)
        }
    }

    /// `int_(1, y] u * density(u) du`.
    fn first_moment(&self, y: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * self.alpha * (y.powf(1.0 - self.alpha) - 1.0)
        }
    }
}

/// A finite measure on `[1, inf)`: point masses plus an optional power tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct CalibrationMeasure {
    /// `(location, mass)`, sorted by location, locations distinct.
    atoms: Vec<(f64, f64)>,
    power_tail: Option<PowerTail>,
    total_mass: f64,
    /// `suffix_mass[i]` = mass of atoms `i..`.
    suffix_mass: Vec<f64>,
    /// `prefix_moment[i]` = sum of `u * m` over atoms `..i`.
    prefix_moment: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    atoms: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    power_tail: Option<PowerTail>,
    #[serde(default)]
    total_mass: Option<f64>,
}

impl TryFrom<RawMeasure> for CalibrationMeasure {
    type Error = CalibratorError;

    fn try_from(raw: RawMeasure) -> Result<Self, Self::Error> {
        let measure = CalibrationMeasure::new(raw.atoms, raw.power_tail)?;
        if let Some(stated) = raw.total_mass {
            if (stated - measure.total_mass).abs() > 1e-12 {
                return Err(CalibratorError::InvalidMeasure(format!(
                    "stated total_mass {stated} does not match computed {}",
                    measure.total_mass
                )));
            }
        }
        Ok(measure)
    }
}

impl From<CalibrationMeasure> for RawMeasure {
    fn from(m: CalibrationMeasure) -> Self {
        RawMeasure {
            atoms: m.atoms,
            power_tail: m.power_tail,
            total_mass: Some(m.total_mass),
        }
    }
}

impl CalibrationMeasure {
    /// Atoms at equal locations are merged and zero-mass atoms dropped.
    pub fn new(
        mut atoms: Vec<(f64, f64)>,
        power_tail: Option<PowerTail>,
    ) -> Result<Self, CalibratorError> {
        for &(u, m) in &atoms {
            if !(u.is_finite() && u >= 1.0) {
                return Err(CalibratorError::InvalidMeasure(format!(
                    "atom location {u} is not in [1, inf)"
                )));
            }
            if !(m.is_finite() && m >= 0.0) {
                return Err(CalibratorError::InvalidMeasure(format!(
                    "atom mass {m} is not finite and nonnegative"
                )));
            }
        }
        if let Some(tail) = power_tail {
            PowerCalibrator::new(tail.alpha, tail.scale)?;
        }

        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (u, m) in atoms {
            if m == 0.0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == u => last.1 += m,
                _ => merged.push((u, m)),
            }
        }

        let mut suffix_mass = vec![0.0; merged.len() + 1];
        for i in (0..merged.len()).rev() {
            suffix_mass[i] = suffix_mass[i + 1] + merged[i].1;
        }
        let mut prefix_moment = vec![0.0; merged.len() + 1];
        for (i, &(u, m)) in merged.iter().enumerate() {
            prefix_moment[i + 1] = prefix_moment[i] + u * m;
        }
        let total_mass = suffix_mass[0] + power_tail.map_or(0.0, |t| t.mass());

        Ok(Self {
            atoms: merged,
            power_tail,
            total_mass,
            suffix_mass,
            prefix_moment,
        })
    }

    /// Inverse of `F(y) = int_[1,y] u P(du)`. Requires an admissible `F`.
    ///
    /// A jump of `F` of size `d` at `b` becomes an atom of mass `d / b` at
    /// `b`, counting `F(1)` as a jump at 1. The power calibrator
    /// `alpha * y^(1 - alpha)` becomes an atom of mass `alpha` at 1 plus the
    /// density `alpha * (1 - alpha) * u^(-1 - alpha)`.
    pub fn from_calibrator(f: &Calibrator) -> Result<Self, CalibratorError> {
        match f.classify() {
            Classification::Admissible => {}
            Classification::NotCalibrator { integral }
            | Classification::CalibratorSlack { integral } => {
                return Err(CalibratorError::NotAdmissible { integral })
            }
        }
        match f {
            Calibrator::Step(s) => {
                let mut previous = 0.0;
                let atoms = s
                    .breakpoints
                    .iter()
                    .zip(&s.values)
                    .map(|(&b, &v)| {
                        let jump = v - previous;
                        previous = v;
                        (b, jump / b)
                    })
                    .collect();
                Self::new(atoms, None)
            }
            Calibrator::Power(p) => Self::new(
                vec![(1.0, p.scale * p.alpha)],
                Some(PowerTail {
                    alpha: p.alpha,
                    scale: p.scale,
                }),
            ),
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn power_tail(&self) -> Option<PowerTail> {
        self.power_tail
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass - 1.0).abs() <= EXACT_TOLERANCE
    }

    /// `P((t, inf))`, open at `t`: an atom located exactly at `t` is excluded.
    pub fn tail_mass(&self, t: f64) -> f64 {
        let first_above = self.atoms.partition_point(|&(u, _)| u <= t);
        let tail = self
            .power_tail
            .map_or(0.0, |p| if t < 1.0 { p.mass() } else { p.tail(t) });
        self.suffix_mass[first_above] + tail
    }

    /// `P([1, t])`.
    pub fn mass_up_to(&self, t: f64) -> f64 {
        let first_above = self.atoms.partition_point(|&(u, _)| u <= t);
        let atoms = self.suffix_mass[0] - self.suffix_mass[first_above];
        let tail =
            self.power_tail
                .map_or(0.0, |p| if t < 1.0 { 0.0 } else { p.mass() - p.tail(t) });
        atoms + tail
    }

    /// `int_[1,y] u P(du)`, i.e. the calibrator induced by this measure.
    pub fn partial_first_moment(&self, y: f64) -> f64 {
        if y < 1.0 {
            return 0.0;
        }
        let first_above = self.atoms.partition_point(|&(u, _)| u <= y);
        let tail = self.power_tail.map_or(0.0, |p| p.first_moment(y));
        self.prefix_moment[first_above] + tail
    }

    /// The calibrator `y -> int_[1,y] u P(du)`.
    pub fn calibrator(&self) -> MomentCalibrator<'_> {
        MomentCalibrator { measure: self }
    }
}

/// The increasing right-continuous function `y -> int_[1,y] u P(du)`.
#[derive(Debug, Clone, Copy)]
pub struct MomentCalibrator<'a> {
    measure: &'a CalibrationMeasure,
}

impl MomentCalibrator<'_> {
    pub fn eval(&self, y: f64) -> Result<f64, CalibratorError> {
        if y.is_nan() || y < 1.0 {
            return Err(CalibratorError::Domain(y));
        }
        Ok(self.measure.partial_first_moment(y))
    }

    /// The same function in a closed representation, when it has one:
    /// purely atomic measures give step calibrators, and an atom of mass
    /// `scale * alpha` at 1 plus a power tail gives a scaled power calibrator.
    pub fn to_calibrator(&self) -> Option<Calibrator> {
        let m = self.measure;
        match m.power_tail {
            None => {
                let mut breakpoints = vec![1.0];
                let mut values = vec![m.partial_first_moment(1.0)];
                for &(u, _) in m.atoms.iter().filter(|a| a.0 > 1.0) {
                    breakpoints.push(u);
                    values.push(m.partial_first_moment(u));
                }
                Calibrator::step(breakpoints, values).ok()
            }
            Some(tail) => {
                let expected = tail.scale * tail.alpha;
                let matches = match m.atoms.as_slice() {
                    [] => expected == 0.0,
                    [(u, mass)] => *u == 1.0 && (mass - expected).abs() <= 1e-15,
                    _ => false,
                };
                if matches {
                    Calibrator::scaled_power(tail.alpha, tail.scale).ok()
                } else {
                    None
                }
            }
        }
    }
}

/// Fraction `c` of Sceptic's capital that an insured Rival Sceptic copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct InsuranceParams(f64);

impl InsuranceParams {
    pub fn new(c: f64) -> Result<Self, CalibratorError> {
        if (0.0..=1.0).contains(&c) {
            Ok(Self(c))
        } else {
            Err(CalibratorError::InvalidInsurance(c))
        }
    }

    pub fn c(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for InsuranceParams {
    type Error = CalibratorError;

    fn try_from(c: f64) -> Result<Self, Self::Error> {
        Self::new(c)
    }
}

impl From<InsuranceParams> for f64 {
    fn from(p: InsuranceParams) -> f64 {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(b: &[f64], v: &[f64]) -> Calibrator {
        Calibrator::step(b.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = Calibrator::power(0.5).unwrap();
        assert!((p.eval(4.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(p.eval(f64::INFINITY).unwrap(), f64::INFINITY);
        let s = step(&[1.0, 2.0], &[0.0, 4.0]);
        assert_eq!(s.eval(1.5).unwrap(), 0.0);
        assert_eq!(s.eval(2.0).unwrap(), 4.0);
        assert_eq!(s.eval(f64::INFINITY).unwrap(), 4.0);
        assert_eq!(s.eval(0.5), Err(CalibratorError::Domain(0.5)));
        assert!(s.eval(f64::NAN).is_err());
    }

    #[test]
    fn integral_examples() {
        for alpha in [0.1, 0.5, 0.9] {
            assert_eq!(
                Calibrator::power(alpha).unwrap().calibration_integral(),
                1.0
            );
        }
        assert_eq!(step(&[1.0], &[1.0]).calibration_integral(), 1.0);
        assert_eq!(step(&[1.0, 2.0], &[0.0, 4.0]).calibration_integral(), 2.0);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            Calibrator::power(0.3).unwrap().classify(),
            Classification::Admissible
        );
        assert_eq!(
            step(&[1.0, 2.0], &[0.0, 4.0]).classify(),
            Classification::NotCalibrator { integral: 2.0 }
        );
        assert_eq!(
            step(&[1.0], &[0.5]).classify(),
            Classification::CalibratorSlack { integral: 0.5 }
        );
    }

    #[test]
    fn dominate_examples() {
        assert_eq!(
            step(&[1.0], &[0.5]).dominate_to_admissible().unwrap(),
            step(&[1.0], &[1.0])
        );
        let p = Calibrator::power(0.5).unwrap();
        assert_eq!(p.dominate_to_admissible().unwrap(), p);
        assert_eq!(
            step(&[1.0, 4.0], &[0.0, 2.0])
                .dominate_to_admissible()
                .unwrap(),
            step(&[1.0, 4.0], &[0.5, 2.5])
        );
        assert_eq!(
            Calibrator::scaled_power(0.5, 0.25)
                .unwrap()
                .dominate_to_admissible()
                .unwrap(),
            p
        );
        assert!(matches!(
            step(&[1.0, 2.0], &[0.0, 4.0]).dominate_to_admissible(),
            Err(CalibratorError::NotCalibrator { .. })
        ));
    }

    #[test]
    fn rejects_malformed_steps() {
        assert!(Calibrator::step(vec![], vec![]).is_err());
        assert!(Calibrator::step(vec![2.0], vec![1.0]).is_err());
        assert!(Calibrator::step(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Calibrator::step(vec![1.0, 2.0], vec![2.0, 1.0]).is_err());
        assert!(Calibrator::step(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(Calibrator::step(vec![1.0], vec![-1.0]).is_err());
        assert!(Calibrator::power(0.0).is_err());
        assert!(Calibrator::power(1.0).is_err());
    }

    #[test]
    fn measure_examples() {
        let one = step(&[1.0], &[1.0]).measure().unwrap();
        assert_eq!(one.atoms(), &[(1.0, 1.0)]);
        assert_eq!(one.tail_mass(1.0), 0.0);
        assert_eq!(one.partial_first_moment(100.0), 1.0);

        let p = Calibrator::power(0.5).unwrap().measure().unwrap();
        assert_eq!(p.atoms(), &[(1.0, 0.5)]);
        assert!((p.total_mass() - 1.0).abs() < 1e-12);
        assert!((p.tail_mass(4.0) - 0.25).abs() < 1e-15);
        assert!((p.tail_mass(1.0) - 0.5).abs() < 1e-15);
        assert!((p.partial_first_moment(4.0) - 1.0).abs() < 1e-15);

        let s = step(&[1.0, 2.0], &[0.5, 1.5]).measure().unwrap();
        assert_eq!(s.atoms(), &[(1.0, 0.5), (2.0, 0.5)]);
        assert_eq!(s.partial_first_moment(1.9), 0.5);
        assert_eq!(s.partial_first_moment(2.0), 1.5);
        assert_eq!(s.tail_mass(1.5), 0.5);
        assert_eq!(s.tail_mass(2.0), 0.0);
    }

    #[test]
    fn measure_requires_admissible() {
        assert!(matches!(
            step(&[1.0], &[0.5]).measure(),
            Err(CalibratorError::NotAdmissible { .. })
        ));
    }

    #[test]
    fn moment_calibrator_round_trips_representations() {
        let f = step(&[1.0, 2.0, 5.0], &[0.5, 1.0, 2.25]);
        assert!(f.is_admissible());
        let m = f.measure().unwrap();
        assert_eq!(m.calibrator().to_calibrator().unwrap(), f);

        let p = Calibrator::power(0.7).unwrap();
        let m = p.measure().unwrap();
        assert_eq!(m.calibrator().to_calibrator().unwrap(), p);
        assert!(m.calibrator().eval(0.9).is_err());
    }

    #[test]
    fn calibrator_json() {
        let f: Calibrator = serde_json::from_str(r#"{"kind":"power","alpha":0.5}"#).unwrap();
        assert_eq!(f, Calibrator::power(0.5).unwrap());
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"kind":"power","alpha":0.5}"#
        );
        let s: Calibrator =
            serde_json::from_str(r#"{"kind":"step","breakpoints":[1,2],"values":[0,4]}"#).unwrap();
        assert_eq!(s, step(&[1.0, 2.0], &[0.0, 4.0]));
        assert!(
            serde_json::from_str::<Calibrator>(r#"{"kind":"power","alpha":0.5,"x":1}"#).is_err()
        );
        assert!(serde_json::from_str::<Calibrator>(r#"{"kind":"power","alpha":1.5}"#).is_err());
    }

    #[test]
    fn measure_json() {
        let m = Calibrator::power(0.5).unwrap().measure().unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"atoms":[[1.0,0.5]],"power_tail":{"alpha":0.5},"total_mass":1.0}"#
        );
        let back: CalibrationMeasure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<CalibrationMeasure>(r#"{"atoms":[[0.5,1.0]]}"#).is_err());
    }

    #[test]
    fn insurance_params_range() {
        assert!(InsuranceParams::new(0.0).is_ok());
        assert!(InsuranceParams::new(1.0).is_ok());
        assert!(InsuranceParams::new(1.5).is_err());
        assert!(InsuranceParams::new(f64::NAN).is_err());
    }
}
