//! Iterative detection of the outer rotation between a reference field `v`
//! and a rotated pattern `u`.
//!
//! Each round correlates the current pattern against the reference, reads the
//! angle `phi` and plane `Q` of the correlation, and rotates the pattern back
//! by `e^{-(phi/2) Q} u e^{(phi/2) Q}`. The correction rotors are multiplied
//! into an accumulator. The loop stops once `phi <= epsilon`.
//!
//! A real-valued correlation in the first round carries no plane. This
//! happens when the fields already agree and when they differ by a half turn,
//! so the first round then applies a fixed disturbance rotation instead.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correlation::{correlate_at_origin, CorrelationError};
use crate::fields::VectorField;
use crate::ga3::{bivector_is_negligible, compose_rotation, polar_decompose, GaError, Rotation, Rotor, UnitBivector};

/// When the first-round disturbance fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceTrigger {
    /// Any real-valued first correlation, positive or negative.
    #[default]
    RealValued,
    /// Only a real and nonnegative first correlation (`phi = 0`).
    LiteralZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub disturbance_angle: f64,
    pub disturbance_plane: UnitBivector,
    pub trigger: DisturbanceTrigger,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_iterations: 1000,
            disturbance_angle: FRAC_PI_4,
            disturbance_plane: UnitBivector::E12,
            trigger: DisturbanceTrigger::RealValued,
        }
    }
}

impl DetectionConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon, ..Self::default() }
    }

    pub fn max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn validate(&self) -> Result<(), DetectError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(DetectError::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(DetectError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !self.disturbance_angle.is_finite() {
            return Err(DetectError::InvalidConfig("disturbance angle must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("field has zero L2 norm")]
    ZeroField,
    #[error("correlation vanished in round {0}")]
    DegenerateCorrelation(usize),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    Algebra(#[from] GaError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// Angle of the detected rotation in `[0, pi]`.
    pub alpha: f64,
    /// Plane of the detected rotation: `pattern ~ rotate_outer(reference, plane, alpha)`.
    pub plane: UnitBivector,
    /// The pattern after all corrections; approximates the reference.
    pub corrected_pattern: VectorField,
    pub iterations: usize,
    /// Angle applied in each round.
    pub phi_trace: Vec<f64>,
    /// The correction rotation applied in each round.
    pub corrections: Vec<Rotation>,
    pub converged: bool,
}

impl DetectionReport {
    /// Rotation taking the reference onto the pattern.
    pub fn misalignment(&self) -> Rotation {
        Rotation::new(self.plane, self.alpha)
    }

    /// Rotation taking the pattern back onto the reference.
    pub fn correction(&self) -> Rotation {
        self.misalignment().inverse()
    }
}

/// Detects the outer rotation taking `reference` onto `pattern`.
///
/// Non-convergence within `max_iterations` is reported through
/// [`DetectionReport::converged`], not as an error.
pub fn detect(
    reference: &VectorField,
    pattern: &VectorField,
    cfg: &DetectionConfig,
) -> Result<DetectionReport, DetectError> {
    cfg.validate()?;
    if !(reference.l2_norm() > 0.0 && pattern.l2_norm() > 0.0) {
        return Err(DetectError::ZeroField);
    }

    let mut phi = PI;
    // Accumulated correction e^{(alpha/2) P}.
    let mut alpha = 0.0;
    let mut plane = UnitBivector::E12;
    let mut iter = 0;
    let mut u = pattern.clone();
    let mut phi_trace = Vec::new();
    let mut corrections = Vec::new();

    while phi > cfg.epsilon && iter < cfg.max_iterations {
        iter += 1;
        let cor = correlate_at_origin(&u, reference)?;
        let (mut q, real) = match polar_decompose(&cor) {
            Ok(polar) => {
                phi = polar.angle;
                (polar.plane, bivector_is_negligible(&cor))
            }
            Err(GaError::ZeroMultivector) if iter == 1 => (UnitBivector::E12, true),
            Err(GaError::ZeroMultivector) => return Err(DetectError::DegenerateCorrelation(iter)),
            Err(e) => return Err(e.into()),
        };
        let disturb = iter == 1
            && real
            && match cfg.trigger {
                DisturbanceTrigger::RealValued => true,
                DisturbanceTrigger::LiteralZero => cor.scalar_part() >= 0.0,
            };
        if disturb {
            phi = cfg.disturbance_angle;
            q = cfg.disturbance_plane;
        }
        let step = Rotation::new(q, phi);
        u = u.rotated(&step);
        (alpha, plane) = compose_rotation(alpha, plane, phi, q);
        phi_trace.push(phi);
        corrections.push(step);
    }

    Ok(DetectionReport {
        alpha,
        plane: -plane,
        corrected_pattern: u,
        iterations: iter,
        phi_trace,
        corrections,
        converged: phi <= cfg.epsilon,
    })
}

/// Remaining misalignment after `applied` corrections, for a pattern built
/// as `rotate_outer(v, true_plane, true_angle)`: the angle of the rotor
/// `e^{(true_angle/2) true_plane} * prod e^{(phi_i/2) Q_i}`.
pub fn residual_angle(applied: &[Rotation], true_plane: UnitBivector, true_angle: f64) -> f64 {
    residual_series(applied, true_plane, true_angle)
        .last()
        .copied()
        .unwrap_or(true_angle)
}

/// Residual misalignment before any correction and after each one.
pub fn residual_series(applied: &[Rotation], true_plane: UnitBivector, true_angle: f64) -> Vec<f64> {
    let mut net: Rotor = Rotation::new(true_plane, true_angle).rotor();
    let mut out = Vec::with_capacity(applied.len() + 1);
    out.push(net.rotation().angle);
    for step in applied {
        net = net.then(&step.rotor());
        out.push(net.rotation().angle);
    }
    out
}
