//! Monte-Carlo benchmark: random linear fields under random outer rotations.
//!
//! Every trial owns an independent random stream. The generator is
//! ChaCha8 seeded from the master seed, with the trial index selecting the
//! stream, so any trial can be replayed on its own and results do not depend
//! on execution order or thread count.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{detect, DetectionConfig};
use crate::fields::{LinearField, Matrix3, VectorField};
use crate::ga3::{norm3, UnitBivector};

/// Upper end of the sampled rotation angle, just below a half turn.
pub const MAX_TRIAL_ANGLE: f64 = PI * (1.0 - 1e-9);

pub type TrialRng = ChaCha8Rng;

/// Random stream for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Nine coefficients uniform on `[-1, 1]`, support `(-1, 1)^3`.
pub fn random_linear_field<R: Rng + ?Sized>(rng: &mut R) -> LinearField {
    let mut m = [[0.0; 3]; 3];
    for row in &mut m {
        for c in row.iter_mut() {
            *c = rng.random_range(-1.0..=1.0);
        }
    }
    LinearField::on_cube(m)
}

/// Plane dual to a uniformly distributed unit normal, angle uniform on
/// `[0, MAX_TRIAL_ANGLE]`.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> (UnitBivector, f64) {
    let normal = loop {
        let n: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        if norm3(n) > 1e-12 {
            break n;
        }
    };
    let plane = UnitBivector::from_normal(normal).expect("normal is nonzero");
    let angle = rng.random_range(0.0..=MAX_TRIAL_ANGLE);
    (plane, angle)
}

/// Frobenius norm of the coefficient difference.
pub fn coefficient_error(original: &LinearField, recovered: &LinearField) -> f64 {
    matrix_distance(&original.matrix, &recovered.matrix)
}

pub fn matrix_distance(a: &Matrix3, b: &Matrix3) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Everything recorded about one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: u64,
    pub field: LinearField,
    pub plane: UnitBivector,
    pub angle: f64,
    pub error: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn run_trial(master_seed: u64, index: u64, cfg: &DetectionConfig) -> TrialOutcome {
    let mut rng = trial_rng(master_seed, index);
    let field = random_linear_field(&mut rng);
    let (plane, angle) = random_rotation(&mut rng);
    let reference = VectorField::Linear(field.clone());
    let pattern = reference.rotate_outer(plane, angle);
    let (error, iterations, converged) = match detect(&reference, &pattern, cfg) {
        Ok(report) => {
            let recovered = report
                .corrected_pattern
                .as_linear()
                .expect("rotating a linear field keeps it linear");
            (coefficient_error(&field, recovered), report.iterations, report.converged)
        }
        // A zero coefficient matrix is possible only in principle; count it as a failure.
        Err(_) => (f64::INFINITY, 0, false),
    };
    TrialOutcome { index, field, plane, angle, error, iterations, converged }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub epsilon: f64,
    pub n_trials: usize,
    pub average_error: f64,
    pub max_error: f64,
    pub average_iterations: f64,
    pub n_nonconverged: usize,
}

impl TrialStats {
    pub const CSV_HEADER: &'static str = "epsilon,n,avg_error,max_error,avg_iters,n_nonconverged";

    pub fn from_outcomes(epsilon: f64, outcomes: &[TrialOutcome]) -> Self {
        let n = outcomes.len();
        let (mut err_sum, mut err_max, mut iter_sum, mut failed) = (0.0, 0.0f64, 0usize, 0usize);
        for o in outcomes {
            err_sum += o.error;
            err_max = err_max.max(o.error);
            iter_sum += o.iterations;
            failed += usize::from(!o.converged);
        }
        let denom = n.max(1) as f64;
        Self {
            epsilon,
            n_trials: n,
            average_error: err_sum / denom,
            max_error: err_max,
            average_iterations: iter_sum as f64 / denom,
            n_nonconverged: failed,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6e},{:.6e},{:.4},{}",
            self.epsilon, self.n_trials, self.average_error, self.max_error, self.average_iterations, self.n_nonconverged
        )
    }
}

/// Runs trials `0..n` in parallel and collects them in index order.
pub fn run_outcomes(n: usize, cfg: &DetectionConfig, master_seed: u64) -> Vec<TrialOutcome> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| run_trial(master_seed, i, cfg))
        .collect()
}

pub fn run_trials(n: usize, epsilon: f64, master_seed: u64) -> TrialStats {
    let cfg = DetectionConfig::with_epsilon(epsilon);
    TrialStats::from_outcomes(epsilon, &run_outcomes(n, &cfg, master_seed))
}
