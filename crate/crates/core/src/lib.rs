//! Detection of outer rotational misalignment between 3D vector fields.
//!
//! The kernel is the algebra Cl(3,0) ([`ga3`]). Vector fields ([`fields`]) are
//! compared through their geometric cross-correlation at the origin
//! ([`correlation`]), which yields a rotor approximating the rotation between
//! them. Re-applying that rotor until its angle vanishes ([`detector`])
//! recovers the full rotation. [`experiments`] runs the randomized benchmark
//! and [`cli`] wires everything to the `georot` binary.

pub mod cli;
pub mod correlation;
pub mod detector;
pub mod experiments;
pub mod fields;
pub mod ga3;
pub mod verify;

pub use correlation::{correlate_at_origin, normalized_correlation, CorrelationError, CorrelationResult};
pub use detector::{detect, residual_angle, residual_series, DetectError, DetectionConfig, DetectionReport, DisturbanceTrigger};
pub use experiments::{coefficient_error, random_linear_field, random_rotation, run_trials, TrialStats};
pub use fields::{Aabb, FieldError, LinearField, PiecewiseConstantField, SampledField, VectorField};
pub use ga3::{compose_rotation, exp_bivector, polar_decompose, sandwich, Multivector, PolarForm, Rotation, Rotor, UnitBivector};
