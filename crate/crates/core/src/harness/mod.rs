//! Experiment driver: configuration, sweeps, CSV output and self-checks.

pub mod config;
pub mod csv;
pub mod sweeps;
pub mod tables;
pub mod validate;

pub use config::{ArrayChoice, EstimatorChoice, SimConfig, ThetaPolicy};
pub use sweeps::{
    run_angle_profile, run_bounds, run_power_profile, run_snr_sweep, BoundPoint, PowerPoint, SweepPoint,
    TrialOutcome,
};
pub use validate::{validate, ValidationReport};
