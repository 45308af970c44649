//! Wideband lens antenna array (LAA) simulation.
//!
//! The crate models the received field of an ideal RF lens fed by a
//! multi-carrier pilot, places a sparse set of antennas on the focal arc
//! (either the uniform critical-sampling grid or a geometric-sequence
//! layout that exploits beam squint), and estimates the central angle of
//! arrival of a mobile multipath cluster with a max-energy antenna
//! selection estimator or a dictionary correlator.
//!
//! Module map:
//!
//! - [`lens`]: closed-form and aperture-integral received-signal models,
//!   Fresnel integrals and the focal intensity-loss factor.
//! - [`channel`]: seeded single-cluster multipath draws and synthesis of
//!   the noisy antenna x sub-carrier field.
//! - [`placement`]: uniform and geometric sine-angle grids, the common
//!   ratio solver and the squint coverage predicates.
//! - [`estimators`]: max-energy selection, correlator and top-k correlator.
//! - [`analysis`]: average received power, MSE lower bound, outage,
//!   complexity and power models, squint maps.
//! - [`harness`]: configuration, Monte Carlo sweeps, CSV emission and the
//!   self-check suite used by the CLI.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod lens;
pub mod placement;
pub mod rng;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Complex field amplitude at one antenna / sub-carrier.
pub type ComplexSample = num_complex::Complex64;

/// Normalized sinc, `sin(pi x) / (pi x)` with `sinc(0) = 1`.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_zeros_at_nonzero_integers() {
        assert_eq!(sinc(0.0), 1.0);
        for k in 1..20 {
            assert!(sinc(k as f64).abs() < 1e-15);
            assert!(sinc(-(k as f64)).abs() < 1e-15);
        }
    }
}
