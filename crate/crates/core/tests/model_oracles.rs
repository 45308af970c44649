//! Closed-form signal model against independent numerical references.

use approx::assert_relative_eq;
use lensaoa::harness::validate::oracle_max_rel_error;
use lensaoa::lens::{
    aperture_integral_oracle, element_sine_angle, intensity_loss, rx_multicarrier, rx_narrowband, CarrierGrid,
    LensSpec,
};
use lensaoa::rng::{domain, SeedTree};
use rand::Rng;

fn grid() -> CarrierGrid {
    CarrierGrid::new(28e9, 2e9, 6).unwrap()
}

#[test]
fn closed_form_tracks_aperture_integral() {
    for seed in [1, 2, 3] {
        let err = oracle_max_rel_error(&grid(), 200, seed).unwrap();
        assert!(err < 1e-2, "seed {seed}: {err}");
    }
}

#[test]
fn quadrature_is_converged_at_two_to_the_sixteen() {
    let grid = grid();
    let lens = LensSpec::for_elements(21, 28e9).unwrap();
    for (theta, n, m) in [(0.3, 3, 0), (-0.7, -6, 5), (0.05, 0, 2)] {
        let s = n as f64 / 21.0;
        let a = aperture_integral_oracle(theta, s, m, &lens, &grid, 1 << 16).unwrap().norm();
        let b = aperture_integral_oracle(theta, s, m, &lens, &grid, 1 << 17).unwrap().norm();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn aligned_centre_carrier_integrates_to_unit_peak() {
    // M = 1 puts the single carrier at f_c.
    let grid = CarrierGrid::new(28e9, 2e9, 1).unwrap();
    let lens = LensSpec::for_elements(15, 28e9).unwrap();
    let s: f64 = 4.0 / 15.0;
    let v = aperture_integral_oracle(s.asin(), s, 0, &lens, &grid, 1 << 14).unwrap();
    assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-9);
}

/// The wideband response equals the narrowband one seen at the squinted
/// sine angle with the carrier's own wavelength.
#[test]
fn squint_reciprocity_on_random_tuples() {
    let grid = grid();
    let mut rng = SeedTree::new(77).stream(domain::ORACLE, 1);
    for _ in 0..100 {
        let n_el = [9usize, 15, 21, 33][rng.random_range(0..4)];
        let half = (n_el / 2) as i32;
        let n = rng.random_range(-half..=half);
        let m = rng.random_range(0..grid.len());
        let theta: f64 = rng.random_range(-1.4..1.4);
        let lens = LensSpec::for_elements(n_el, 28e9).unwrap();
        let s_n = element_sine_angle(n, lens.element_spacing(), lens.focal_m).unwrap();
        let wide = rx_multicarrier(theta, s_n, m, &lens, &grid).unwrap().re;

        let lam = grid.wavelength(m);
        let x = lens.aperture_m / lam * (grid.freqs[m] / grid.center_hz * s_n - theta.sin());
        let reference = if x == 0.0 { 1.0 } else { (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x) };
        assert_relative_eq!(wide, reference, epsilon = 1e-12);
    }
}

#[test]
fn narrowband_half_power_point() {
    let lens = LensSpec::for_elements(21, 28e9).unwrap();
    let d = lens.element_spacing();
    let s0 = element_sine_angle(0, d, lens.focal_m).unwrap();
    // sinc^2(x) = 1/2 at x = 0.442946...
    let x = 0.442_946_470_689_452_3;
    let theta = (s0 - x / lens.aperture_in_wavelengths(28e9)).asin();
    let p = rx_narrowband(theta, 0, &lens, d).unwrap().norm_sqr();
    assert!((p - 0.5).abs() < 1e-3, "{p}");
}

/// Swept on the long-focus side up to a 20% shift. For `F_delta < F` the
/// `F / F_delta` prefactor outgrows the Fresnel integral at small shifts,
/// and past the sweep the integral starts to ripple.
#[test]
fn intensity_loss_falls_with_focal_mismatch() {
    let lens = LensSpec::for_elements(21, 28e9).unwrap();
    let lam = lens.center_wavelength();
    let mut prev = 1.0 + 1e-12;
    for i in 0..=40 {
        let f_delta = lens.focal_m * (1.0 + 0.005 * i as f64);
        let a = intensity_loss(lens.focal_m, f_delta, lens.fresnel_k, lam).unwrap().norm();
        assert!(a < prev, "step {i}: {a} !< {prev}");
        prev = a;
    }
}

/// A focal shift of 1e-4 wavelengths costs a negligible fraction of the
/// received power.
#[test]
fn small_focal_shift_is_negligible() {
    let lens = LensSpec::for_elements(21, 28e9).unwrap();
    let lam = lens.center_wavelength();
    let a = intensity_loss(lens.focal_m, lens.focal_m + 1e-4 * lam, lens.fresnel_k, lam).unwrap();
    let loss = 1.0 - a.norm_sqr();
    assert!(loss > 0.0 && loss < 1e-3, "{loss}");
}
