//! Analytic predictions and resource models.

use crate::channel::{draw_cluster, relative_velocity, synthesize_noiseless, ChannelParams};
use crate::error::{ensure_finite, Error, Result};
use crate::estimators::ms_select;
use crate::lens::{rx_multicarrier, CarrierGrid};
use crate::placement::ArrayGeometry;
use crate::rng::{domain, SeedTree};
use crate::{sinc, SPEED_OF_LIGHT};

/// Default squared-error requirement, rad^2 (about 1.5 degrees rms).
pub const DEFAULT_GAMMA_REQ: f64 = 7e-4;

/// `sum_{m=1..M} sinc^2((D f_m / c) (m / M) gap)`.
fn approx_from_gap(geometry: &ArrayGeometry, grid: &CarrierGrid, gap: f64) -> f64 {
    let m_count = grid.len() as f64;
    grid.freqs
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let x = geometry.lens.aperture_in_wavelengths(f) * ((i + 1) as f64 / m_count) * gap;
            sinc(x).powi(2)
        })
        .sum()
}

/// Averaged received power predicted from the gap between element `n_star`
/// and its right neighbour.
pub fn avg_power_approx(geometry: &ArrayGeometry, grid: &CarrierGrid, n_star: i32) -> Result<f64> {
    let here = geometry.omega_at(n_star).ok_or(Error::NoNeighbour { index: n_star })?;
    let right = geometry
        .omega_at(n_star + 1)
        .ok_or(Error::NoNeighbour { index: n_star })?;
    Ok(approx_from_gap(geometry, grid, here - right))
}

/// [`avg_power_approx`] for a cluster centred on `theta_c`: the element
/// nearest to `sin(theta_c)` paired with its neighbour on the side of
/// `theta_c` (the other side at the array edge).
pub fn avg_power_approx_at(geometry: &ArrayGeometry, grid: &CarrierGrid, theta_c: f64) -> Result<f64> {
    ensure_finite("theta_c", theta_c)?;
    let s = theta_c.sin();
    let n0 = geometry.nearest(s);
    let here = geometry.omega_at(n0).unwrap();
    let toward = if s >= here { n0 + 1 } else { n0 - 1 };
    let away = 2 * n0 - toward;
    let other = geometry
        .omega_at(toward)
        .or_else(|| geometry.omega_at(away))
        .ok_or(Error::NoNeighbour { index: n0 })?;
    Ok(approx_from_gap(geometry, grid, here - other))
}

/// Monte Carlo average of the noise-free MS-selected power
/// `sum_m |r[n*_m, m]|^2` over `trials` clusters centred on `params.theta_c`.
/// Trial `t` draws from cluster stream `t` of `seeds`.
pub fn avg_power_mc(
    geometry: &ArrayGeometry,
    grid: &CarrierGrid,
    params: &ChannelParams,
    trials: usize,
    seeds: &SeedTree,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    let mut total = 0.0;
    for t in 0..trials {
        let cluster = draw_cluster(params, grid, &mut seeds.stream(domain::CLUSTER, t as u64))?;
        total += selected_power(&synthesize_noiseless(&cluster, geometry, grid)?, geometry);
    }
    Ok(total / trials as f64)
}

/// `sum_m |r[n*_m, m]|^2` for the MS selection of `field`.
pub fn selected_power(field: &crate::channel::ReceivedField, geometry: &ArrayGeometry) -> f64 {
    ms_select(field)
        .iter()
        .enumerate()
        .map(|(m, &n)| field.get(geometry.position(n).unwrap(), m).norm_sqr())
        .sum()
}

/// `(M |S| / (2N)) N0 / G`.
pub fn mse_lower_bound(m: usize, subset_size: f64, n: usize, n0: f64, g: f64) -> Result<f64> {
    for (name, v) in [("subset_size", subset_size), ("n0", n0), ("g", g)] {
        ensure_finite(name, v)?;
        if v <= 0.0 {
            return Err(Error::invalid(name, "must be positive"));
        }
    }
    if m == 0 || n == 0 {
        return Err(Error::invalid("m/n", "must be positive"));
    }
    Ok(m as f64 * subset_size / (2.0 * n as f64) * n0 / g)
}

/// Fraction of central angles on `[-pi/2, pi/2]` whose predicted SNR
/// `G(theta_c) / N0` falls below `gamma_th`, by the midpoint rule.
pub fn outage_integral(
    geometry: &ArrayGeometry,
    grid: &CarrierGrid,
    gamma_th: f64,
    n0: f64,
    quad_points: usize,
) -> Result<f64> {
    ensure_finite("gamma_th", gamma_th)?;
    ensure_finite("n0", n0)?;
    if quad_points < 181 {
        return Err(Error::invalid("quad_points", format!("need at least 181, got {quad_points}")));
    }
    if n0 <= 0.0 {
        return Err(Error::invalid("n0", "must be positive"));
    }
    let h = std::f64::consts::PI / quad_points as f64;
    let mut hits = 0usize;
    for i in 0..quad_points {
        let theta = -std::f64::consts::FRAC_PI_2 + (i as f64 + 0.5) * h;
        if gamma_th > avg_power_approx_at(geometry, grid, theta)? / n0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / quad_points as f64)
}

/// Fraction of squared errors strictly above `gamma_req`.
pub fn outage_empirical(squared_errors: &[f64], gamma_req: f64) -> Result<f64> {
    if squared_errors.is_empty() {
        return Err(Error::invalid("squared_errors", "need at least one trial"));
    }
    let hits = squared_errors.iter().filter(|&&e| e > gamma_req).count();
    Ok(hits as f64 / squared_errors.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConstants {
    /// Phase shifter, mW.
    pub p_ph: f64,
    /// RF chain, mW.
    pub p_rf: f64,
    /// Signal processing, mW.
    pub p_sp: f64,
    /// Switch, mW.
    pub p_sw: f64,
}

impl Default for PowerConstants {
    fn default() -> Self {
        Self {
            p_ph: 30.0,
            p_rf: 40.0,
            p_sp: 5.0,
            p_sw: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerComplexityReport {
    pub t_ms: u64,
    pub t_corr: u64,
    pub p_ms_mw: f64,
    pub p_conv_mw: f64,
    pub constants: PowerConstants,
}

/// `(T_MS, T_Corr) = (MN + M + 1, d_dic M N^2)`.
pub fn complexity_report(m: usize, n: usize, d_dic: usize) -> (u64, u64) {
    let (m, n, d) = (m as u64, n as u64, d_dic as u64);
    (m * n + m + 1, d * m * n * n)
}

/// `(P_MS, P_Conv) = (N P_RF + P_SW + P_SP, N (P_PH + P_RF + P_SP))`, mW.
pub fn power_report(n: usize, k: &PowerConstants) -> (f64, f64) {
    let n = n as f64;
    (n * k.p_rf + k.p_sw + k.p_sp, n * (k.p_ph + k.p_rf + k.p_sp))
}

pub fn resource_report(m: usize, n: usize, d_dic: usize, constants: PowerConstants) -> PowerComplexityReport {
    let (t_ms, t_corr) = complexity_report(m, n, d_dic);
    let (p_ms_mw, p_conv_mw) = power_report(n, &constants);
    PowerComplexityReport {
        t_ms,
        t_corr,
        p_ms_mw,
        p_conv_mw,
        constants,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquintPoint {
    pub freq_hz: f64,
    pub theta: f64,
    /// `|r|` at the element nearest to `sin(theta)`.
    pub amplitude: f64,
    /// `(f_m / f_c - 1) sin(theta)`.
    pub sine_offset: f64,
    /// `(v_R / c) (f_m / f_c) |sin(theta)|` with the scatterer moving.
    pub doppler_offset: f64,
}

/// Beam-squint map over every carrier of `grid` and every angle in `angles`.
pub fn squint_map(
    geometry: &ArrayGeometry,
    grid: &CarrierGrid,
    angles: &[f64],
    v_rx: f64,
    v_sc: f64,
) -> Result<Vec<SquintPoint>> {
    let f_c = geometry.lens.center_freq_hz;
    let mut out = Vec::with_capacity(angles.len() * grid.len());
    for (m, &f) in grid.freqs.iter().enumerate() {
        for &theta in angles {
            ensure_finite("theta", theta)?;
            if theta.abs() > std::f64::consts::FRAC_PI_2 + 1e-12 {
                return Err(Error::invalid("theta", "must lie in [-pi/2, pi/2]"));
            }
            let s = theta.sin();
            let w = geometry.omega_at(geometry.nearest(s)).unwrap();
            let amplitude = rx_multicarrier(theta, w, m, &geometry.lens, grid)?.norm();
            let v_rel = relative_velocity(theta, v_rx, v_sc, true);
            out.push(SquintPoint {
                freq_hz: f,
                theta,
                amplitude,
                sine_offset: (f / f_c - 1.0) * s,
                doppler_offset: v_rel.abs() / SPEED_OF_LIGHT * (f / f_c) * s.abs(),
            });
        }
    }
    Ok(out)
}
