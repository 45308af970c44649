//! Single-cluster mobile multipath channel and the received field.
//!
//! A cluster has `L` paths around a central angle `theta_c`. Each path
//! carries an angular offset uniform on `[-C_AO, C_AO]`, a complex gain
//! (unit total power), and a Bernoulli flag deciding whether the scatterer
//! velocity adds to the receiver velocity. The field at element `n` and
//! carrier `m` is the sum of the Doppler-shifted lens responses of the
//! paths plus circular complex Gaussian noise.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal};

use crate::error::{ensure_finite, Error, Result};
use crate::lens::CarrierGrid;
use crate::placement::ArrayGeometry;
use crate::rng::SimRng;
use crate::{sinc, ComplexSample, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Central angle of arrival, radians.
    pub theta_c: f64,
    /// Path count `L`.
    pub paths: usize,
    /// Maximum angular offset `C_AO`, radians.
    pub c_ao: f64,
    /// Receiver velocity, m/s.
    pub v_rx: f64,
    /// Scatterer velocity, m/s.
    pub v_sc: f64,
    /// Probability that a path's scatterer velocity contributes.
    pub bernoulli_p: f64,
    /// Total noise power `N0` across the array; each entry gets `N0 / N`.
    pub noise_n0: f64,
    pub seed: u64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            theta_c: 0.0,
            paths: 10,
            c_ao: 1f64.to_radians(),
            v_rx: -100.0 / 3.6,
            v_sc: 100.0 / 3.6,
            bernoulli_p: 0.5,
            noise_n0: 0.0,
            seed: 0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("theta_c", self.theta_c)?;
        ensure_finite("c_ao", self.c_ao)?;
        ensure_finite("v_rx", self.v_rx)?;
        ensure_finite("v_sc", self.v_sc)?;
        ensure_finite("bernoulli_p", self.bernoulli_p)?;
        ensure_finite("noise_n0", self.noise_n0)?;
        if self.paths == 0 {
            return Err(Error::invalid("paths", "need at least one path"));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.c_ao) {
            return Err(Error::invalid("c_ao", "must lie in [0, pi/2]"));
        }
        if !(0.0..=1.0).contains(&self.bernoulli_p) {
            return Err(Error::invalid("bernoulli_p", "must lie in [0, 1]"));
        }
        if self.noise_n0 < 0.0 {
            return Err(Error::invalid("noise_n0", "must be non-negative"));
        }
        if self.theta_c.abs() > std::f64::consts::FRAC_PI_2 + 1e-12 {
            return Err(Error::invalid("theta_c", "must lie in [-pi/2, pi/2]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRealization {
    pub theta_c: f64,
    pub offsets: Vec<f64>,
    pub gains: Vec<Complex64>,
    pub moving: Vec<bool>,
    /// Relative velocity per path, m/s.
    pub v_rel: Vec<f64>,
    /// Doppler shift per carrier (outer) and path (inner), Hz.
    pub doppler: Vec<Vec<f64>>,
}

impl ClusterRealization {
    pub fn paths(&self) -> usize {
        self.offsets.len()
    }
}

/// Antenna x sub-carrier field, stored antenna-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedField {
    n_elements: usize,
    n_carriers: usize,
    data: Vec<ComplexSample>,
}

impl ReceivedField {
    pub fn zeros(n_elements: usize, n_carriers: usize) -> Self {
        Self {
            n_elements,
            n_carriers,
            data: vec![Complex64::new(0.0, 0.0); n_elements * n_carriers],
        }
    }

    pub fn from_vec(n_elements: usize, n_carriers: usize, data: Vec<ComplexSample>) -> Result<Self> {
        if data.len() != n_elements * n_carriers {
            return Err(Error::DimensionMismatch {
                what: "field entries",
                expected: n_elements * n_carriers,
                got: data.len(),
            });
        }
        Ok(Self {
            n_elements,
            n_carriers,
            data,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_carriers(&self) -> usize {
        self.n_carriers
    }

    /// Entry at element position `pos` (0-based) and carrier `m`.
    #[inline]
    pub fn get(&self, pos: usize, m: usize) -> ComplexSample {
        self.data[pos * self.n_carriers + m]
    }

    #[inline]
    pub fn set(&mut self, pos: usize, m: usize, v: ComplexSample) {
        self.data[pos * self.n_carriers + m] = v;
    }

    pub fn as_slice(&self) -> &[ComplexSample] {
        &self.data
    }

    pub fn scaled(&self, k: ComplexSample) -> Self {
        Self {
            data: self.data.iter().map(|v| v * k).collect(),
            ..*self
        }
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// `C_AO * alpha` with `alpha` uniform on `[-1, 1]`.
pub fn draw_angular_offset<R: Rng + ?Sized>(c_ao: f64, rng: &mut R) -> f64 {
    let alpha: f64 = rng.random_range(-1.0..=1.0);
    c_ao * alpha
}

/// `v_rx + alpha_D |(v_rx + v_sc sin(theta), v_sc cos(theta))|`.
pub fn relative_velocity(theta_l: f64, v_rx: f64, v_sc: f64, moving: bool) -> f64 {
    if !moving {
        return v_rx;
    }
    let along = v_rx + v_sc * theta_l.sin();
    let across = v_sc * theta_l.cos();
    v_rx + along.hypot(across)
}

/// `f_d = v_R f_m / c`.
#[inline]
pub fn doppler_freq(v_rel: f64, f_m: f64) -> f64 {
    v_rel * f_m / SPEED_OF_LIGHT
}

/// Draws one cluster. The draw order is offsets, then gains, then motion
/// flags, so the same stream always yields the same realization.
pub fn draw_cluster(params: &ChannelParams, grid: &CarrierGrid, rng: &mut SimRng) -> Result<ClusterRealization> {
    params.validate()?;
    let l = params.paths;
    let offsets: Vec<f64> = (0..l).map(|_| draw_angular_offset(params.c_ao, rng)).collect();

    let mut gains: Vec<Complex64> = (0..l)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let power: f64 = gains.iter().map(|g| g.norm_sqr()).sum();
    let scale = power.sqrt().recip();
    gains.iter_mut().for_each(|g| *g *= scale);

    let coin = Bernoulli::new(params.bernoulli_p).map_err(|e| Error::invalid("bernoulli_p", e.to_string()))?;
    let moving: Vec<bool> = (0..l).map(|_| coin.sample(rng)).collect();

    let v_rel: Vec<f64> = offsets
        .iter()
        .zip(&moving)
        .map(|(&d, &mv)| relative_velocity(params.theta_c + d, params.v_rx, params.v_sc, mv))
        .collect();
    let doppler = grid
        .freqs
        .iter()
        .map(|&f| v_rel.iter().map(|&v| doppler_freq(v, f)).collect())
        .collect();

    Ok(ClusterRealization {
        theta_c: params.theta_c,
        offsets,
        gains,
        moving,
        v_rel,
        doppler,
    })
}

fn check_dims(cluster: &ClusterRealization, grid: &CarrierGrid) -> Result<()> {
    if cluster.doppler.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            what: "cluster Doppler rows vs carriers",
            expected: grid.len(),
            got: cluster.doppler.len(),
        });
    }
    if let Some(row) = cluster.doppler.iter().find(|row| row.len() != cluster.paths()) {
        return Err(Error::DimensionMismatch {
            what: "cluster Doppler columns vs paths",
            expected: cluster.paths(),
            got: row.len(),
        });
    }
    if cluster.gains.len() != cluster.paths() {
        return Err(Error::DimensionMismatch {
            what: "cluster gains vs paths",
            expected: cluster.paths(),
            got: cluster.gains.len(),
        });
    }
    Ok(())
}

/// Noise-free field
/// `r[n, m] = sum_l g_l sinc(D (f_m + f_d) / c * (sin(theta_c + dtheta_l) - ((f_m + f_d) / f_c) Omega_n))`.
pub fn synthesize_noiseless(
    cluster: &ClusterRealization,
    geometry: &ArrayGeometry,
    grid: &CarrierGrid,
) -> Result<ReceivedField> {
    check_dims(cluster, grid)?;
    let f_c = geometry.lens.center_freq_hz;
    let aperture = geometry.lens.aperture_m;
    let path_sines: Vec<f64> = cluster.offsets.iter().map(|d| (cluster.theta_c + d).sin()).collect();
    let mut field = ReceivedField::zeros(geometry.len(), grid.len());
    for (m, &f_m) in grid.freqs.iter().enumerate() {
        for (pos, &w) in geometry.omega.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((g, &s), &f_d) in cluster.gains.iter().zip(&path_sines).zip(&cluster.doppler[m]) {
                let f = f_m + f_d;
                acc += g * sinc(aperture * f / SPEED_OF_LIGHT * (s - f / f_c * w));
            }
            field.set(pos, m, acc);
        }
    }
    Ok(field)
}

/// Adds circular complex Gaussian noise of variance `variance` to every entry.
pub fn add_noise(field: &mut ReceivedField, variance: f64, rng: &mut SimRng) -> Result<()> {
    ensure_finite("variance", variance)?;
    if variance < 0.0 {
        return Err(Error::invalid("variance", "must be non-negative"));
    }
    let sigma = (variance / 2.0).sqrt();
    for v in field.data.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(re, im) * sigma;
    }
    Ok(())
}

/// Per-entry noise variance for a total noise power `n0` spread over `N`
/// antennas.
pub fn entry_noise_variance(n0: f64, n_elements: usize) -> f64 {
    n0 / n_elements as f64
}

/// Noisy field: [`synthesize_noiseless`] plus noise of variance
/// `N0 / N` per entry drawn from `rng`.
pub fn synthesize_rx(
    cluster: &ClusterRealization,
    geometry: &ArrayGeometry,
    grid: &CarrierGrid,
    params: &ChannelParams,
    rng: &mut SimRng,
) -> Result<ReceivedField> {
    let mut field = synthesize_noiseless(cluster, geometry, grid)?;
    if params.noise_n0 > 0.0 {
        add_noise(&mut field, entry_noise_variance(params.noise_n0, geometry.len()), rng)?;
    }
    Ok(field)
}
