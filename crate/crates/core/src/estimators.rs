//! Angle-of-arrival estimators.
//!
//! The max-energy selection (MS) estimator picks, per sub-carrier, the
//! antenna with the largest received power, reads off that antenna's
//! squinted sine angle and averages over sub-carriers. The correlator scans
//! a dictionary of steering vectors and needs every antenna.

use crate::channel::ReceivedField;
use crate::error::{Error, Result};
use crate::lens::CarrierGrid;
use crate::placement::{ArrayGeometry, ArrayKind};
use crate::{sinc, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Ms,
    Correlator,
    CorrelatorTopK,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    /// Selected signed antenna index per carrier (MS only; empty otherwise).
    pub selected: Vec<i32>,
    /// Per-carrier sine estimates (MS only; empty otherwise).
    pub per_freq_sine: Vec<f64>,
    pub fused_sine: f64,
    pub theta_hat: f64,
    pub kind: EstimatorKind,
}

fn check_field(field: &ReceivedField, geometry: &ArrayGeometry, grid: &CarrierGrid) -> Result<()> {
    if field.n_elements() != geometry.len() {
        return Err(Error::DimensionMismatch {
            what: "field rows vs elements",
            expected: geometry.len(),
            got: field.n_elements(),
        });
    }
    if field.n_carriers() != grid.len() {
        return Err(Error::DimensionMismatch {
            what: "field columns vs carriers",
            expected: grid.len(),
            got: field.n_carriers(),
        });
    }
    Ok(())
}

fn signed(pos: usize, n_elements: usize) -> i32 {
    pos as i32 - (n_elements / 2) as i32
}

/// Argmax of `|r[n, m]|^2` over `n` for every `m`. Ties go to the smaller
/// `|n|`, then the smaller `n`.
pub fn ms_select(field: &ReceivedField) -> Vec<i32> {
    let n = field.n_elements();
    (0..field.n_carriers())
        .map(|m| {
            let mut best = 0usize;
            let mut best_p = f64::NEG_INFINITY;
            for pos in 0..n {
                let p = field.get(pos, m).norm_sqr();
                let (a, b) = (signed(pos, n), signed(best, n));
                if p > best_p || (p == best_p && (a.abs(), a) < (b.abs(), b)) {
                    best = pos;
                    best_p = p;
                }
            }
            signed(best, n)
        })
        .collect()
}

/// Sine estimate of carrier `m` from selected antenna `n_star`.
///
/// Uniform layouts use `(f_m / f_c) Omega_n`. Geometric layouts rebuild the
/// element from its partial sum, `rho_m a (r^|n| - 1) / (r - 1)` with
/// `rho_m = f_m / (f_c (1 + eta / 2))`, which is the same number.
pub fn ms_angle_per_freq(n_star: i32, m: usize, geometry: &ArrayGeometry, grid: &CarrierGrid) -> Result<f64> {
    if m >= grid.len() {
        return Err(Error::invalid("m", format!("carrier {m} out of range")));
    }
    let omega = geometry
        .omega_at(n_star)
        .ok_or_else(|| Error::invalid("n_star", format!("element {n_star} out of range")))?;
    let f_m = grid.freqs[m];
    let f_c = geometry.lens.center_freq_hz;
    Ok(match geometry.kind {
        ArrayKind::Uniform => f_m / f_c * omega,
        ArrayKind::GeometricRaa {
            first_term: a,
            common_ratio: r,
            eta,
            ..
        } => {
            let rho = f_m / (f_c * (1.0 + eta / 2.0));
            let k = n_star.unsigned_abs() as i32;
            f64::from(n_star.signum()) * rho * a * (r.powi(k) - 1.0) / (r - 1.0)
        }
    })
}

/// Arithmetic mean in the sine domain and its arcsine (clamped to `[-1, 1]`).
pub fn ms_fuse(per_freq_sine: &[f64]) -> Result<(f64, f64)> {
    if per_freq_sine.is_empty() {
        return Err(Error::invalid("per_freq_sine", "need at least one carrier"));
    }
    let mean = per_freq_sine.iter().sum::<f64>() / per_freq_sine.len() as f64;
    Ok((mean, mean.clamp(-1.0, 1.0).asin()))
}

/// Fused sine divided by `1 + v_R / c`, removing the mean Doppler stretch.
pub fn doppler_corrected_fuse(per_freq_sine: &[f64], v_rel: f64) -> Result<f64> {
    let (s, _) = ms_fuse(per_freq_sine)?;
    Ok(s / (1.0 + v_rel / SPEED_OF_LIGHT))
}

/// Multiplication counter for the MS pipeline.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct MulCounter {
    pub count: u64,
}

impl MulCounter {
    #[inline]
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        self.count += 1;
        a * b
    }
}

/// Full MS pipeline. With a counter attached, the tally is one product per
/// power `|r|^2`, one per carrier scaling and one for the averaging.
pub fn ms_estimate_counted(
    field: &ReceivedField,
    geometry: &ArrayGeometry,
    grid: &CarrierGrid,
    counter: &mut MulCounter,
) -> Result<EstimationResult> {
    check_field(field, geometry, grid)?;
    let n = field.n_elements();
    let f_c = geometry.lens.center_freq_hz;
    let mut selected = Vec::with_capacity(grid.len());
    let mut per_freq = Vec::with_capacity(grid.len());
    let mut sum = 0.0;
    for m in 0..grid.len() {
        let mut best = 0usize;
        let mut best_p = f64::NEG_INFINITY;
        for pos in 0..n {
            let v = field.get(pos, m);
            // |r|^2 as the product r * conj(r)
            let p = counter.mul(v.re, v.re) + v.im * v.im;
            let (a, b) = (signed(pos, n), signed(best, n));
            if p > best_p || (p == best_p && (a.abs(), a) < (b.abs(), b)) {
                best = pos;
                best_p = p;
            }
        }
        let s = counter.mul(grid.freqs[m] / f_c, geometry.omega[best]);
        selected.push(signed(best, n));
        per_freq.push(s);
        sum += s;
    }
    let fused = counter.mul(sum, 1.0 / grid.len() as f64);
    Ok(EstimationResult {
        selected,
        per_freq_sine: per_freq,
        fused_sine: fused,
        theta_hat: fused.clamp(-1.0, 1.0).asin(),
        kind: EstimatorKind::Ms,
    })
}

pub fn ms_estimate(field: &ReceivedField, geometry: &ArrayGeometry, grid: &CarrierGrid) -> Result<EstimationResult> {
    ms_estimate_counted(field, geometry, grid, &mut MulCounter::default())
}

/// Precomputed real steering vectors over a uniform angle grid on
/// `[-pi/2, pi/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    pub angles: Vec<f64>,
    n_elements: usize,
    n_carriers: usize,
    /// Indexed `[(i * M + m) * N + n]`.
    steering: Vec<f64>,
    /// `||a_m(theta_i)||^2`, indexed `[i * M + m]`.
    norms_sq: Vec<f64>,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn vector(&self, i: usize, m: usize) -> &[f64] {
        let start = (i * self.n_carriers + m) * self.n_elements;
        &self.steering[start..start + self.n_elements]
    }

    pub fn norm_sq(&self, i: usize, m: usize) -> f64 {
        self.norms_sq[i * self.n_carriers + m]
    }
}

pub const DEFAULT_DICTIONARY_SIZE: usize = 1801;

/// `a_n(theta_i; m) = sinc((D / lambda_m)(sin(theta_i) - (f_m / f_c) Omega_n))`.
pub fn build_dictionary(geometry: &ArrayGeometry, grid: &CarrierGrid, d_dic: usize) -> Result<Dictionary> {
    if d_dic < 2 {
        return Err(Error::invalid("d_dic", "need at least 2 entries"));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let angles: Vec<f64> = (0..d_dic)
        .map(|i| -half_pi + std::f64::consts::PI * i as f64 / (d_dic - 1) as f64)
        .collect();
    let n = geometry.len();
    let m_count = grid.len();
    let f_c = geometry.lens.center_freq_hz;
    let mut steering = Vec::with_capacity(d_dic * m_count * n);
    let mut norms_sq = Vec::with_capacity(d_dic * m_count);
    for &t in &angles {
        let s = t.sin();
        for &f_m in &grid.freqs {
            let scale = geometry.lens.aperture_in_wavelengths(f_m);
            let mut norm = 0.0;
            for &w in &geometry.omega {
                let a = sinc(scale * (s - f_m / f_c * w));
                norm += a * a;
                steering.push(a);
            }
            norms_sq.push(norm);
        }
    }
    Ok(Dictionary {
        angles,
        n_elements: n,
        n_carriers: m_count,
        steering,
        norms_sq,
    })
}

/// `sum_m |a_m^T r_m|^2 / ||a_m||^2` for dictionary entry `i`. With a mask
/// the inner product only runs over the flagged antennas while the
/// normalization keeps the full pattern energy; normalizing by the masked
/// energy would make a single-antenna likelihood flat in `theta`.
fn likelihood(field: &ReceivedField, dict: &Dictionary, i: usize, mask: Option<&[bool]>) -> f64 {
    let mut total = 0.0;
    for m in 0..dict.n_carriers {
        let a = dict.vector(i, m);
        let mut re = 0.0;
        let mut im = 0.0;
        for (pos, &w) in a.iter().enumerate() {
            if mask.is_some_and(|k| !k[pos]) {
                continue;
            }
            let r = field.get(pos, m);
            re += w * r.re;
            im += w * r.im;
        }
        let norm = dict.norm_sq(i, m);
        if norm > 0.0 {
            total += (re * re + im * im) / norm;
        }
    }
    total
}

fn check_dict(field: &ReceivedField, dict: &Dictionary) -> Result<()> {
    if field.n_elements() != dict.n_elements || field.n_carriers() != dict.n_carriers {
        return Err(Error::DimensionMismatch {
            what: "field vs dictionary shape",
            expected: dict.n_elements * dict.n_carriers,
            got: field.n_elements() * field.n_carriers(),
        });
    }
    Ok(())
}

fn scan(field: &ReceivedField, dict: &Dictionary, mask: Option<&[bool]>, kind: EstimatorKind) -> EstimationResult {
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..dict.len() {
        let v = likelihood(field, dict, i, mask);
        if v > best_v || (v == best_v && dict.angles[i].abs() < dict.angles[best].abs()) {
            best = i;
            best_v = v;
        }
    }
    let theta = dict.angles[best];
    EstimationResult {
        selected: Vec::new(),
        per_freq_sine: Vec::new(),
        fused_sine: theta.sin(),
        theta_hat: theta,
        kind,
    }
}

/// Dictionary angle maximizing the correlation likelihood; ties go to the
/// smaller `|theta|`.
pub fn correlator_estimate(field: &ReceivedField, dict: &Dictionary) -> Result<EstimationResult> {
    check_dict(field, dict)?;
    Ok(scan(field, dict, None, EstimatorKind::Correlator))
}

/// Positions of the `k` antennas with the largest `sum_m |r[n, m]|^2`
/// (ties to the lower position), in ascending position order.
pub fn topk_antennas(field: &ReceivedField, k: usize) -> Result<Vec<usize>> {
    let n = field.n_elements();
    if k == 0 || k > n {
        return Err(Error::invalid("k", format!("must lie in [1, {n}], got {k}")));
    }
    let energy: Vec<f64> = (0..n)
        .map(|pos| (0..field.n_carriers()).map(|m| field.get(pos, m).norm_sqr()).sum())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| energy[b].total_cmp(&energy[a]).then(a.cmp(&b)));
    let mut chosen = order[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Correlator over the `k` strongest antennas only.
pub fn correlator_topk(field: &ReceivedField, dict: &Dictionary, k: usize) -> Result<EstimationResult> {
    check_dict(field, dict)?;
    let chosen = topk_antennas(field, k)?;
    if k == field.n_elements() {
        let mut r = scan(field, dict, None, EstimatorKind::CorrelatorTopK);
        r.kind = EstimatorKind::CorrelatorTopK;
        return Ok(r);
    }
    let mut mask = vec![false; field.n_elements()];
    chosen.iter().for_each(|&p| mask[p] = true);
    Ok(scan(field, dict, Some(&mask), EstimatorKind::CorrelatorTopK))
}
