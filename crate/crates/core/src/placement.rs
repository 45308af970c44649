//! Antenna placement on the focal arc, in the sine-angle domain.
//!
//! The uniform layout samples sine angles every `1/N`. The geometric
//! layout (RAA) instead grows the gaps by a common ratio `r` away from
//! boresight: outer elements squint over a wider sine range across the
//! band, so they can sit further apart without leaving holes.

use crate::error::{ensure_finite, Error, Result};
use crate::lens::{CarrierGrid, LensSpec};

/// Lower end of the common-ratio search interval.
pub const RATIO_LO: f64 = 1.0 + 1e-6;
/// Upper end of the common-ratio search interval.
pub const RATIO_HI: f64 = 10.0;
/// Absolute sine-angle tolerance of the per-element coverage predicate.
pub const COVERAGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrayKind {
    Uniform,
    GeometricRaa {
        first_term: f64,
        common_ratio: f64,
        eta: f64,
        /// Scale applied to the unit-sum partial sums, `1 / (1 + eta / 2)`.
        omega_max: f64,
    },
}

impl ArrayKind {
    pub fn label(&self) -> &'static str {
        match self {
            ArrayKind::Uniform => "laa",
            ArrayKind::GeometricRaa { .. } => "raa",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub kind: ArrayKind,
    /// Sorted element sine angles; position `i` holds signed index
    /// `i - (N - 1) / 2`.
    pub omega: Vec<f64>,
    pub lens: LensSpec,
}

impl ArrayGeometry {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// `(N - 1) / 2`.
    pub fn half(&self) -> i32 {
        (self.omega.len() / 2) as i32
    }

    pub fn signed_index(&self, pos: usize) -> i32 {
        pos as i32 - self.half()
    }

    pub fn position(&self, n: i32) -> Option<usize> {
        let pos = n + self.half();
        (pos >= 0 && (pos as usize) < self.omega.len()).then_some(pos as usize)
    }

    pub fn omega_at(&self, n: i32) -> Option<f64> {
        self.position(n).map(|p| self.omega[p])
    }

    /// Signed index of the element whose sine angle is closest to `sine`
    /// (ties to the smaller `|n|`).
    pub fn nearest(&self, sine: f64) -> i32 {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (pos, &w) in self.omega.iter().enumerate() {
            let d = (w - sine).abs();
            let better = d < best_d
                || (d == best_d && self.signed_index(pos).abs() < self.signed_index(best).abs());
            if better {
                best = pos;
                best_d = d;
            }
        }
        self.signed_index(best)
    }

    /// Physical element offsets `x_n = F tan(theta_n)` along the focal line.
    pub fn positions_m(&self) -> Vec<f64> {
        self.omega
            .iter()
            .map(|&s| self.lens.focal_m * s / (1.0 - s * s).sqrt())
            .collect()
    }
}

fn check_odd(n: usize, min: usize) -> Result<()> {
    if n < min || n % 2 == 0 {
        return Err(Error::ElementCount { got: n, min });
    }
    Ok(())
}

/// `Omega_n = n / N` for `n = -(N-1)/2 ..= (N-1)/2`.
pub fn uniform_sine_grid(n_elements: usize, lens: LensSpec) -> Result<ArrayGeometry> {
    check_odd(n_elements, 3)?;
    let half = (n_elements / 2) as i32;
    let omega = (-half..=half).map(|n| n as f64 / n_elements as f64).collect();
    Ok(ArrayGeometry {
        kind: ArrayKind::Uniform,
        omega,
        lens,
    })
}

/// Coverage of the geometric layout,
/// `(1 - eta) (r / (r - 1) - (N - 1) / (r^K - 1))` with `K = (N - 1) / 2`.
pub fn coverage_sum(r: f64, n_elements: usize, eta: f64) -> f64 {
    let k = ((n_elements - 1) / 2) as i32;
    (1.0 - eta) * (r / (r - 1.0) - (n_elements - 1) as f64 / (r.powi(k) - 1.0))
}

/// Smallest `r > 1` with `coverage_sum(r, N, eta) = 1`.
///
/// The residual tends to `-inf` as `r -> 1` and to `-eta` as `r -> inf`,
/// so the root of interest is the first upward crossing. A log-spaced scan
/// over `[RATIO_LO, RATIO_HI]` finds it and bisection refines it until
/// `|residual| < tol`.
pub fn solve_common_ratio(n_elements: usize, eta: f64, tol: f64) -> Result<f64> {
    check_odd(n_elements, 5)?;
    ensure_finite("eta", eta)?;
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::invalid("eta", format!("must lie in [0, 1), got {eta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let f = |r: f64| coverage_sum(r, n_elements, eta) - 1.0;

    const SCAN: usize = 4000;
    let span = (RATIO_HI - 1.0) / (RATIO_LO - 1.0);
    let at = |i: usize| 1.0 + (RATIO_LO - 1.0) * span.powf(i as f64 / SCAN as f64);
    let mut lo = RATIO_LO;
    let mut f_lo = f(lo);
    let mut bracket = None;
    for i in 1..=SCAN {
        let hi = at(i);
        let f_hi = f(hi);
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() != f_hi.signum() {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoRootInBracket {
        lo: RATIO_LO,
        hi: RATIO_HI,
    })?;
    let neg_at_lo = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < tol || hi - lo < f64::EPSILON * mid {
            return Ok(mid);
        }
        if (fm < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `a = (r - 1) / (r^K - 1)`, the first gap of a geometric layout whose
/// `K` gaps sum to 1.
pub fn first_term(r: f64, n_elements: usize) -> Result<f64> {
    ensure_finite("r", r)?;
    if r <= 1.0 {
        return Err(Error::invalid("r", format!("must exceed 1, got {r}")));
    }
    check_odd(n_elements, 3)?;
    let k = ((n_elements - 1) / 2) as i32;
    Ok((r - 1.0) / (r.powi(k) - 1.0))
}

/// Geometric layout for squint fraction `eta`.
///
/// Positive-side partial sums `a (r^k - 1) / (r - 1)` reach 1 at `k = K`;
/// they are scaled by `1 / (1 + eta / 2)` so the outermost element, squinted
/// to the top of a band of fractional width `eta` centred on `f_c`, lands on
/// `sin(pi/2)`.
pub fn raa_sine_grid(n_elements: usize, eta: f64, lens: LensSpec) -> Result<ArrayGeometry> {
    let r = solve_common_ratio(n_elements, eta, 1e-12)?;
    let a = first_term(r, n_elements)?;
    let omega_max = 1.0 / (1.0 + eta / 2.0);
    let k_max = (n_elements - 1) / 2;
    let positive: Vec<f64> = (0..=k_max)
        .map(|k| omega_max * a * (r.powi(k as i32) - 1.0) / (r - 1.0))
        .collect();
    let mut omega: Vec<f64> = positive.iter().skip(1).rev().map(|w| -w).collect();
    omega.extend_from_slice(&positive);
    Ok(ArrayGeometry {
        kind: ArrayKind::GeometricRaa {
            first_term: a,
            common_ratio: r,
            eta,
            omega_max,
        },
        omega,
        lens,
    })
}

/// Sine range one element sweeps across the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquintRange {
    pub low: f64,
    pub high: f64,
}

impl SquintRange {
    pub fn of(omega: f64, grid: &CarrierGrid) -> Self {
        let a = grid.f_min() / grid.center_hz * omega;
        let b = grid.f_max() / grid.center_hz * omega;
        SquintRange {
            low: a.min(b),
            high: a.max(b),
        }
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementCoverage {
    pub n: i32,
    pub omega: f64,
    /// Distance to the next element towards boresight; 0 at the centre.
    pub gap: f64,
    pub range: SquintRange,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub elements: Vec<ElementCoverage>,
    /// Conjunction over the elements with `Omega_n > 0`.
    pub all_satisfied: bool,
}

/// Per-element check that the gap towards boresight is no wider than the
/// element's own squint range.
pub fn squint_coverage_check(geometry: &ArrayGeometry, grid: &CarrierGrid) -> CoverageReport {
    let elements: Vec<ElementCoverage> = geometry
        .omega
        .iter()
        .enumerate()
        .map(|(pos, &w)| {
            let n = geometry.signed_index(pos);
            let range = SquintRange::of(w, grid);
            let gap = match n.signum() {
                1 => w - geometry.omega[pos - 1],
                -1 => geometry.omega[pos + 1] - w,
                _ => 0.0,
            };
            ElementCoverage {
                n,
                omega: w,
                gap,
                range,
                satisfied: n == 0 || gap <= range.width() + COVERAGE_TOL,
            }
        })
        .collect();
    let all_satisfied = elements.iter().filter(|e| e.omega > 0.0).all(|e| e.satisfied);
    CoverageReport {
        elements,
        all_satisfied,
    }
}

/// Distance from `sine` to the nearest squinted sample `(f_m / f_c) Omega_n`.
pub fn nearest_sample_distance(geometry: &ArrayGeometry, grid: &CarrierGrid, sine: f64) -> f64 {
    let mut best = f64::INFINITY;
    for &w in &geometry.omega {
        for &q in &grid.ratio_c {
            best = best.min((sine - q * w).abs());
        }
    }
    best
}

/// Worst case of [`nearest_sample_distance`] over `points` angles evenly
/// spread on `[0, theta_max]`.
pub fn coverage_sweep(geometry: &ArrayGeometry, grid: &CarrierGrid, theta_max: f64, points: usize) -> f64 {
    let points = points.max(2);
    (0..points)
        .map(|i| theta_max * i as f64 / (points - 1) as f64)
        .map(|t| nearest_sample_distance(geometry, grid, t.sin()))
        .fold(0.0, f64::max)
}

/// Bandwidth needed so that a cluster of angular spread `c_ao` squints over
/// at least one element gap: `(2 f_c / C_AO) sin(C_AO)`.
pub fn bandwidth_condition(c_ao: f64, f_c: f64) -> Result<f64> {
    ensure_finite("c_ao", c_ao)?;
    ensure_finite("f_c", f_c)?;
    if c_ao <= 0.0 {
        return Err(Error::invalid(
            "c_ao",
            "must be positive; use single_path_condition for a single path",
        ));
    }
    Ok(2.0 * f_c / c_ao * c_ao.sin())
}

/// `(BW / f_c) sin(theta_n) >= 1 / (2N)`.
pub fn single_path_condition(bw: f64, f_c: f64, sin_theta_n: f64, n_elements: usize) -> bool {
    bw / f_c * sin_theta_n >= 1.0 / (2.0 * n_elements as f64)
}
