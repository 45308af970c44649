//! Received-signal models of an ideal thin RF lens.
//!
//! Elements sit on the focal arc and are addressed by their sine angle.
//! For a plane wave at angle `theta` and sub-carrier `f_m` the element
//! with sine angle `s_n` sees
//!
//! ```text
//! r = sinc( (D / lambda_m) * ((f_m / f_c) * s_n - sin(theta)) )
//! ```
//!
//! up to a constant phase, which is set to zero here. The aperture
//! integral in [`aperture_integral_oracle`] evaluates the same quantity
//! from the lens phase profile and serves as an independent check.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};
use crate::{sinc, ComplexSample, SPEED_OF_LIGHT};

/// Refractive index of the lens material at the centre frequency, used by
/// the thin-lens focal-length map.
pub const DEFAULT_LENS_INDEX: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensSpec {
    /// Aperture `D`, metres.
    pub aperture_m: f64,
    /// Focal length `F`, metres.
    pub focal_m: f64,
    /// Fresnel number `K`.
    pub fresnel_k: f64,
    /// Design (centre) frequency `f_c`, Hz.
    pub center_freq_hz: f64,
}

impl LensSpec {
    pub fn new(aperture_m: f64, focal_m: f64, fresnel_k: f64, center_freq_hz: f64) -> Result<Self> {
        for (name, v) in [
            ("aperture_m", aperture_m),
            ("focal_m", focal_m),
            ("fresnel_k", fresnel_k),
            ("center_freq_hz", center_freq_hz),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            aperture_m,
            focal_m,
            fresnel_k,
            center_freq_hz,
        })
    }

    /// Default lens for an `n_elements` array: element pitch `lambda_c / 2`,
    /// `F = N lambda_c / 2` and `D = 2F`, so `D / lambda_c = N` and adjacent
    /// uniform elements are `1/N` apart in sine.
    pub fn for_elements(n_elements: usize, center_freq_hz: f64) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::invalid("n_elements", "must be positive"));
        }
        let lambda = SPEED_OF_LIGHT / center_freq_hz;
        let focal = n_elements as f64 * lambda / 2.0;
        let aperture = 2.0 * focal;
        let fresnel = (aperture / 2.0).powi(2) / (lambda * focal);
        Self::new(aperture, focal, fresnel, center_freq_hz)
    }

    pub fn center_wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_freq_hz
    }

    /// Half-wavelength element pitch at the centre frequency.
    pub fn element_spacing(&self) -> f64 {
        self.center_wavelength() / 2.0
    }

    /// `D / lambda` at frequency `freq_hz`.
    pub fn aperture_in_wavelengths(&self, freq_hz: f64) -> f64 {
        self.aperture_m * freq_hz / SPEED_OF_LIGHT
    }
}

/// Equispaced sub-carriers `f_m = f_min + m BW / (M - 1)`, `m = 0..M`, with
/// the band centred on `f_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierGrid {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub freqs: Vec<f64>,
    /// `f_m / f_max`.
    pub rho: Vec<f64>,
    /// `f_m / f_c`.
    pub ratio_c: Vec<f64>,
}

impl CarrierGrid {
    /// A single carrier (`M = 1`) sits at `f_c` and ignores the bandwidth.
    pub fn new(center_hz: f64, bandwidth_hz: f64, subcarriers: usize) -> Result<Self> {
        ensure_finite("center_hz", center_hz)?;
        ensure_finite("bandwidth_hz", bandwidth_hz)?;
        if center_hz <= 0.0 {
            return Err(Error::invalid("center_hz", "must be positive"));
        }
        if subcarriers == 0 {
            return Err(Error::invalid("subcarriers", "must be at least 1"));
        }
        if subcarriers > 1 && !(bandwidth_hz > 0.0 && bandwidth_hz < 2.0 * center_hz) {
            return Err(Error::invalid(
                "bandwidth_hz",
                format!("must lie in (0, 2 f_c) for a multi-carrier grid, got {bandwidth_hz}"),
            ));
        }
        let freqs: Vec<f64> = if subcarriers == 1 {
            vec![center_hz]
        } else {
            let f_min = center_hz - bandwidth_hz / 2.0;
            let step = bandwidth_hz / (subcarriers - 1) as f64;
            (0..subcarriers).map(|m| f_min + m as f64 * step).collect()
        };
        let f_max = *freqs.last().unwrap();
        let rho = freqs.iter().map(|f| f / f_max).collect();
        let ratio_c = freqs.iter().map(|f| f / center_hz).collect();
        Ok(Self {
            center_hz,
            bandwidth_hz: if subcarriers == 1 { 0.0 } else { bandwidth_hz },
            freqs,
            rho,
            ratio_c,
        })
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn f_min(&self) -> f64 {
        self.freqs[0]
    }

    pub fn f_max(&self) -> f64 {
        self.freqs[self.freqs.len() - 1]
    }

    /// `BW / f_c`, the fractional bandwidth.
    pub fn fractional_bandwidth(&self) -> f64 {
        self.bandwidth_hz / self.center_hz
    }

    pub fn wavelength(&self, m: usize) -> f64 {
        SPEED_OF_LIGHT / self.freqs[m]
    }
}

/// Sine angle of element `n` on the focal arc, `d n / sqrt((d n)^2 + F^2)`.
pub fn element_sine_angle(n: i32, spacing_m: f64, focal_m: f64) -> Result<f64> {
    ensure_finite("spacing_m", spacing_m)?;
    ensure_finite("focal_m", focal_m)?;
    if focal_m <= 0.0 {
        return Err(Error::invalid("focal_m", "must be positive"));
    }
    let dn = spacing_m * n as f64;
    Ok(dn / dn.hypot(focal_m))
}

/// Squinted sine angle `(f_m / f_c) sin(theta_n)`.
#[inline]
pub fn squinted_sine(f_m: f64, f_c: f64, sin_theta_n: f64) -> f64 {
    f_m / f_c * sin_theta_n
}

/// Single-carrier response of element `n` (pitch `spacing_m`) at the
/// lens design frequency.
pub fn rx_narrowband(theta: f64, n: i32, lens: &LensSpec, spacing_m: f64) -> Result<ComplexSample> {
    check_angle(theta)?;
    let s_n = element_sine_angle(n, spacing_m, lens.focal_m)?;
    let d_over_lambda = lens.aperture_in_wavelengths(lens.center_freq_hz);
    Ok(Complex64::new(sinc(d_over_lambda * (s_n - theta.sin())), 0.0))
}

/// Multi-carrier response of the element with sine angle `element_sine`
/// on sub-carrier `m`, with the intensity-loss factor taken as 1.
pub fn rx_multicarrier(
    theta: f64,
    element_sine: f64,
    m: usize,
    lens: &LensSpec,
    grid: &CarrierGrid,
) -> Result<ComplexSample> {
    check_angle(theta)?;
    if m >= grid.len() {
        return Err(Error::invalid("m", format!("carrier index {m} out of range 0..{}", grid.len())));
    }
    let f_m = grid.freqs[m];
    let arg = lens.aperture_in_wavelengths(f_m)
        * (squinted_sine(f_m, lens.center_freq_hz, element_sine) - theta.sin());
    Ok(Complex64::new(sinc(arg), 0.0))
}

fn check_angle(theta: f64) -> Result<()> {
    ensure_finite("theta", theta)?;
    if theta.abs() > PI / 2.0 + 1e-12 {
        return Err(Error::invalid("theta", format!("|theta| must not exceed pi/2, got {theta}")));
    }
    Ok(())
}

/// Thin-lens focal length at `freq_hz`: `F_f = F (n_0 - 1) / (n_f - 1)` with
/// the index scaling as `n_f = n_0 f_c / f`.
pub fn focal_length_at(lens: &LensSpec, freq_hz: f64, index_at_fc: f64) -> Result<f64> {
    ensure_finite("freq_hz", freq_hz)?;
    if !(index_at_fc > 1.0) {
        return Err(Error::invalid("index_at_fc", "must exceed 1"));
    }
    let n_f = index_at_fc * lens.center_freq_hz / freq_hz;
    if n_f <= 1.0 {
        return Err(Error::invalid("freq_hz", "index falls to 1 or below; lens no longer focuses"));
    }
    Ok(lens.focal_m * (index_at_fc - 1.0) / (n_f - 1.0))
}

/// Aperture integral of the plane wave through the lens phase profile,
/// normalized by `g D`.
///
/// Integrates `h(y) exp(-j Phi(y))` over `y in [-D/2, D/2]` with composite
/// Simpson on `steps` intervals. `Phi(y) = Phi_0 - k_m (1 + df/f_c) s_n y`
/// is the linearized lens phase for carrier `m` (`df = f_m - f_c`), and
/// `Phi_0` is the constant path-length phase of the shifted focus.
pub fn aperture_integral_oracle(
    theta: f64,
    element_sine: f64,
    m: usize,
    lens: &LensSpec,
    grid: &CarrierGrid,
    steps: usize,
) -> Result<ComplexSample> {
    check_angle(theta)?;
    if steps < 1024 {
        return Err(Error::invalid("steps", format!("need at least 1024, got {steps}")));
    }
    if m >= grid.len() {
        return Err(Error::invalid("m", format!("carrier index {m} out of range")));
    }
    if element_sine.abs() >= 1.0 {
        return Err(Error::invalid("element_sine", "must lie in (-1, 1)"));
    }
    let steps = steps + steps % 2;
    let f_m = grid.freqs[m];
    let f_c = lens.center_freq_hz;
    let k = 2.0 * PI * f_m / SPEED_OF_LIGHT;

    // constant phase of the shifted focus
    let focal_shifted = focal_length_at(lens, f_m, DEFAULT_LENS_INDEX)?;
    let cos_n = (1.0 - element_sine * element_sine).sqrt();
    let sin_shifted = (f_m / f_c * element_sine).clamp(-1.0, 1.0);
    let cos_shifted = (1.0 - sin_shifted * sin_shifted).sqrt();
    let phase0 = k
        * (2.0 * (lens.focal_m / cos_n - lens.focal_m)
            - (focal_shifted / cos_shifted - focal_shifted));

    let slope = (1.0 + (f_m - f_c) / f_c) * element_sine;
    let sin_theta = theta.sin();
    let integrand = |y: f64| {
        let incident = Complex64::from_polar(1.0, -k * y * sin_theta);
        let lens_phase = phase0 - k * slope * y;
        incident * Complex64::from_polar(1.0, -lens_phase)
    };

    let half = lens.aperture_m / 2.0;
    let h = lens.aperture_m / steps as f64;
    let mut acc = integrand(-half) + integrand(half);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += integrand(-half + i as f64 * h) * w;
        if i % 4096 == 0 && !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(Error::QuadratureDiverged { steps: i });
        }
    }
    let value = acc * (h / 3.0) / lens.aperture_m;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::QuadratureDiverged { steps });
    }
    Ok(value)
}

/// [`aperture_integral_oracle`] with the step count doubled from 1024 until
/// successive magnitudes differ by less than `1e-8`. Returns the value and
/// the step count used.
pub fn aperture_integral_converged(
    theta: f64,
    element_sine: f64,
    m: usize,
    lens: &LensSpec,
    grid: &CarrierGrid,
) -> Result<(ComplexSample, usize)> {
    const MAX_STEPS: usize = 1 << 22;
    let mut steps = 1024;
    let mut prev = aperture_integral_oracle(theta, element_sine, m, lens, grid, steps)?;
    while steps < MAX_STEPS {
        steps *= 2;
        let next = aperture_integral_oracle(theta, element_sine, m, lens, grid, steps)?;
        if (next.norm() - prev.norm()).abs() < 1e-8 {
            return Ok((next, steps));
        }
        prev = next;
    }
    Ok((prev, steps))
}

/// Focal intensity-loss factor
///
/// ```text
/// A = (F / F_d) exp(j 2 pi (F - F_d) / lambda) * int_0^1 exp(-j u z^2 / 2) dz,
/// u = 2 pi K (F - F_d) / F_d
/// ```
///
/// with the integral reduced to Fresnel `C`/`S`.
pub fn intensity_loss(focal_m: f64, focal_shifted_m: f64, fresnel_k: f64, lambda_m: f64) -> Result<ComplexSample> {
    for (name, v) in [
        ("focal_m", focal_m),
        ("focal_shifted_m", focal_shifted_m),
        ("lambda_m", lambda_m),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
        }
    }
    ensure_finite("fresnel_k", fresnel_k)?;
    let u = 2.0 * PI * fresnel_k * (focal_m - focal_shifted_m) / focal_shifted_m;
    let integral = quadratic_phase_integral(u);
    let prefactor = Complex64::from_polar(
        focal_m / focal_shifted_m,
        2.0 * PI * (focal_m - focal_shifted_m) / lambda_m,
    );
    Ok(prefactor * integral)
}

/// `int_0^1 exp(-j u z^2 / 2) dz`.
fn quadratic_phase_integral(u: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    // pi t^2 / 2 = |u| z^2 / 2  =>  t = z sqrt(|u| / pi)
    let scale = (u.abs() / PI).sqrt();
    let (c, s) = fresnel_cs(scale);
    let sign = u.signum();
    Complex64::new(c, -sign * s) / scale
}

/// Fresnel integrals `(C(x), S(x))` with `C(x) = int_0^x cos(pi t^2 / 2) dt`
/// and `S(x) = int_0^x sin(pi t^2 / 2) dt`.
///
/// Power series below `|x| = 1.5`, complex continued fraction (modified
/// Lentz) above. Both odd in `x`.
pub fn fresnel_cs(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 200;
    const XMIN: f64 = 1.5;

    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    let ax = x.abs();
    let (c, s) = if ax < FPMIN.sqrt() {
        (ax, 0.0)
    } else if ax <= XMIN {
        // alternating series; even terms feed C, odd terms feed S
        let fact = PI / 2.0 * ax * ax;
        let mut sum_c = ax;
        let mut sum_s = 0.0;
        let mut term = ax;
        let mut sign = 1.0;
        let mut n = 3.0;
        let mut odd = true;
        for k in 1..MAXIT {
            term *= fact / k as f64;
            if odd {
                sum_s += sign * term / n;
                sign = -sign;
            } else {
                sum_c += sign * term / n;
            }
            let scale = if odd { sum_s.abs() } else { sum_c.abs() };
            if term < scale * EPS {
                break;
            }
            odd = !odd;
            n += 2.0;
        }
        (sum_c, sum_s)
    } else {
        let pix2 = PI * ax * ax;
        let mut b = Complex64::new(1.0, -pix2);
        let mut cc = Complex64::new(1.0 / FPMIN, 0.0);
        let mut d = b.inv();
        let mut h = d;
        let mut n = -1.0;
        for _ in 2..MAXIT {
            n += 2.0;
            let a = -n * (n + 1.0);
            b += Complex64::new(4.0, 0.0);
            d = (d * a + b).inv();
            cc = b + cc.inv() * a;
            let del = cc * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < EPS {
                break;
            }
        }
        h *= Complex64::new(ax, -ax);
        let cs = Complex64::new(0.5, 0.5)
            * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 0.5 * pix2) * h);
        (cs.re, cs.im)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}
