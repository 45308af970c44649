//! Self-check suite run by the `validate` subcommand.

use rand::Rng;
use std::fmt;

use crate::analysis::{complexity_report, power_report, PowerConstants};
use crate::channel::{draw_cluster, synthesize_rx};
use crate::error::Result;
use crate::estimators::{ms_estimate_counted, MulCounter};
use crate::harness::config::{snr_to_n0, ArrayChoice, SimConfig};
use crate::lens::{aperture_integral_converged, rx_multicarrier, CarrierGrid, LensSpec};
use crate::placement::{coverage_sum, coverage_sweep, solve_common_ratio, ArrayKind};
use crate::rng::{domain, SeedTree};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check { name, passed, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<12} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Number of random `(theta, element, carrier)` tuples in the oracle check.
pub const ORACLE_TUPLES: usize = 200;

/// Largest relative error between the closed-form and the aperture-integral
/// magnitudes over random tuples with `|theta| <= 60 deg` and
/// `N in {15, 21, 33}`. Near sinc nulls the error is taken relative to
/// `1e-6`.
pub fn oracle_max_rel_error(grid: &CarrierGrid, tuples: usize, seed: u64) -> Result<f64> {
    let mut rng = SeedTree::new(seed).stream(domain::ORACLE, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..tuples {
        let n_el = [15usize, 21, 33][rng.random_range(0..3)];
        let lens = LensSpec::for_elements(n_el, grid.center_hz)?;
        let half = (n_el / 2) as i32;
        let n = rng.random_range(-half..=half);
        let m = rng.random_range(0..grid.len());
        let theta = rng.random_range(-60f64..=60.0).to_radians();
        let s = n as f64 / n_el as f64;
        let closed = rx_multicarrier(theta, s, m, &lens, grid)?.norm();
        let (oracle, _) = aperture_integral_converged(theta, s, m, &lens, grid)?;
        worst = worst.max((closed - oracle.norm()).abs() / closed.max(1e-6));
    }
    Ok(worst)
}

pub fn validate(cfg: &SimConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let n = cfg.array.elements;
    let mut report = ValidationReport::default();

    report.push(
        "oracle",
        oracle_max_rel_error(&grid, ORACLE_TUPLES, cfg.seed)
            .map(|e| (e < 1e-2, format!("max relative error {e:.3e} over {ORACLE_TUPLES} tuples (limit 1e-2)"))),
    );

    let eta = cfg.eta();
    report.push(
        "solver",
        solve_common_ratio(n, eta, 1e-12).map(|r| {
            let res = (coverage_sum(r, n, eta) - 1.0).abs();
            (res < 1e-9, format!("N={n} eta={eta:.6} r={r:.6} residual {res:.2e}"))
        }),
    );

    report.push(
        "complexity",
        (|| {
            let geometry = cfg.geometry(cfg.array.kinds[0])?;
            let seeds = SeedTree::new(cfg.seed);
            let params = cfg.channel_params(0.3, snr_to_n0(10.0));
            let cluster = draw_cluster(&params, &grid, &mut seeds.stream(domain::CLUSTER, 0))?;
            let field = synthesize_rx(&cluster, &geometry, &grid, &params, &mut seeds.stream(domain::NOISE, 0))?;
            let mut counter = MulCounter::default();
            ms_estimate_counted(&field, &geometry, &grid, &mut counter)?;
            let (t_ms, _) = complexity_report(grid.len(), n, 1);
            Ok((counter.count == t_ms, format!("counted {} vs MN+M+1 = {t_ms}", counter.count)))
        })(),
    );

    report.push("power", {
        let (p_ms, p_conv) = power_report(32, &PowerConstants::default());
        Ok((
            p_ms == 1290.0 && p_conv == 2400.0,
            format!("N=32: P_MS {p_ms} mW, P_Conv {p_conv} mW"),
        ))
    });

    report.push(
        "coverage",
        (|| {
            let raa = cfg.geometry(ArrayChoice::Raa)?;
            let uniform = cfg.geometry(ArrayChoice::Uniform)?;
            let ArrayKind::GeometricRaa { common_ratio: r, .. } = raa.kind else {
                unreachable!("raa geometry");
            };
            let band = grid.fractional_bandwidth();
            let cov = coverage_sum(r, n, band);
            let span = 70f64.to_radians();
            let d_raa = coverage_sweep(&raa, &grid, span, 1401);
            let d_uni = coverage_sweep(&uniform, &grid, span, 1401);
            let ok = (cov - 1.0).abs() < 1e-6 && d_raa < d_uni;
            Ok((
                ok,
                format!(
                    "coverage at BW/f_c={band:.6}: {cov:.9} (target 1 +- 1e-6); worst sample distance over 0..70 deg raa {d_raa:.4} vs uniform {d_uni:.4}"
                ),
            ))
        })(),
    );

    Ok(report)
}
