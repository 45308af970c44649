//! Monte Carlo sweeps.
//!
//! Trial `t` always uses the angle, cluster and noise streams with index `t`,
//! so every SNR point, array layout and estimator sees the same clusters
//! and the same unit-variance noise (scaled to the point's `N0`). Trials run
//! in parallel; results are gathered in trial order and reduced on one
//! thread, so output does not depend on the worker count.

use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{avg_power_approx_at, mse_lower_bound, outage_empirical, outage_integral, selected_power};
use crate::channel::{add_noise, draw_cluster, entry_noise_variance, synthesize_noiseless, ReceivedField};
use crate::error::{Error, Result};
use crate::estimators::{
    build_dictionary, correlator_estimate, correlator_topk, ms_estimate, Dictionary, EstimationResult,
};
use crate::harness::config::{snr_to_n0, ArrayChoice, EstimatorChoice, SimConfig, ThetaPolicy};
use crate::lens::CarrierGrid;
use crate::placement::ArrayGeometry;
use crate::rng::{domain, SeedTree};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub snr_db: f64,
    pub theta_c: f64,
    pub array: ArrayChoice,
    pub estimator: EstimatorChoice,
    pub theta_hat: f64,
    /// `(theta_hat - theta_c)^2`, rad^2.
    pub sq_err: f64,
    /// Distinct antennas chosen across carriers (MS only, else 0).
    pub selected_count: usize,
    /// Noise-free MS-selected power of the same cluster.
    pub g_noiseless: f64,
}

struct Layout {
    choice: ArrayChoice,
    geometry: ArrayGeometry,
    dictionary: Option<Dictionary>,
}

/// Shared state of a sweep: the grid, the layouts with their dictionaries,
/// the seed tree and the worker pool.
pub struct Bench {
    pub cfg: SimConfig,
    pub grid: CarrierGrid,
    layouts: Vec<Layout>,
    seeds: SeedTree,
    pool: rayon::ThreadPool,
}

impl Bench {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let needs_dict = cfg
            .estimators
            .list
            .iter()
            .any(|e| *e != EstimatorChoice::Ms);
        let layouts = cfg
            .array
            .kinds
            .iter()
            .map(|&choice| {
                let geometry = cfg.geometry(choice)?;
                let dictionary = if needs_dict {
                    Some(build_dictionary(&geometry, &grid, cfg.estimators.d_dic)?)
                } else {
                    None
                };
                Ok(Layout {
                    choice,
                    geometry,
                    dictionary,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Self {
            cfg: cfg.clone(),
            grid,
            layouts,
            seeds: SeedTree::new(cfg.seed),
            pool,
        })
    }

    pub fn geometry(&self, choice: ArrayChoice) -> Option<&ArrayGeometry> {
        self.layouts.iter().find(|l| l.choice == choice).map(|l| &l.geometry)
    }

    fn draw_theta(&self, t: u64) -> f64 {
        match self.cfg.channel.theta {
            ThetaPolicy::Fixed { deg } => deg.to_radians(),
            ThetaPolicy::Uniform { min_deg, max_deg } => {
                let mut rng = self.seeds.stream(domain::ANGLE, t);
                let deg: f64 = if min_deg == max_deg {
                    min_deg
                } else {
                    rng.random_range(min_deg..=max_deg)
                };
                deg.to_radians()
            }
        }
    }

    fn estimate(&self, layout: &Layout, field: &ReceivedField, est: EstimatorChoice) -> Result<EstimationResult> {
        match est {
            EstimatorChoice::Ms => ms_estimate(field, &layout.geometry, &self.grid),
            EstimatorChoice::Correlator => correlator_estimate(field, layout.dictionary.as_ref().unwrap()),
            EstimatorChoice::CorrelatorTopk => {
                correlator_topk(field, layout.dictionary.as_ref().unwrap(), self.cfg.estimators.topk)
            }
        }
    }

    /// One trial at central angle `theta_c` for every SNR, layout and
    /// estimator.
    pub fn run_trial(&self, t: u64, theta_c: f64, snrs: &[f64]) -> Result<Vec<TrialOutcome>> {
        let params = self.cfg.channel_params(theta_c, 0.0);
        let cluster = draw_cluster(&params, &self.grid, &mut self.seeds.stream(domain::CLUSTER, t))?;
        let n = self.cfg.array.elements;
        let mut unit = ReceivedField::zeros(n, self.grid.len());
        add_noise(&mut unit, 1.0, &mut self.seeds.stream(domain::NOISE, t))?;

        let mut out = Vec::new();
        for layout in &self.layouts {
            let clean = synthesize_noiseless(&cluster, &layout.geometry, &self.grid)?;
            let g = selected_power(&clean, &layout.geometry);
            for &snr in snrs {
                let sigma = entry_noise_variance(snr_to_n0(snr), n).sqrt();
                let data = clean
                    .as_slice()
                    .iter()
                    .zip(unit.as_slice())
                    .map(|(c, w)| c + w * sigma)
                    .collect();
                let field = ReceivedField::from_vec(n, self.grid.len(), data)?;
                for &est in &self.cfg.estimators.list {
                    let r = self.estimate(layout, &field, est)?;
                    let mut distinct = r.selected.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    out.push(TrialOutcome {
                        trial: t,
                        snr_db: snr,
                        theta_c,
                        array: layout.choice,
                        estimator: est,
                        theta_hat: r.theta_hat,
                        sq_err: (r.theta_hat - theta_c).powi(2),
                        selected_count: distinct.len(),
                        g_noiseless: g,
                    });
                }
            }
        }
        Ok(out)
    }

    /// All trials, with the central angle drawn by the configured policy
    /// (or pinned to `theta_c` when given). Results are in trial order.
    pub fn run_trials(&self, snrs: &[f64], theta_c: Option<f64>) -> Result<Vec<TrialOutcome>> {
        let trials = self.cfg.trials as u64;
        let per_trial: Vec<Result<Vec<TrialOutcome>>> = self.pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let theta = theta_c.unwrap_or_else(|| self.draw_theta(t));
                    self.run_trial(t, theta, snrs)
                })
                .collect()
        });
        let mut out = Vec::new();
        for r in per_trial {
            out.extend(r?);
        }
        Ok(out)
    }

    fn keys(&self) -> Vec<(ArrayChoice, EstimatorChoice)> {
        let mut keys = Vec::new();
        for l in &self.layouts {
            for &e in &self.cfg.estimators.list {
                keys.push((l.choice, e));
            }
        }
        keys
    }

    pub fn estimator_label(&self, e: EstimatorChoice) -> String {
        match e {
            EstimatorChoice::Ms => "ms".into(),
            EstimatorChoice::Correlator => "corr".into(),
            EstimatorChoice::CorrelatorTopk => format!("corr-top{}", self.cfg.estimators.topk),
        }
    }
}

/// Aggregate of one (SNR or angle, layout, estimator) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// SNR in dB (SNR sweeps) or central angle in degrees (angle profile).
    pub abscissa: f64,
    pub array: ArrayChoice,
    pub estimator: EstimatorChoice,
    pub label: String,
    pub mse: f64,
    pub p_req: f64,
    pub mean_subset: f64,
    pub mean_g: f64,
    pub trials: usize,
}

fn aggregate<'a>(
    bench: &Bench,
    abscissa: f64,
    key: (ArrayChoice, EstimatorChoice),
    outcomes: impl Iterator<Item = &'a TrialOutcome>,
) -> Result<SweepPoint> {
    let mut errs = Vec::new();
    let mut subset = 0.0;
    let mut g = 0.0;
    for o in outcomes.filter(|o| (o.array, o.estimator) == key) {
        errs.push(o.sq_err);
        subset += o.selected_count as f64;
        g += o.g_noiseless;
    }
    let k = errs.len();
    if k == 0 {
        return Err(Error::Config("sweep produced no trials".into()));
    }
    Ok(SweepPoint {
        abscissa,
        array: key.0,
        estimator: key.1,
        label: bench.estimator_label(key.1),
        mse: errs.iter().sum::<f64>() / k as f64,
        p_req: outcome_rate(&errs, bench.cfg.analysis.gamma_req)?,
        mean_subset: subset / k as f64,
        mean_g: g / k as f64,
        trials: k,
    })
}

fn outcome_rate(errs: &[f64], gamma_req: f64) -> Result<f64> {
    outage_empirical(errs, gamma_req)
}

/// MSE and outage per SNR of `cfg.sweep.snr_db`.
pub fn run_snr_sweep(cfg: &SimConfig) -> Result<Vec<SweepPoint>> {
    let bench = Bench::new(cfg)?;
    snr_sweep_with(&bench)
}

pub fn snr_sweep_with(bench: &Bench) -> Result<Vec<SweepPoint>> {
    let snrs = &bench.cfg.sweep.snr_db;
    let outcomes = bench.run_trials(snrs, None)?;
    let mut points = Vec::new();
    for &snr in snrs {
        for key in bench.keys() {
            let at = outcomes.iter().filter(|o| o.snr_db == snr);
            points.push(aggregate(bench, snr, key, at)?);
        }
    }
    Ok(points)
}

/// MSE and outage per central angle of `cfg.sweep.theta_deg`, at
/// `cfg.sweep.profile_snr_db`.
pub fn run_angle_profile(cfg: &SimConfig) -> Result<Vec<SweepPoint>> {
    let bench = Bench::new(cfg)?;
    let snr = [cfg.sweep.profile_snr_db];
    let mut points = Vec::new();
    for &deg in &cfg.sweep.theta_deg {
        let outcomes = bench.run_trials(&snr, Some(deg.to_radians()))?;
        for key in bench.keys() {
            points.push(aggregate(&bench, deg, key, outcomes.iter())?);
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    pub theta_deg: f64,
    pub array: ArrayChoice,
    /// Monte Carlo MS-selected power, normalized to its maximum over angle.
    pub g_mc: f64,
    /// Gap-based approximation, normalized likewise.
    pub g_approx: f64,
    /// Monte Carlo power with both velocities set to zero, normalized likewise.
    pub g_mc_static: f64,
}

/// Raw (unnormalized) Monte Carlo and approximate power at one angle.
pub fn power_at(bench: &Bench, choice: ArrayChoice, theta_c: f64, doppler: bool) -> Result<(f64, f64)> {
    let geometry = bench
        .geometry(choice)
        .ok_or_else(|| Error::Config(format!("array {:?} not configured", choice)))?;
    let mut params = bench.cfg.channel_params(theta_c, 0.0);
    if !doppler {
        params.v_rx = 0.0;
        params.v_sc = 0.0;
    }
    let trials = bench.cfg.trials as u64;
    let powers: Vec<Result<f64>> = bench.pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let c = draw_cluster(&params, &bench.grid, &mut bench.seeds.stream(domain::CLUSTER, t))?;
                Ok(selected_power(&synthesize_noiseless(&c, geometry, &bench.grid)?, geometry))
            })
            .collect()
    });
    let mut total = 0.0;
    for p in powers {
        total += p?;
    }
    let approx = avg_power_approx_at(geometry, &bench.grid, theta_c)?;
    Ok((total / trials as f64, approx))
}

/// Normalized average received power over `cfg.sweep.theta_deg` for every
/// configured layout.
pub fn run_power_profile(cfg: &SimConfig) -> Result<Vec<PowerPoint>> {
    let bench = Bench::new(cfg)?;
    let mut points = Vec::new();
    for &choice in &cfg.array.kinds {
        let mut raw = Vec::new();
        for &deg in &cfg.sweep.theta_deg {
            let (mc, approx) = power_at(&bench, choice, deg.to_radians(), true)?;
            let (still, _) = power_at(&bench, choice, deg.to_radians(), false)?;
            raw.push((deg, mc, approx, still));
        }
        let max = |f: fn(&(f64, f64, f64, f64)) -> f64| raw.iter().map(f).fold(f64::MIN_POSITIVE, f64::max);
        let (m1, m2, m3) = (max(|r| r.1), max(|r| r.2), max(|r| r.3));
        points.extend(raw.iter().map(|&(deg, mc, approx, still)| PowerPoint {
            theta_deg: deg,
            array: choice,
            g_mc: mc / m1,
            g_approx: approx / m2,
            g_mc_static: still / m3,
        }));
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundPoint {
    pub snr_db: f64,
    pub array: ArrayChoice,
    /// Empirical MS mean squared error.
    pub mse: f64,
    pub mse_lb: f64,
    /// Analytic outage at `analysis.gamma_th`.
    pub p_out: f64,
    pub mean_g: f64,
    pub mean_subset: f64,
}

/// MSE lower bound with measured inputs (mean distinct-antenna count under
/// noise, mean noise-free selected power) next to the empirical MS MSE, and
/// the analytic outage, per SNR.
pub fn run_bounds(cfg: &SimConfig) -> Result<Vec<BoundPoint>> {
    let mut cfg = cfg.clone();
    cfg.estimators.list = vec![EstimatorChoice::Ms];
    let bench = Bench::new(&cfg)?;
    let points = snr_sweep_with(&bench)?;
    points
        .into_iter()
        .map(|p| {
            let geometry = bench.geometry(p.array).unwrap();
            let n0 = snr_to_n0(p.abscissa);
            Ok(BoundPoint {
                snr_db: p.abscissa,
                array: p.array,
                mse: p.mse,
                mse_lb: mse_lower_bound(bench.grid.len(), p.mean_subset, geometry.len(), n0, p.mean_g)?,
                p_out: outage_integral(geometry, &bench.grid, cfg.analysis.gamma_th, n0, cfg.analysis.quad_points)?,
                mean_g: p.mean_g,
                mean_subset: p.mean_subset,
            })
        })
        .collect()
}
