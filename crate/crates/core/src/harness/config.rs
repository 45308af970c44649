//! Experiment configuration (TOML). Every field has a default, so an empty
//! file is a valid configuration.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::lens::{CarrierGrid, LensSpec};
use crate::placement::{raa_sine_grid, uniform_sine_grid, ArrayGeometry};

const KMH: f64 = 1.0 / 3.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    /// Monte Carlo trials per sweep point.
    pub trials: usize,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub carrier: CarrierConfig,
    pub array: ArrayConfig,
    pub channel: ChannelConfig,
    pub sweep: SweepConfig,
    pub estimators: EstimatorConfig,
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarrierConfig {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub subcarriers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrayChoice {
    Uniform,
    Raa,
}

impl ArrayChoice {
    pub fn label(self) -> &'static str {
        match self {
            ArrayChoice::Uniform => "laa",
            ArrayChoice::Raa => "raa",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub elements: usize,
    pub kinds: Vec<ArrayChoice>,
    /// Squint fraction of the geometric layout; defaults to `BW / f_c`.
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase", deny_unknown_fields)]
pub enum ThetaPolicy {
    Fixed { deg: f64 },
    Uniform { min_deg: f64, max_deg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub paths: usize,
    pub c_ao_deg: f64,
    pub v_rx_kmh: f64,
    pub v_sc_kmh: f64,
    pub bernoulli_p: f64,
    pub theta: ThetaPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub snr_db: Vec<f64>,
    pub theta_deg: Vec<f64>,
    /// SNR of the angle profile.
    pub profile_snr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorChoice {
    Ms,
    Correlator,
    CorrelatorTopk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub list: Vec<EstimatorChoice>,
    pub d_dic: usize,
    pub topk: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Squared-error requirement, rad^2.
    pub gamma_req: f64,
    /// SNR threshold of the analytic outage (linear).
    pub gamma_th: f64,
    pub quad_points: usize,
    /// Array sizes listed by `power-report`.
    pub report_elements: Vec<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 2000,
            threads: 0,
            carrier: CarrierConfig::default(),
            array: ArrayConfig::default(),
            channel: ChannelConfig::default(),
            sweep: SweepConfig::default(),
            estimators: EstimatorConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

impl Default for CarrierConfig {
    fn default() -> Self {
        Self {
            center_hz: 28e9,
            bandwidth_hz: 2e9,
            subcarriers: 6,
        }
    }
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            elements: 21,
            kinds: vec![ArrayChoice::Uniform, ArrayChoice::Raa],
            eta: None,
        }
    }
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            paths: 10,
            c_ao_deg: 1.0,
            v_rx_kmh: -100.0,
            v_sc_kmh: 100.0,
            bernoulli_p: 0.5,
            theta: ThetaPolicy::Uniform {
                min_deg: -90.0,
                max_deg: 90.0,
            },
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            theta_deg: (-14..=14).map(|k| 5.0 * k as f64).collect(),
            profile_snr_db: 10.0,
        }
    }
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            list: vec![EstimatorChoice::Ms],
            d_dic: crate::estimators::DEFAULT_DICTIONARY_SIZE,
            topk: 3,
        }
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            gamma_req: crate::analysis::DEFAULT_GAMMA_REQ,
            gamma_th: 10.0,
            quad_points: 1801,
            report_elements: vec![8, 16, 21, 32, 64],
        }
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.array.kinds.is_empty() {
            return Err(Error::Config("array.kinds must not be empty".into()));
        }
        if self.estimators.list.is_empty() {
            return Err(Error::Config("estimators.list must not be empty".into()));
        }
        if self.analysis.gamma_req < 0.0 || !self.analysis.gamma_req.is_finite() {
            return Err(Error::Config("analysis.gamma_req must be a non-negative number".into()));
        }
        if let ThetaPolicy::Uniform { min_deg, max_deg } = self.channel.theta {
            if !(min_deg <= max_deg && min_deg >= -90.0 && max_deg <= 90.0) {
                return Err(Error::Config("channel.theta range must satisfy -90 <= min <= max <= 90".into()));
            }
        }
        if let ThetaPolicy::Fixed { deg } = self.channel.theta {
            if deg.abs() > 90.0 {
                return Err(Error::Config("channel.theta.deg must lie in [-90, 90]".into()));
            }
        }
        if self.sweep.theta_deg.iter().any(|t| t.abs() > 90.0) {
            return Err(Error::Config("sweep.theta_deg entries must lie in [-90, 90]".into()));
        }
        self.grid()?;
        self.lens()?;
        self.channel_params(0.0, 0.0).validate()?;
        for &kind in &self.array.kinds {
            self.geometry(kind)?;
        }
        if self.estimators.list.contains(&EstimatorChoice::CorrelatorTopk)
            && !(1..=self.array.elements).contains(&self.estimators.topk)
        {
            return Err(Error::Config("estimators.topk must lie in [1, elements]".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<CarrierGrid> {
        CarrierGrid::new(self.carrier.center_hz, self.carrier.bandwidth_hz, self.carrier.subcarriers)
    }

    pub fn lens(&self) -> Result<LensSpec> {
        LensSpec::for_elements(self.array.elements, self.carrier.center_hz)
    }

    pub fn eta(&self) -> f64 {
        self.array
            .eta
            .unwrap_or(self.carrier.bandwidth_hz / self.carrier.center_hz)
    }

    pub fn geometry(&self, kind: ArrayChoice) -> Result<ArrayGeometry> {
        let lens = self.lens()?;
        match kind {
            ArrayChoice::Uniform => uniform_sine_grid(self.array.elements, lens),
            ArrayChoice::Raa => raa_sine_grid(self.array.elements, self.eta(), lens),
        }
    }

    /// Channel parameters for a cluster at `theta_c` and total noise `n0`.
    pub fn channel_params(&self, theta_c: f64, n0: f64) -> ChannelParams {
        ChannelParams {
            theta_c,
            paths: self.channel.paths,
            c_ao: self.channel.c_ao_deg.to_radians(),
            v_rx: self.channel.v_rx_kmh * KMH,
            v_sc: self.channel.v_sc_kmh * KMH,
            bernoulli_p: self.channel.bernoulli_p,
            noise_n0: n0,
            seed: self.seed,
        }
    }
}

/// `N0 = 10^(-SNR / 10)` for unit signal power; `+inf` dB maps to 0.
pub fn snr_to_n0(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}
