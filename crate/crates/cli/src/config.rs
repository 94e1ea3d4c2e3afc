//! JSON run configuration. Powers enter in dBm, the SIR threshold and
//! K-factor in dB, distances in meters, densities per m^2; everything is
//! converted to the linear units the library computes in.

use std::str::FromStr;

use anyhow::{bail, Context};
use serde::Deserialize;

use mobicell::channel::dbm_to_linear;
use mobicell::geometry::Window;
use mobicell::montecarlo::{ExperimentConfig, SweepAxis, Target};
use mobicell::params::SystemParams;

fn default_trials() -> usize {
    10_000
}
fn default_window() -> (f64, f64) {
    (40.0, 40.0)
}
fn default_alpha_i() -> f64 {
    4.0
}
fn default_alpha_o() -> f64 {
    3.5
}
fn default_k_factor_db() -> f64 {
    2.0
}
fn default_r_am() -> f64 {
    5.0
}
fn default_r_av_max() -> f64 {
    8.0
}
fn default_r_u() -> f64 {
    50.0
}
fn default_r_mu() -> f64 {
    100.0
}
fn default_series_limit() -> usize {
    70
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every random quantity derives from it.
    pub base_seed: u64,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    /// Simulation window in kilometers.
    #[serde(default = "default_window")]
    pub window_km: (f64, f64),
    pub params: ParamsConfig,
    /// Quantities to evaluate: p_bh, p_dl, p_al, t_bh, t_dl, t_al.
    pub targets: Vec<String>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub power_control: Option<PowerControlConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub p_m_dbm: f64,
    pub p_s_dbm: f64,
    pub p_a_dbm: f64,
    pub lambda_m: f64,
    pub lambda_s: f64,
    #[serde(default = "default_alpha_i")]
    pub alpha_i: f64,
    #[serde(default = "default_alpha_o")]
    pub alpha_o: f64,
    pub epsilon: f64,
    pub gamma: f64,
    /// Small-cell activity indicator, 0 or 1.
    pub kappa: u8,
    pub theta_db: f64,
    #[serde(default = "default_k_factor_db")]
    pub k_factor_db: f64,
    #[serde(default = "default_r_am")]
    pub r_am: f64,
    #[serde(default = "default_r_av_max")]
    pub r_av_max: f64,
    #[serde(default = "default_r_u")]
    pub r_u: f64,
    #[serde(default = "default_r_mu")]
    pub r_mu: f64,
    #[serde(default = "default_series_limit")]
    pub j_max: usize,
    #[serde(default = "default_series_limit")]
    pub q_max: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Axis name in config units: theta_db, epsilon, gamma, r_mu, r_u,
    /// r_am, r_av_max, lambda_m, lambda_s, p_m_dbm, p_s_dbm, p_a_dbm,
    /// k_factor_db.
    pub axis: String,
    pub grid: Vec<f64>,
    /// Optional second dimension drawn as separate curves; accepts the
    /// same names plus `kappa`.
    #[serde(default)]
    pub series_axis: Option<String>,
    #[serde(default)]
    pub series_values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerControlConfig {
    /// AL success-probability targets in (0, 1).
    pub targets: Vec<f64>,
}

impl ParamsConfig {
    pub fn to_params(&self) -> anyhow::Result<SystemParams<f64>> {
        if self.kappa > 1 {
            bail!("invalid config field `kappa`: must be 0 or 1");
        }
        let p = SystemParams {
            p_m: dbm_to_linear(self.p_m_dbm),
            p_s: dbm_to_linear(self.p_s_dbm),
            p_a: dbm_to_linear(self.p_a_dbm),
            lambda_m: self.lambda_m,
            lambda_s: self.lambda_s,
            alpha_i: self.alpha_i,
            alpha_o: self.alpha_o,
            epsilon: self.epsilon,
            gamma: self.gamma,
            kappa: self.kappa == 1,
            theta: 10f64.powf(self.theta_db / 10.0),
            k_factor: 10f64.powf(self.k_factor_db / 10.0),
            r_am: self.r_am,
            r_av_max: self.r_av_max,
            r_u: self.r_u,
            r_mu: self.r_mu,
            j_max: self.j_max,
            q_max: self.q_max,
        };
        p.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(p)
    }
}

impl RunConfig {
    pub fn to_experiment(&self) -> anyhow::Result<ExperimentConfig<f64>> {
        if self.n_trials == 0 {
            bail!("invalid config field `n_trials`: must be >= 1");
        }
        if self.targets.is_empty() {
            bail!("invalid config field `targets`: at least one required");
        }
        let targets = self
            .targets
            .iter()
            .map(|t| Target::from_str(t).map_err(|e| anyhow::anyhow!("{e}")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        let window = Window::from_km(self.window_km.0, self.window_km.1)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let mut config = ExperimentConfig::new(self.params.to_params()?, self.base_seed, &targets)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        config.n_trials = self.n_trials;
        config.window = window;
        Ok(config)
    }
}

/// A sweepable dimension in config units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigAxis {
    Core(SweepAxis),
    /// Small-cell activity toggle (series dimension only).
    Kappa,
}

impl ConfigAxis {
    /// Map a config-unit value onto the library's linear units.
    pub fn to_linear(self, name: &str, value: f64) -> f64 {
        match self {
            ConfigAxis::Kappa => value,
            ConfigAxis::Core(_) => {
                if name.ends_with("_db") {
                    10f64.powf(value / 10.0)
                } else if name.ends_with("_dbm") {
                    10f64.powf(value / 10.0)
                } else {
                    value
                }
            }
        }
    }
}

/// Resolve a config axis name to the library axis plus its unit rule.
pub fn parse_axis(name: &str) -> anyhow::Result<ConfigAxis> {
    let core = |a| Ok(ConfigAxis::Core(a));
    match name {
        "theta_db" => core(SweepAxis::Theta),
        "k_factor_db" => core(SweepAxis::KFactor),
        "p_m_dbm" => core(SweepAxis::PM),
        "p_s_dbm" => core(SweepAxis::PS),
        "p_a_dbm" => core(SweepAxis::PA),
        "epsilon" => core(SweepAxis::Epsilon),
        "gamma" => core(SweepAxis::Gamma),
        "r_mu" => core(SweepAxis::RMu),
        "r_u" => core(SweepAxis::RU),
        "r_am" => core(SweepAxis::RAm),
        "r_av_max" => core(SweepAxis::RAvMax),
        "lambda_m" => core(SweepAxis::LambdaM),
        "lambda_s" => core(SweepAxis::LambdaS),
        "kappa" => Ok(ConfigAxis::Kappa),
        other => bail!("unknown sweep axis `{other}`"),
    }
}

/// Parse bytes into a validated run configuration.
pub fn parse(bytes: &[u8]) -> anyhow::Result<RunConfig> {
    serde_json::from_slice::<RunConfig>(bytes).context("config does not parse")
}
