//! Scenario configuration: a flat `key = value` file with comma-separated
//! lists, overridable key by key.
//!
//! ```text
//! # served users vs. user count
//! n_users = 50, 100, 150
//! n_clusters = 5
//! algorithm = cia, gwo
//! trials = 20
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::channel::{AntennaGain, ArrayGeometry, ChannelParams};
use crate::cluster::{Algorithm, AlgorithmParams};
use crate::error::{Error, Result};
use crate::power::{db_to_linear, PowerControlConfig};

/// Everything one sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// User counts, strictly increasing.
    pub n_users: Vec<usize>,
    /// Cluster (RF chain) counts, strictly increasing. The transmit array has
    /// one antenna per RF chain.
    pub n_clusters: Vec<usize>,
    /// One shared threshold, or one per user index.
    pub gamma_th_db: Vec<f64>,
    pub noise_power_w: f64,
    pub p_max_w: f64,
    pub bandwidth_hz: f64,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub seed: u64,
    /// `n_tx_antennas` and `seed` are overwritten per trial.
    pub channel: ChannelParams,
    pub params: AlgorithmParams,
    pub control: PowerControlConfig,
    /// Record wall-clock runtimes. Off by default so that raw output is
    /// byte-reproducible.
    pub timing: bool,
    /// Repetitions per point for `bench`.
    pub bench_reps: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_users: vec![150],
            n_clusters: vec![5],
            gamma_th_db: vec![10.0],
            noise_power_w: 0.01,
            p_max_w: 1.0,
            bandwidth_hz: 200e3,
            algorithms: vec![Algorithm::Cia],
            trials: 1,
            seed: 0,
            channel: ChannelParams::default(),
            params: AlgorithmParams::default(),
            control: PowerControlConfig::default(),
            timing: false,
            bench_reps: 5,
        }
    }
}

/// Every recognized key, in documentation order.
pub const KEYS: &[&str] = &[
    "n_users",
    "n_clusters",
    "gamma_th_db",
    "noise_power_w",
    "p_max_w",
    "bandwidth_hz",
    "algorithm",
    "trials",
    "seed",
    "n_scatter_clusters",
    "rays_per_cluster",
    "angular_spread",
    "carrier_normalization",
    "antenna_gain",
    "array_geometry",
    "element_spacing",
    "n_hotspots",
    "path_gain_db",
    "gwo_pop_size",
    "gwo_max_iters",
    "gwo_penalty",
    "gwo_penalty_power",
    "kuc_max_iters",
    "control_max_iters",
    "control_tol",
    "timing",
    "bench_reps",
];

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{}`", value.trim())))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| scalar(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(key, "empty list"));
    }
    Ok(items)
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(Error::config(
            key,
            format!("expected true or false, got `{other}`"),
        )),
    }
}

impl ScenarioConfig {
    /// Users packed around a few hotspots with narrow angular spread, strong
    /// enough path gain that most admitted users are noise-limited only
    /// weakly. This is the regime the preset figures and the trend checks
    /// use; the plain defaults serve very few users.
    pub fn hotspot_scenario() -> Self {
        ScenarioConfig {
            channel: ChannelParams {
                n_scatter_clusters: 1,
                rays_per_cluster: 1,
                angular_spread: 3e-3,
                n_hotspots: 30,
                path_gain_db: 70.0,
                ..ChannelParams::default()
            },
            ..ScenarioConfig::default()
        }
    }

    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ScenarioConfig::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", no + 1), "expected `key = value`"))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Sets one key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let ch = &mut self.channel;
        match key {
            "n_users" => self.n_users = list(key, value)?,
            "n_clusters" | "n_rf_chains" => self.n_clusters = list(key, value)?,
            "gamma_th_db" => self.gamma_th_db = list(key, value)?,
            "noise_power_w" => self.noise_power_w = scalar(key, value)?,
            "p_max_w" => self.p_max_w = scalar(key, value)?,
            "bandwidth_hz" => self.bandwidth_hz = scalar(key, value)?,
            "algorithm" => self.algorithms = list(key, value)?,
            "trials" => self.trials = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "n_scatter_clusters" => ch.n_scatter_clusters = scalar(key, value)?,
            "rays_per_cluster" => ch.rays_per_cluster = scalar(key, value)?,
            "angular_spread" => ch.angular_spread = scalar(key, value)?,
            "carrier_normalization" => {
                ch.carrier_normalization = match value.trim() {
                    "auto" => None,
                    v => Some(scalar(key, v)?),
                }
            }
            "antenna_gain" => {
                ch.antenna_gain = match value.trim() {
                    "unit" => AntennaGain::Unit,
                    "sectorized" => AntennaGain::Sectorized,
                    other => {
                        return Err(Error::config(
                            key,
                            format!("expected unit or sectorized, got `{other}`"),
                        ))
                    }
                }
            }
            "array_geometry" => {
                let spacing = ch.geometry.spacing();
                ch.geometry = match value.trim() {
                    "ula" => ArrayGeometry::UniformLinear { spacing },
                    "upa" => ArrayGeometry::UniformPlanar { spacing },
                    other => return Err(Error::config(key, format!("expected ula or upa, got `{other}`"))),
                }
            }
            "element_spacing" => {
                let spacing = scalar(key, value)?;
                ch.geometry = match ch.geometry {
                    ArrayGeometry::UniformLinear { .. } => ArrayGeometry::UniformLinear { spacing },
                    ArrayGeometry::UniformPlanar { .. } => ArrayGeometry::UniformPlanar { spacing },
                }
            }
            "n_hotspots" => ch.n_hotspots = scalar(key, value)?,
            "path_gain_db" => ch.path_gain_db = scalar(key, value)?,
            "gwo_pop_size" => self.params.gwo.pop_size = scalar(key, value)?,
            "gwo_max_iters" => self.params.gwo.max_iters = scalar(key, value)?,
            "gwo_penalty" => self.params.gwo.penalty = scalar(key, value)?,
            "gwo_penalty_power" => self.params.gwo.penalty_power = scalar(key, value)?,
            "kuc_max_iters" => self.params.kuc.max_iters = scalar(key, value)?,
            "control_max_iters" => self.control.max_iters = scalar(key, value)?,
            "control_tol" => self.control.tol = scalar(key, value)?,
            "timing" => self.timing = flag(key, value)?,
            "bench_reps" => self.bench_reps = scalar(key, value)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks ranges and sweep ordering, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        fn increasing(key: &str, v: &[usize]) -> Result<()> {
            if v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config(key, "sweep list must be strictly increasing"));
            }
            if v.contains(&0) {
                return Err(Error::config(key, "must be at least 1"));
            }
            Ok(())
        }
        increasing("n_users", &self.n_users)?;
        increasing("n_clusters", &self.n_clusters)?;
        if self.gamma_th_db.iter().any(|g| !g.is_finite()) {
            return Err(Error::config("gamma_th_db", "must be finite"));
        }
        let max_users = *self.n_users.last().unwrap();
        if self.gamma_th_db.len() > 1 && self.gamma_th_db.len() < max_users {
            return Err(Error::config(
                "gamma_th_db",
                format!(
                    "per-user list has {} entries, sweep needs {max_users}",
                    self.gamma_th_db.len()
                ),
            ));
        }
        let positive = [
            ("noise_power_w", self.noise_power_w),
            ("p_max_w", self.p_max_w),
            ("bandwidth_hz", self.bandwidth_hz),
            ("angular_spread", self.channel.angular_spread),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        let mut unique = self.algorithms.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != self.algorithms.len() {
            return Err(Error::config("algorithm", "an algorithm is listed twice"));
        }
        if self.params.gwo.pop_size < 3 {
            return Err(Error::config("gwo_pop_size", "needs at least 3 wolves"));
        }
        if self.bench_reps == 0 {
            return Err(Error::config("bench_reps", "must be at least 1"));
        }
        if self.channel.n_scatter_clusters == 0 {
            return Err(Error::config("n_scatter_clusters", "must be at least 1"));
        }
        if self.channel.rays_per_cluster == 0 {
            return Err(Error::config("rays_per_cluster", "must be at least 1"));
        }
        if !(self.channel.geometry.spacing() > 0.0) {
            return Err(Error::config("element_spacing", "must be positive"));
        }
        if let Some(g) = self.channel.carrier_normalization {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::config("carrier_normalization", "must be positive"));
            }
        }
        Ok(())
    }

    /// Linear thresholds for the first `n` users.
    pub fn thresholds(&self, n: usize) -> Vec<f64> {
        match self.gamma_th_db.as_slice() {
            [g] => vec![db_to_linear(*g); n],
            per_user => per_user[..n].iter().map(|&g| db_to_linear(g)).collect(),
        }
    }

    /// Renders the config back to `key = value` form.
    pub fn to_text(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
        }
        let ch = &self.channel;
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("n_users", join(&self.n_users));
        line("n_clusters", join(&self.n_clusters));
        line("gamma_th_db", join(&self.gamma_th_db));
        line("noise_power_w", self.noise_power_w.to_string());
        line("p_max_w", self.p_max_w.to_string());
        line("bandwidth_hz", self.bandwidth_hz.to_string());
        line("algorithm", join(&self.algorithms));
        line("trials", self.trials.to_string());
        line("seed", self.seed.to_string());
        line("n_scatter_clusters", ch.n_scatter_clusters.to_string());
        line("rays_per_cluster", ch.rays_per_cluster.to_string());
        line("angular_spread", ch.angular_spread.to_string());
        line(
            "carrier_normalization",
            ch.carrier_normalization.map_or("auto".into(), |g| g.to_string()),
        );
        line(
            "antenna_gain",
            match ch.antenna_gain {
                AntennaGain::Unit => "unit".into(),
                AntennaGain::Sectorized => "sectorized".into(),
            },
        );
        line(
            "array_geometry",
            match ch.geometry {
                ArrayGeometry::UniformLinear { .. } => "ula".into(),
                ArrayGeometry::UniformPlanar { .. } => "upa".into(),
            },
        );
        line("element_spacing", ch.geometry.spacing().to_string());
        line("n_hotspots", ch.n_hotspots.to_string());
        line("path_gain_db", ch.path_gain_db.to_string());
        line("gwo_pop_size", self.params.gwo.pop_size.to_string());
        line("gwo_max_iters", self.params.gwo.max_iters.to_string());
        line("gwo_penalty", self.params.gwo.penalty.to_string());
        line("gwo_penalty_power", self.params.gwo.penalty_power.to_string());
        line("kuc_max_iters", self.params.kuc.max_iters.to_string());
        line("control_max_iters", self.control.max_iters.to_string());
        line("control_tol", self.control.tol.to_string());
        line("timing", self.timing.to_string());
        line("bench_reps", self.bench_reps.to_string());
        s
    }
}
