//! Cross-check of the closed-form minimum power against plain fixed-point
//! iteration of the per-user recursion on small random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::power::{
    coefficients_constant, coefficients_per_user, min_power_closed_form, required_powers, SinrModel,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub instances: usize,
    pub max_clusters: usize,
    pub max_users: usize,
    pub seed: u64,
    /// Deviation above which the run fails.
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            instances: 1000,
            max_clusters: 3,
            max_users: 6,
            seed: 0,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub instances: usize,
    /// Instances both paths found feasible.
    pub feasible: usize,
    /// Instances both paths found infeasible.
    pub infeasible_agreed: usize,
    /// Instances where the two paths disagree on feasibility.
    pub disagreements: usize,
    /// Largest relative gap between closed-form and fixed-point totals.
    pub max_rel_deviation: f64,
    /// Largest relative gap between the per-user and the shared-threshold
    /// coefficients when all thresholds are equal.
    pub max_threshold_path_deviation: f64,
}

impl OracleReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.disagreements == 0
            && self.max_rel_deviation <= tolerance
            && self.max_threshold_path_deviation <= 1e-9
    }
}

/// A small random instance: clusters in decoding order plus the SINR model.
#[derive(Debug, Clone)]
pub struct SmallInstance {
    pub clusters: Vec<Vec<usize>>,
    pub model: SinrModel,
}

/// Draws an instance with up to `max_clusters` clusters and `max_users` users.
pub fn random_instance(rng: &mut ChaCha8Rng, max_clusters: usize, max_users: usize) -> SmallInstance {
    let k = rng.random_range(1..=max_clusters);
    let n = rng.random_range(k..=max_users.max(k));
    let mut clusters = vec![Vec::new(); k];
    for u in 0..n {
        // Every cluster gets one user before the rest are scattered.
        let slot = if u < k { u } else { rng.random_range(0..k) };
        clusters[slot].push(u);
    }
    let shared = rng.random_bool(0.5);
    let g0 = 10f64.powf(rng.random_range(0.0..1.5));
    let model = SinrModel {
        gamma_th: (0..n)
            .map(|_| {
                if shared {
                    g0
                } else {
                    10f64.powf(rng.random_range(0.0..1.5))
                }
            })
            .collect(),
        noise_power: 10f64.powf(rng.random_range(-3.0..-1.0)),
        collinearity: (0..n)
            .map(|_| {
                if rng.random_bool(0.3) {
                    1.0
                } else {
                    1.0 - 10f64.powf(rng.random_range(-4.0..-0.5))
                }
            })
            .collect(),
        gain: (0..n).map(|_| 10f64.powf(rng.random_range(-0.5..2.0))).collect(),
    };
    let mut inst = SmallInstance { clusters, model };
    for members in inst.clusters.iter_mut() {
        let m = &inst.model;
        members.sort_by(|&a, &b| {
            (m.collinearity[b] * m.gain[b])
                .total_cmp(&(m.collinearity[a] * m.gain[a]))
                .then(a.cmp(&b))
        });
    }
    inst
}

/// Iterates `p <- required_powers(p_inter(p))` from zero inter-cluster power.
/// Returns `None` if the total diverges.
pub fn fixed_point_total(inst: &SmallInstance) -> Option<f64> {
    let k = inst.clusters.len();
    let mut inter = vec![0.0; k];
    let mut prev = 0.0;
    for _ in 0..2_000_000 {
        let p = required_powers(&inst.clusters, &inst.model, &inter);
        let cluster: Vec<f64> = inst
            .clusters
            .iter()
            .map(|m| m.iter().map(|&u| p[u]).sum())
            .collect();
        let total: f64 = cluster.iter().sum();
        if !total.is_finite() || total > 1e12 {
            return None;
        }
        if (total - prev).abs() <= 1e-13 * total {
            return Some(total);
        }
        prev = total;
        for (i, c) in inter.iter_mut().zip(&cluster) {
            *i = total - c;
        }
    }
    None
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Compares both paths on `config.instances` random instances.
pub fn run_oracle(config: &OracleConfig) -> Result<OracleReport> {
    let defaults = OracleConfig::default();
    if config.max_clusters > defaults.max_clusters || config.max_users > defaults.max_users {
        return Err(Error::SizeExceeded(format!(
            "{} clusters / {} users requested, at most {} / {} supported",
            config.max_clusters, config.max_users, defaults.max_clusters, defaults.max_users
        )));
    }
    if config.max_clusters == 0 || config.max_users < config.max_clusters {
        return Err(Error::invalid("max_users", "need at least one user per cluster"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = OracleReport {
        instances: config.instances,
        feasible: 0,
        infeasible_agreed: 0,
        disagreements: 0,
        max_rel_deviation: 0.0,
        max_threshold_path_deviation: 0.0,
    };
    for _ in 0..config.instances {
        let inst = random_instance(&mut rng, config.max_clusters, config.max_users);
        let closed = min_power_closed_form(&inst.clusters, &inst.model)
            .ok()
            .map(|m| m.total);
        match (closed, fixed_point_total(&inst)) {
            (Some(a), Some(b)) => {
                report.feasible += 1;
                report.max_rel_deviation = report.max_rel_deviation.max(rel(a, b));
            }
            (None, None) => report.infeasible_agreed += 1,
            _ => report.disagreements += 1,
        }

        // Same instance with one shared threshold through both coefficient paths.
        let mut shared = inst.model.clone();
        let g = shared.gamma_th[0];
        shared.gamma_th.iter_mut().for_each(|t| *t = g);
        let a = coefficients_per_user(&inst.clusters, &shared);
        let b = coefficients_constant(&inst.clusters, &shared, g);
        for (x, y) in a.alpha.iter().chain(&a.beta).zip(b.alpha.iter().chain(&b.beta)) {
            report.max_threshold_path_deviation = report.max_threshold_path_deviation.max(rel(*x, *y));
        }
    }
    Ok(report)
}
