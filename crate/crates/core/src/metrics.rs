//! Served users, rates and energy efficiency of a power solution.

use crate::power::PowerSolution;

/// Per-user Shannon rate `B log2(1 + SINR)`, zero for unserved users.
pub fn rates(solution: &PowerSolution, bandwidth_hz: f64) -> Vec<f64> {
    solution
        .achieved_sinr
        .iter()
        .zip(&solution.powers)
        .map(|(&s, &p)| {
            if p > 0.0 && s > 0.0 {
                bandwidth_hz * (1.0 + s).log2()
            } else {
                0.0
            }
        })
        .collect()
}

/// Bits per joule. Returns `(0, true)` when no power is spent.
pub fn energy_efficiency(sum_rate_bps: f64, total_power_w: f64) -> (f64, bool) {
    if total_power_w > 0.0 && total_power_w.is_finite() {
        (sum_rate_bps / total_power_w, false)
    } else {
        (0.0, true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub served_users: usize,
    pub total_power_w: f64,
    pub sum_rate_bps: f64,
    pub energy_efficiency_bpj: f64,
    /// Set when nothing was transmitted and EE was reported as zero.
    pub zero_power: bool,
    pub per_user_rate_bps: Vec<f64>,
    pub bandwidth_hz: f64,
}

impl MetricsRecord {
    pub fn new(solution: &PowerSolution, served_users: usize, bandwidth_hz: f64) -> Self {
        let per_user_rate_bps = rates(solution, bandwidth_hz);
        let sum_rate_bps: f64 = per_user_rate_bps.iter().sum();
        let total_power_w = if solution.total.is_finite() {
            solution.total
        } else {
            0.0
        };
        let (energy_efficiency_bpj, zero_power) = energy_efficiency(sum_rate_bps, total_power_w);
        MetricsRecord {
            served_users,
            total_power_w,
            sum_rate_bps,
            energy_efficiency_bpj,
            zero_power,
            per_user_rate_bps,
            bandwidth_hz,
        }
    }
}
