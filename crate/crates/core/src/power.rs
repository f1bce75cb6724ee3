//! SINR-constrained power allocation for clustered NOMA with SIC.
//!
//! Within cluster `k` users are decoded in list order. User `n` must satisfy
//!
//! ```text
//! p_n >= g_th,n s2 / (c_n g_n) + g_th,n * sum_{j<n} p_j + g_th,n (1 - c_n)/c_n * I_k
//! ```
//!
//! where `I_k` is the total power of every user outside the cluster. Writing
//! `p_n = a_n + b_n I_k` gives the per-cluster requirement
//! `A_k = alpha_k + beta_k I_k`, and summing over clusters yields the
//! closed-form minimum
//!
//! ```text
//! P_min = sum_k alpha_k/(1+beta_k) / (1 - sum_k beta_k/(1+beta_k))
//! A_k   = (alpha_k + beta_k P_min) / (1 + beta_k)
//! ```
//!
//! which exists only while the denominator stays positive.

use crate::error::{Error, Result};

/// Per-user quantities entering the SINR expression. Every vector is indexed
/// by user id.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrModel {
    /// Linear SINR thresholds.
    pub gamma_th: Vec<f64>,
    /// Noise power in watts.
    pub noise_power: f64,
    /// Collinearity to the cluster representative, in (0, 1].
    pub collinearity: Vec<f64>,
    /// Effective channel-beam gain `|h_u . w_k|^2`.
    pub gain: Vec<f64>,
}

impl SinrModel {
    pub fn n_users(&self) -> usize {
        self.gamma_th.len()
    }

    fn noise_term(&self, u: usize) -> f64 {
        self.noise_power / (self.collinearity[u] * self.gain[u])
    }

    fn leakage_term(&self, u: usize) -> f64 {
        (1.0 - self.collinearity[u]) / self.collinearity[u]
    }

    /// `Some(gamma)` when every listed user shares the same threshold.
    pub fn common_threshold<'a>(&self, users: impl IntoIterator<Item = &'a usize>) -> Option<f64> {
        let mut it = users.into_iter();
        let first = self.gamma_th[*it.next()?];
        it.all(|&u| self.gamma_th[u] == first).then_some(first)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// SINR of user `u` under the given powers (indexed by user id).
///
/// # Panics
///
/// Panics if `u` is not in any cluster.
pub fn sinr(u: usize, powers: &[f64], clusters: &[Vec<usize>], model: &SinrModel) -> f64 {
    let k = clusters
        .iter()
        .position(|c| c.contains(&u))
        .expect("user must be served");
    let pos = clusters[k].iter().position(|&v| v == u).unwrap();
    let intra: f64 = clusters[k][..pos].iter().map(|&v| powers[v]).sum();
    let inter: f64 = clusters
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != k)
        .flat_map(|(_, c)| c.iter())
        .map(|&v| powers[v])
        .sum();
    let c = model.collinearity[u];
    let g = model.gain[u];
    c * powers[u] * g / (model.noise_power + c * g * intra + (1.0 - c) * g * inter)
}

/// Minimal per-user powers meeting every threshold with equality, given the
/// inter-cluster power each cluster sees. Evaluated by the exact recursion.
pub fn required_powers(clusters: &[Vec<usize>], model: &SinrModel, inter: &[f64]) -> Vec<f64> {
    assert_eq!(clusters.len(), inter.len());
    let mut p = vec![0.0; model.n_users()];
    for (members, &i_k) in clusters.iter().zip(inter) {
        let mut before = 0.0;
        for &u in members {
            let gamma = model.gamma_th[u];
            let pu = gamma * model.noise_term(u) + gamma * before + gamma * model.leakage_term(u) * i_k;
            p[u] = pu;
            before += pu;
        }
    }
    p
}

/// `A_k >= alpha_k + beta_k * (power outside cluster k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPowerCoefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Per-user linear coefficients `p_n = a_n + b_n I_k`, exact for any
/// thresholds. Returns `(a, b)` indexed by user id.
fn user_coefficients(clusters: &[Vec<usize>], model: &SinrModel) -> (Vec<f64>, Vec<f64>) {
    let n = model.n_users();
    let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
    for members in clusters {
        let (mut sa, mut sb) = (0.0, 0.0);
        for &u in members {
            let gamma = model.gamma_th[u];
            a[u] = gamma * (model.noise_term(u) + sa);
            b[u] = gamma * (model.leakage_term(u) + sb);
            sa += a[u];
            sb += b[u];
        }
    }
    (a, b)
}

/// `(a, b)` of the last-decoded member of one cluster.
pub(crate) fn last_user_coefficients(members: &[usize], model: &SinrModel) -> (f64, f64) {
    let (mut sa, mut sb) = (0.0, 0.0);
    let (mut a, mut b) = (0.0, 0.0);
    for &u in members {
        let gamma = model.gamma_th[u];
        a = gamma * (model.noise_term(u) + sa);
        b = gamma * (model.leakage_term(u) + sb);
        sa += a;
        sb += b;
    }
    (a, b)
}

/// Cluster coefficients by the exact recursion (per-user thresholds).
pub fn coefficients_per_user(clusters: &[Vec<usize>], model: &SinrModel) -> ClusterPowerCoefficients {
    let (a, b) = user_coefficients(clusters, model);
    ClusterPowerCoefficients {
        alpha: clusters.iter().map(|m| m.iter().map(|&u| a[u]).sum()).collect(),
        beta: clusters.iter().map(|m| m.iter().map(|&u| b[u]).sum()).collect(),
    }
}

/// Cluster coefficients for a threshold shared by all users, expanded into
/// the explicit geometric sums
///
/// ```text
/// alpha = sum_i g s2/(c_i g_i) + g^2 s2 sum_i sum_{j<i} (1+g)^(i-j-1) / (c_j g_j)
/// beta  = sum_i g (1-c_i)/c_i  + g^2    sum_i sum_{j<i} (1+g)^(i-j-1) (1-c_j)/c_j
/// ```
pub fn coefficients_constant(
    clusters: &[Vec<usize>],
    model: &SinrModel,
    gamma: f64,
) -> ClusterPowerCoefficients {
    let mut alpha = Vec::with_capacity(clusters.len());
    let mut beta = Vec::with_capacity(clusters.len());
    for members in clusters {
        let (mut al, mut be) = (0.0, 0.0);
        // Inner sums over j < i, advanced as s <- (1 + g) s + t_{i-1}.
        let (mut sa, mut sb) = (0.0, 0.0);
        for &u in members {
            al += gamma * model.noise_term(u) + gamma * gamma * sa;
            be += gamma * model.leakage_term(u) + gamma * gamma * sb;
            sa = (1.0 + gamma) * sa + model.noise_term(u);
            sb = (1.0 + gamma) * sb + model.leakage_term(u);
        }
        alpha.push(al);
        beta.push(be);
    }
    ClusterPowerCoefficients { alpha, beta }
}

/// Picks the constant-threshold expansion when every served user shares a
/// threshold, the exact recursion otherwise.
pub fn cluster_coefficients(clusters: &[Vec<usize>], model: &SinrModel) -> ClusterPowerCoefficients {
    match model.common_threshold(clusters.iter().flatten()) {
        Some(gamma) => coefficients_constant(clusters, model, gamma),
        None => coefficients_per_user(clusters, model),
    }
}

/// Minimum total power and its split over clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPower {
    pub total: f64,
    pub cluster_totals: Vec<f64>,
    pub coefficients: ClusterPowerCoefficients,
    /// `1 - sum_k beta_k / (1 + beta_k)`.
    pub denominator: f64,
}

/// Closed-form minimum power.
pub fn min_power_closed_form(clusters: &[Vec<usize>], model: &SinrModel) -> Result<MinPower> {
    let coefficients = cluster_coefficients(clusters, model);
    min_power_from_coefficients(coefficients)
}

pub fn min_power_from_coefficients(coefficients: ClusterPowerCoefficients) -> Result<MinPower> {
    let ClusterPowerCoefficients { alpha, beta } = &coefficients;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::InfeasibleSystem {
            denominator: f64::NEG_INFINITY,
        });
    }
    // Same as 1 - sum b/(1+b), without the cancellation when one cluster
    // carries a huge beta.
    let denominator = beta.iter().map(|b| 1.0 / (1.0 + b)).sum::<f64>() - (beta.len() as f64 - 1.0);
    if !(denominator > 0.0) {
        return Err(Error::InfeasibleSystem { denominator });
    }
    let numerator: f64 = alpha.iter().zip(beta).map(|(a, b)| a / (1.0 + b)).sum();
    let total = numerator / denominator;
    let cluster_totals = alpha
        .iter()
        .zip(beta)
        .map(|(a, b)| (a + b * total) / (1.0 + b))
        .collect();
    Ok(MinPower {
        total,
        cluster_totals,
        coefficients,
        denominator,
    })
}

/// Power allocated to a clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSolution {
    /// Watts per user id, zero for unserved users.
    pub powers: Vec<f64>,
    pub cluster_totals: Vec<f64>,
    pub total: f64,
    pub p_min_total: f64,
    /// Per-cluster budgets left by the power-control loop.
    pub cluster_budgets: Vec<f64>,
    pub feasible: bool,
    /// Linear SINR per user id, zero for unserved users.
    pub achieved_sinr: Vec<f64>,
    pub control_iterations: usize,
}

impl PowerSolution {
    /// Minimum-power allocation for `clusters`. Never fails: an infeasible
    /// coupling yields an infinite total and `feasible = false`.
    pub fn minimum(clusters: &[Vec<usize>], model: &SinrModel, p_max: f64) -> Self {
        match min_power_closed_form(clusters, model) {
            Ok(min) => Self::from_min_power(clusters, model, p_max, &min),
            Err(_) => Self::infeasible(clusters, model),
        }
    }

    fn infeasible(clusters: &[Vec<usize>], model: &SinrModel) -> Self {
        let mut powers = vec![0.0; model.n_users()];
        for &u in clusters.iter().flatten() {
            powers[u] = f64::INFINITY;
        }
        PowerSolution {
            powers,
            cluster_totals: vec![f64::INFINITY; clusters.len()],
            total: f64::INFINITY,
            p_min_total: f64::INFINITY,
            cluster_budgets: vec![0.0; clusters.len()],
            feasible: false,
            achieved_sinr: vec![0.0; model.n_users()],
            control_iterations: 0,
        }
    }

    fn from_min_power(clusters: &[Vec<usize>], model: &SinrModel, p_max: f64, min: &MinPower) -> Self {
        if !min.total.is_finite() {
            return Self::infeasible(clusters, model);
        }
        let (a, b) = user_coefficients(clusters, model);
        let mut powers = vec![0.0; model.n_users()];
        for (k, members) in clusters.iter().enumerate() {
            let outside: f64 = min
                .cluster_totals
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, a)| a)
                .sum();
            for &u in members {
                powers[u] = a[u] + b[u] * outside;
            }
        }
        let mut achieved_sinr = vec![0.0; model.n_users()];
        for &u in clusters.iter().flatten() {
            achieved_sinr[u] = sinr(u, &powers, clusters, model);
        }
        let total = min.total;
        PowerSolution {
            powers,
            cluster_totals: min.cluster_totals.clone(),
            total,
            p_min_total: min.total,
            cluster_budgets: min.cluster_totals.clone(),
            feasible: total <= p_max,
            achieved_sinr,
            control_iterations: 0,
        }
    }

    pub fn served(&self) -> impl Iterator<Item = usize> + '_ {
        self.powers
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(u, _)| u)
    }
}

/// Budget check: total within `p_max` and a finite closed form.
pub fn test_p(solution: &PowerSolution, p_max: f64) -> bool {
    solution.total.is_finite() && solution.p_min_total.is_finite() && solution.total <= p_max
}

/// Per-cluster budgets driven by the power allocation feedback.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerControlState {
    pub p_max: Vec<f64>,
    pub p_min: Vec<f64>,
}

impl PowerControlState {
    /// `delta_i = p_max_i - p_min_i`.
    pub fn disparity(&self) -> Vec<f64> {
        self.p_max.iter().zip(&self.p_min).map(|(a, b)| a - b).collect()
    }

    /// `Pr = sum p_max - sum p_min`.
    pub fn range(&self) -> f64 {
        self.p_max.iter().sum::<f64>() - self.p_min.iter().sum::<f64>()
    }
}

/// One feedback update `p_max_i <- (Pr - delta_i)/(M - 1) + p_min_i`.
/// With a single budget the update is undefined and the input is returned.
pub fn power_control_step(state: &PowerControlState) -> Vec<f64> {
    let m = state.p_max.len();
    if m < 2 {
        return state.p_max.clone();
    }
    let range = state.range();
    state
        .disparity()
        .iter()
        .zip(&state.p_min)
        .map(|(d, pmin)| (range - d) / (m - 1) as f64 + pmin)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerControlConfig {
    pub max_iters: usize,
    /// Stop once the largest budget change falls below this, watts.
    pub tol: f64,
}

impl Default for PowerControlConfig {
    fn default() -> Self {
        PowerControlConfig {
            max_iters: 50,
            tol: 1e-6,
        }
    }
}

/// Minimum-power allocation followed by the iterative budget redistribution.
///
/// Budgets start as an equal split of `p_max` over the non-empty clusters
/// and are updated until they settle. The returned powers are the minimum
/// powers; the budgets are reported in `cluster_budgets`.
pub fn run_power_control(
    clusters: &[Vec<usize>],
    model: &SinrModel,
    p_max: f64,
    config: PowerControlConfig,
) -> Result<PowerSolution> {
    let min = min_power_closed_form(clusters, model)?;
    let mut solution = PowerSolution::from_min_power(clusters, model, p_max, &min);
    let active: Vec<usize> = (0..clusters.len()).filter(|&k| !clusters[k].is_empty()).collect();
    if active.is_empty() {
        solution.cluster_budgets = vec![0.0; clusters.len()];
        return Ok(solution);
    }
    let mut state = PowerControlState {
        p_max: vec![p_max / active.len() as f64; active.len()],
        p_min: active.iter().map(|&k| min.cluster_totals[k]).collect(),
    };
    let mut iterations = 0;
    while active.len() > 1 && iterations < config.max_iters {
        let next = power_control_step(&state);
        let change = next
            .iter()
            .zip(&state.p_max)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        state.p_max = next;
        iterations += 1;
        if change < config.tol {
            break;
        }
    }
    let mut budgets = vec![0.0; clusters.len()];
    for (&k, &b) in active.iter().zip(&state.p_max) {
        budgets[k] = b;
    }
    solution.cluster_budgets = budgets;
    solution.control_iterations = iterations;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(gamma: &[f64], c: &[f64], g: &[f64], noise: f64) -> SinrModel {
        SinrModel {
            gamma_th: gamma.to_vec(),
            noise_power: noise,
            collinearity: c.to_vec(),
            gain: g.to_vec(),
        }
    }

    #[test]
    fn ten_db_is_ten() {
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_user_sinr() {
        let m = model(&[10.0], &[1.0], &[1.0], 0.01);
        let s = sinr(0, &[0.1], &[vec![0]], &m);
        assert!((s - 10.0).abs() < 1e-12);
    }

    #[test]
    fn representative_ignores_other_clusters() {
        let m = model(&[10.0; 2], &[1.0, 0.5], &[1.0, 1.0], 0.01);
        let a = sinr(0, &[0.1, 0.0], &[vec![0], vec![1]], &m);
        let b = sinr(0, &[0.1, 50.0], &[vec![0], vec![1]], &m);
        assert_eq!(a, b);
    }

    #[test]
    fn second_decoded_user_sees_first() {
        let m = model(&[10.0; 2], &[1.0; 2], &[1.0; 2], 0.01);
        let s = sinr(1, &[0.1, 1.1], &[vec![0, 1]], &m);
        assert!((s - 10.0).abs() < 1e-12);
    }

    #[test]
    fn recursion_hand_values() {
        let m = model(&[10.0], &[1.0], &[1.0], 0.01);
        assert!((required_powers(&[vec![0]], &m, &[0.0])[0] - 0.1).abs() < 1e-15);
        let m = model(&[10.0; 2], &[1.0; 2], &[1.0; 2], 0.01);
        let p = required_powers(&[vec![0, 1]], &m, &[0.0]);
        assert!((p[0] - 0.1).abs() < 1e-15);
        assert!((p[1] - 1.1).abs() < 1e-14);
    }

    #[test]
    fn single_user_closed_form() {
        let m = model(&[10.0], &[1.0], &[1.0], 0.01);
        let min = min_power_closed_form(&[vec![0]], &m).unwrap();
        assert!((min.total - 0.1).abs() < 1e-15);
        assert_eq!(min.coefficients.beta, vec![0.0]);
    }

    #[test]
    fn representatives_only_have_no_coupling() {
        let g = [0.5, 2.0, 1.0];
        let m = model(&[10.0; 3], &[1.0; 3], &g, 0.01);
        let clusters = [vec![0], vec![1], vec![2]];
        let min = min_power_closed_form(&clusters, &m).unwrap();
        assert!(min.coefficients.beta.iter().all(|&b| b == 0.0));
        let expected: f64 = g.iter().map(|gk| 10.0 * 0.01 / gk).sum();
        assert!((min.total - expected).abs() < 1e-15);
    }

    #[test]
    fn one_deep_cluster_stays_tight() {
        // Six SIC levels at 15 dB give beta near 1e9 in the first cluster
        // while the singletons carry none.
        let n = 8;
        let mut c = vec![0.6; 6];
        c.extend([1.0, 1.0]);
        let m = model(&vec![31.6; n], &c, &[1e4; 8], 0.01);
        let clusters = [(0..6).collect::<Vec<_>>(), vec![6], vec![7]];
        let sol = PowerSolution::minimum(&clusters, &m, f64::INFINITY);
        for u in 0..n {
            let s = sinr(u, &sol.powers, &clusters, &m);
            assert!((s / 31.6 - 1.0).abs() < 1e-12, "user {u}: {s}");
        }
    }

    #[test]
    fn strong_coupling_is_infeasible() {
        let m = model(&[10.0; 4], &[1.0, 0.5, 1.0, 0.5], &[1.0; 4], 0.01);
        let err = min_power_closed_form(&[vec![0, 1], vec![2, 3]], &m).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSystem { .. }));
        let sol = PowerSolution::minimum(&[vec![0, 1], vec![2, 3]], &m, 1.0);
        assert!(!sol.feasible && !test_p(&sol, 1.0));
    }

    #[test]
    fn budget_test() {
        let mk = |total: f64| PowerSolution {
            powers: vec![],
            cluster_totals: vec![],
            total,
            p_min_total: total,
            cluster_budgets: vec![],
            feasible: true,
            achieved_sinr: vec![],
            control_iterations: 0,
        };
        assert!(test_p(&mk(0.5), 1.0));
        assert!(!test_p(&mk(1.2), 1.0));
        assert!(!test_p(&mk(f64::INFINITY), 1.0));
    }

    #[test]
    fn feedback_step_hand_values() {
        let s = PowerControlState {
            p_max: vec![0.5, 0.5],
            p_min: vec![0.2, 0.3],
        };
        assert!((s.range() - 0.5).abs() < 1e-15);
        let d = s.disparity();
        assert!((d[0] - 0.3).abs() < 1e-15 && (d[1] - 0.2).abs() < 1e-15);
        let up = power_control_step(&s);
        assert!((up[0] - 0.4).abs() < 1e-15 && (up[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn uniform_disparity_is_a_fixed_point() {
        let s = PowerControlState {
            p_max: vec![0.3, 0.5, 0.6],
            p_min: vec![0.1, 0.3, 0.4],
        };
        let up = power_control_step(&s);
        for (a, b) in up.iter().zip(&s.p_max) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_budget_is_left_alone() {
        let s = PowerControlState {
            p_max: vec![0.7],
            p_min: vec![0.2],
        };
        assert_eq!(power_control_step(&s), vec![0.7]);
    }

    #[test]
    fn single_cluster_control_equals_closed_form() {
        let m = model(&[10.0; 3], &[1.0, 0.99, 0.98], &[30.0, 20.0, 10.0], 0.01);
        let clusters = [vec![0, 1, 2]];
        let min = min_power_closed_form(&clusters, &m).unwrap();
        let sol = run_power_control(&clusters, &m, 1.0, PowerControlConfig::default()).unwrap();
        assert!((sol.total - min.total).abs() < 1e-15);
        assert_eq!(sol.control_iterations, 0);
        assert!(sol.feasible);
    }

    #[test]
    fn converged_budgets_take_one_iteration() {
        // Two equal clusters: equal split already has uniform disparity.
        let m = model(&[10.0; 2], &[1.0; 2], &[1.0; 2], 0.01);
        let sol = run_power_control(&[vec![0], vec![1]], &m, 1.0, PowerControlConfig::default()).unwrap();
        assert_eq!(sol.control_iterations, 1);
        assert!((sol.cluster_budgets[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn control_budgets_settle_to_equal_slack() {
        let m = model(&[10.0; 3], &[1.0; 3], &[1.0, 2.0, 4.0], 0.01);
        let clusters = [vec![0], vec![1], vec![2]];
        let sol = run_power_control(&clusters, &m, 1.0, PowerControlConfig::default()).unwrap();
        let slack = (1.0 - sol.total) / 3.0;
        for k in 0..3 {
            assert!((sol.cluster_budgets[k] - sol.cluster_totals[k] - slack).abs() < 1e-6);
        }
        assert!((sol.cluster_budgets.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    /// Random cluster structure: up to 3 clusters, up to 6 users.
    fn arb_instance(per_user_thresholds: bool) -> impl Strategy<Value = (Vec<Vec<usize>>, SinrModel)> {
        (1usize..=3, 1usize..=6)
            .prop_flat_map(move |(m, n)| {
                let n = n.max(m);
                (
                    Just(m),
                    prop::collection::vec(0usize..m, n),
                    prop::collection::vec(0.0f64..10.0, n),
                    prop::collection::vec(0.9f64..=1.0, n),
                    prop::collection::vec(0.1f64..5.0, n),
                )
            })
            .prop_map(move |(m, owner, th_db, c, g)| {
                let n = owner.len();
                let mut clusters = vec![Vec::new(); m];
                for (u, &k) in owner.iter().enumerate() {
                    clusters[k].push(u);
                }
                let gamma_th = if per_user_thresholds {
                    th_db.iter().map(|&d| db_to_linear(d)).collect()
                } else {
                    vec![10.0; n]
                };
                (
                    clusters,
                    SinrModel {
                        gamma_th,
                        noise_power: 0.01,
                        collinearity: c,
                        gain: g,
                    },
                )
            })
    }

    proptest! {
        #[test]
        fn recursion_is_tight((clusters, m) in arb_instance(true), inter in prop::collection::vec(0.0f64..2.0, 3)) {
            let inter = &inter[..clusters.len()];
            let p = required_powers(&clusters, &m, inter);
            for (k, members) in clusters.iter().enumerate() {
                let mut before = 0.0;
                for &u in members {
                    let c = m.collinearity[u];
                    let g = m.gain[u];
                    let s = c * p[u] * g / (m.noise_power + c * g * before + (1.0 - c) * g * inter[k]);
                    prop_assert!((s - m.gamma_th[u]).abs() <= 1e-9 * m.gamma_th[u]);
                    before += p[u];
                }
            }
        }

        #[test]
        fn constant_threshold_expansion_matches_recursion((clusters, m) in arb_instance(false)) {
            let a = coefficients_constant(&clusters, &m, 10.0);
            let b = coefficients_per_user(&clusters, &m);
            for k in 0..clusters.len() {
                prop_assert!((a.alpha[k] - b.alpha[k]).abs() <= 1e-9 * b.alpha[k].max(1e-300));
                prop_assert!((a.beta[k] - b.beta[k]).abs() <= 1e-9 * b.beta[k].max(1e-12));
            }
        }

        #[test]
        fn closed_form_solution_meets_every_threshold((clusters, m) in arb_instance(true)) {
            let sol = PowerSolution::minimum(&clusters, &m, f64::INFINITY);
            prop_assume!(sol.total.is_finite());
            for &u in clusters.iter().flatten() {
                let s = sinr(u, &sol.powers, &clusters, &m);
                prop_assert!((s - m.gamma_th[u]).abs() <= 1e-9 * m.gamma_th[u]);
            }
            let sum: f64 = sol.powers.iter().sum();
            prop_assert!((sum - sol.total).abs() <= 1e-9 * sol.total);
            let ct: f64 = sol.cluster_totals.iter().sum();
            prop_assert!((ct - sol.total).abs() <= 1e-9 * sol.total);
        }

        #[test]
        fn powers_grow_along_the_decoding_order(n in 2usize..7, c in 0.9f64..=1.0, g in 0.1f64..5.0) {
            let m = model(&vec![10.0; n], &vec![c; n], &vec![g; n], 0.01);
            let clusters = [(0..n).collect::<Vec<_>>()];
            let p = required_powers(&clusters, &m, &[0.3]);
            for w in p.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
        }

        #[test]
        fn feedback_step_conserves_the_budget(
            pmin in prop::collection::vec(0.0f64..1.0, 2..12),
            slack in prop::collection::vec(0.0f64..1.0, 12),
        ) {
            let p_max: Vec<f64> = pmin.iter().zip(&slack).map(|(a, s)| a + s).collect();
            let state = PowerControlState { p_max: p_max.clone(), p_min: pmin };
            let up = power_control_step(&state);
            let before: f64 = p_max.iter().sum();
            let after: f64 = up.iter().sum();
            prop_assert!((after - before).abs() <= 1e-12 * before.max(1e-300));
        }
    }
}
