//! Correlation-driven greedy clustering in three phases: seed clusters with
//! the most collinear pairs, merge clusters to free slots for rejected pairs,
//! then top up clusters with the leftover users.

use super::{Evaluator, Instance, Outcome};
use crate::beamforming::representative;

/// Pools built by the seeding phase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct SeedPools {
    /// Users whose best partner was already placed.
    pub singletons: Vec<usize>,
    /// Disjoint pairs that found no free cluster or broke the budget.
    pub non_alloc: Vec<(usize, usize)>,
}

pub fn cia(inst: &Instance) -> Outcome {
    let eval = Evaluator::new(inst);
    let mut clusters = vec![Vec::new(); inst.n_clusters];
    let pools = seed(&eval, &mut clusters);
    merge(&eval, &mut clusters, &pools.non_alloc);
    top_up(&eval, &mut clusters, &leftovers(inst.n_users(), &pools));
    eval.finalize(clusters)
}

pub(crate) fn seed(eval: &Evaluator<'_>, clusters: &mut [Vec<usize>]) -> SeedPools {
    let inst = eval.instance();
    let n = inst.n_users();
    let mut placed = vec![false; n];
    let mut pooled = vec![false; n];
    let mut in_pair = vec![false; n];
    let mut pools = SeedPools::default();

    if n == 1 {
        pools.singletons.push(0);
        return pools;
    }
    for pair in inst.pairs.iter() {
        let (i, j) = (pair.first, pair.second);
        match (placed[i], placed[j]) {
            (true, true) => {}
            (true, false) | (false, true) => {
                let other = if placed[i] { j } else { i };
                if !pooled[other] {
                    pooled[other] = true;
                    pools.singletons.push(other);
                }
            }
            (false, false) => {
                let free = clusters.iter().position(Vec::is_empty);
                let fits = free.is_some_and(|k| {
                    clusters[k] = vec![i, j];
                    let ok = eval.is_feasible(clusters);
                    if !ok {
                        clusters[k].clear();
                    }
                    ok
                });
                if fits {
                    placed[i] = true;
                    placed[j] = true;
                } else if !in_pair[i] && !in_pair[j] {
                    in_pair[i] = true;
                    in_pair[j] = true;
                    pools.non_alloc.push((i, j));
                }
            }
        }
    }
    pools
}

/// For every ordered cluster pair `(m, n)`, tries folding `n` into `m` and
/// handing the emptied slot to a rejected pair.
pub(crate) fn merge(eval: &Evaluator<'_>, clusters: &mut [Vec<usize>], non_alloc: &[(usize, usize)]) {
    let m_count = clusters.len();
    let mut placed = vec![false; eval.instance().n_users()];
    for &u in clusters.iter().flatten() {
        placed[u] = true;
    }
    for m in 0..m_count {
        for n in 0..m_count {
            if m == n {
                continue;
            }
            for &(i, j) in non_alloc {
                if placed[i] || placed[j] {
                    continue;
                }
                let before = clusters.to_vec();
                let moved = std::mem::take(&mut clusters[n]);
                clusters[m].extend(moved);
                clusters[n] = vec![i, j];
                if eval.is_feasible(clusters) {
                    placed[i] = true;
                    placed[j] = true;
                } else {
                    clusters.clone_from_slice(&before);
                }
            }
        }
    }
}

/// Offers leftover users to the clusters in sweeps: each sweep visits the
/// clusters in index order and admits at most one user per cluster, the
/// first in the pool (ranked by collinearity with the cluster's
/// representative) that keeps the clustering within budget. Sweeps repeat
/// until nobody is admitted. Admitting greedily per cluster instead lets the
/// first cluster swallow the budget, since SIC power grows geometrically with
/// cluster size.
pub(crate) fn top_up(eval: &Evaluator<'_>, clusters: &mut [Vec<usize>], pool: &[usize]) {
    let inst = eval.instance();
    let c = &inst.collinearity;
    let mut placed = vec![false; inst.n_users()];
    for &u in clusters.iter().flatten() {
        placed[u] = true;
    }
    let mut admitted = true;
    while admitted {
        admitted = false;
        for k in 0..clusters.len() {
            let mut order: Vec<usize> = pool.iter().copied().filter(|&u| !placed[u]).collect();
            if let Some(rep) = representative(&clusters[k], c) {
                let score = |u: usize| c.get(u, rep) * inst.channels.gain(u);
                order.sort_by(|&a, &b| score(b).total_cmp(&score(a)).then(a.cmp(&b)));
            }
            for u in order {
                clusters[k].push(u);
                if eval.is_feasible(clusters) {
                    placed[u] = true;
                    admitted = true;
                    break;
                }
                clusters[k].pop();
            }
        }
    }
}

/// Singletons first, then the members of rejected pairs, then everyone else.
fn leftovers(n_users: usize, pools: &SeedPools) -> Vec<usize> {
    let mut seen = vec![false; n_users];
    let mut out = Vec::new();
    let pairs = pools.non_alloc.iter().flat_map(|&(i, j)| [i, j]);
    for u in pools.singletons.iter().copied().chain(pairs).chain(0..n_users) {
        if !seen[u] {
            seen[u] = true;
            out.push(u);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelParams, ChannelSet, C64};

    fn instance(vectors: &[[f64; 2]]) -> Instance {
        let params = ChannelParams {
            n_tx_antennas: 2,
            ..ChannelParams::default()
        };
        let vectors = vectors
            .iter()
            .map(|v| v.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        let channels = ChannelSet::from_vectors(params, vectors).unwrap();
        Instance::new(channels, vec![10.0; 4], 0.01, 1.0, 2).unwrap()
    }

    #[test]
    fn rejected_merge_restores_clusters_exactly() {
        // Users 2 and 3 are orthogonal, so no cluster holding both is feasible.
        let inst = instance(&[[3.0, 0.0], [0.0, 3.0], [1.0, 0.0], [0.0, 1.0]]);
        let eval = Evaluator::new(&inst);
        let mut clusters = vec![vec![0], vec![1]];
        assert!(eval.is_feasible(&clusters));
        let before = clusters.clone();
        merge(&eval, &mut clusters, &[(2, 3)]);
        assert_eq!(clusters, before);
    }

    #[test]
    fn rejected_top_up_restores_clusters_exactly() {
        // Users 2 and 3 are too weak for the budget in any cluster.
        let inst = instance(&[[3.0, 0.0], [0.0, 3.0], [1e-4, 0.0], [0.0, 1e-4]]);
        let eval = Evaluator::new(&inst);
        let mut clusters = vec![vec![0], vec![1]];
        let before = clusters.clone();
        top_up(&eval, &mut clusters, &[2, 3]);
        assert_eq!(clusters, before);
    }
}
