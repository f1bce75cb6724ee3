//! Two-user-per-cluster baselines.

use super::{Evaluator, Instance, Outcome};

/// Pairs the strongest remaining user with the weakest remaining one, by
/// channel gain `||h||^2`. A pair that breaks the power budget is dropped and
/// its slot offered to the next pair.
pub fn near_far_pairing(inst: &Instance) -> Outcome {
    let eval = Evaluator::new(inst);
    let mut order: Vec<usize> = (0..inst.n_users()).collect();
    order.sort_by(|&a, &b| {
        inst.channels
            .gain(b)
            .total_cmp(&inst.channels.gain(a))
            .then(a.cmp(&b))
    });

    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); inst.n_clusters];
    let mut next = 0;
    let (mut lo, mut hi) = (0, order.len());
    while lo < hi && next < inst.n_clusters {
        let group = if hi - lo == 1 {
            vec![order[lo]]
        } else {
            vec![order[lo], order[hi - 1]]
        };
        lo += 1;
        hi -= group.len() - 1;
        clusters[next] = group;
        if eval.is_feasible(&clusters) {
            next += 1;
        } else {
            clusters[next].clear();
        }
    }
    eval.finalize(clusters)
}

/// Walks the sorted pair list and places each pair of still-free users into
/// the next free cluster if the budget allows. Users of a rejected pair stay
/// available for later pairs.
pub fn correlation_pairing(inst: &Instance) -> Outcome {
    let eval = Evaluator::new(inst);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); inst.n_clusters];
    let mut placed = vec![false; inst.n_users()];
    let mut next = 0;
    for pair in inst.pairs.iter() {
        if next == inst.n_clusters {
            break;
        }
        if placed[pair.first] || placed[pair.second] {
            continue;
        }
        clusters[next] = vec![pair.first, pair.second];
        if eval.is_feasible(&clusters) {
            placed[pair.first] = true;
            placed[pair.second] = true;
            next += 1;
        } else {
            clusters[next].clear();
        }
    }
    if inst.n_users() == 1 {
        clusters[0] = vec![0];
        if !eval.is_feasible(&clusters) {
            clusters[0].clear();
        }
    }
    eval.finalize(clusters)
}
