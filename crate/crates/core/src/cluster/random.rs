use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, Instance, Outcome};

/// Shuffles the users and drops each into a uniformly drawn cluster, keeping
/// the addition only if the clustering still fits the budget.
pub fn random_clustering(inst: &Instance, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eval = Evaluator::new(inst);
    let mut order: Vec<usize> = (0..inst.n_users()).collect();
    order.shuffle(&mut rng);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); inst.n_clusters];
    for u in order {
        let k = rng.random_range(0..inst.n_clusters);
        clusters[k].push(u);
        if !eval.is_feasible(&clusters) {
            clusters[k].pop();
        }
    }
    eval.finalize(clusters)
}
