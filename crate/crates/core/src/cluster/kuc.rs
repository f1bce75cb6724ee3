//! K-means++ over collinearity profiles followed by budget-driven pruning.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, Instance, Outcome};
use crate::correlation::CollinearityMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KucParams {
    /// Cap on Lloyd iterations.
    pub max_iters: usize,
}

impl Default for KucParams {
    fn default() -> Self {
        KucParams { max_iters: 100 }
    }
}

/// Centroids in collinearity-row space and the membership they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct KmeansState {
    pub centroids: Vec<Vec<f64>>,
    pub membership: Vec<usize>,
    /// Squared distance of each user to its centroid.
    pub nearest_sq: Vec<f64>,
    pub iterations: usize,
}

impl KmeansState {
    /// Members of each of the `centroids.len()` clusters, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.centroids.len()];
        for (u, &k) in self.membership.iter().enumerate() {
            out[k].push(u);
        }
        out
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// D²-weighting: selection probability proportional to each squared
/// distance. All-zero distances fall back to a uniform draw.
pub fn kmeans_pp_probabilities(d_sq: &[f64]) -> Vec<f64> {
    let total: f64 = d_sq.iter().sum();
    if total > 0.0 {
        d_sq.iter().map(|d| d / total).collect()
    } else {
        vec![1.0 / d_sq.len() as f64; d_sq.len()]
    }
}

fn draw(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc && *p > 0.0 {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn seed_centroids(c: &CollinearityMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = c.n_users();
    let mut centroids = vec![c.row(rng.random_range(0..n)).to_vec()];
    let mut d_sq: Vec<f64> = (0..n).map(|u| sq_dist(c.row(u), &centroids[0])).collect();
    while centroids.len() < k {
        let pick = draw(&kmeans_pp_probabilities(&d_sq), rng);
        let row = c.row(pick).to_vec();
        for (u, d) in d_sq.iter_mut().enumerate() {
            *d = d.min(sq_dist(c.row(u), &row));
        }
        centroids.push(row);
    }
    centroids
}

/// Nearest centroid per user (ties to the lower index) and the squared
/// distance to it.
pub fn lloyd_assign(c: &CollinearityMatrix, centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    (0..c.n_users())
        .map(|u| {
            centroids
                .iter()
                .enumerate()
                .map(|(k, mu)| (k, sq_dist(c.row(u), mu)))
                .fold(
                    (0, f64::INFINITY),
                    |best, cur| if cur.1 < best.1 { cur } else { best },
                )
        })
        .unzip()
}

fn update_centroids(c: &CollinearityMatrix, state: &mut KmeansState) {
    let n = c.n_users();
    let k = state.centroids.len();
    let mut sums = vec![vec![0.0; n]; k];
    let mut counts = vec![0usize; k];
    for (u, &m) in state.membership.iter().enumerate() {
        counts[m] += 1;
        for (s, x) in sums[m].iter_mut().zip(c.row(u)) {
            *s += x;
        }
    }
    for m in 0..k {
        if counts[m] > 0 {
            let inv = 1.0 / counts[m] as f64;
            state.centroids[m] = sums[m].iter().map(|s| s * inv).collect();
        }
    }
    // Empty clusters take the user farthest from its centroid, provided that
    // user does not leave its own cluster empty.
    for m in 0..k {
        if counts[m] > 0 {
            continue;
        }
        let donor = (0..n)
            .filter(|&u| counts[state.membership[u]] > 1)
            .max_by(|&a, &b| {
                state.nearest_sq[a]
                    .total_cmp(&state.nearest_sq[b])
                    .then(b.cmp(&a))
            });
        if let Some(u) = donor {
            counts[state.membership[u]] -= 1;
            counts[m] = 1;
            state.membership[u] = m;
            state.nearest_sq[u] = 0.0;
            state.centroids[m] = c.row(u).to_vec();
        }
    }
}

/// K-means++ seeding then Lloyd iterations until membership settles.
pub fn kmeans(c: &CollinearityMatrix, k: usize, max_iters: usize, seed: u64) -> KmeansState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroids = seed_centroids(c, k, &mut rng);
    let (membership, nearest_sq) = lloyd_assign(c, &centroids);
    let mut state = KmeansState {
        centroids,
        membership,
        nearest_sq,
        iterations: 0,
    };
    while state.iterations < max_iters {
        update_centroids(c, &mut state);
        let (membership, nearest_sq) = lloyd_assign(c, &state.centroids);
        state.iterations += 1;
        let settled = membership == state.membership;
        state.membership = membership;
        state.nearest_sq = nearest_sq;
        if settled {
            break;
        }
    }
    state
}

pub fn kuc(inst: &Instance, params: &KucParams, seed: u64) -> Result<Outcome> {
    let n = inst.n_users();
    if n < inst.n_clusters {
        return Err(Error::DegenerateInstance(format!(
            "{n} users cannot fill {} clusters",
            inst.n_clusters
        )));
    }
    let state = kmeans(&inst.collinearity, inst.n_clusters, params.max_iters, seed);
    let eval = Evaluator::new(inst);
    let clusters = eval.prune_weakest_first(state.clusters());
    Ok(eval.finalize(clusters))
}
