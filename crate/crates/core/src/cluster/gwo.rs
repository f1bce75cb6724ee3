//! Grey-wolf search over continuous per-user cluster affinities.
//!
//! A wolf is a vector `x` in `[0, M)^N`; user `u` goes to cluster
//! `floor(x[u])`. Decoding prunes the weakest users until the clustering fits
//! the budget, so every decoded wolf is feasible and pruned users count as
//! non-allocated.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Evaluator, Instance, Outcome};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwoParams {
    pub pop_size: usize,
    pub max_iters: usize,
    /// Cost per non-allocated user.
    pub penalty: f64,
    /// Cost per watt above the budget.
    pub penalty_power: f64,
}

impl Default for GwoParams {
    fn default() -> Self {
        GwoParams {
            pop_size: 20,
            max_iters: 100,
            penalty: 1.0,
            penalty_power: 10.0,
        }
    }
}

/// Population, fitness and best-so-far leaders.
#[derive(Debug, Clone, PartialEq)]
pub struct GwoState {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    /// Alpha, beta and delta positions.
    pub leaders: [Vec<f64>; 3],
    pub leader_fitness: [f64; 3],
    pub a: f64,
    pub iteration: usize,
}

impl GwoState {
    /// `a = 2 (1 - t / max_iters)`.
    pub fn schedule(iteration: usize, max_iters: usize) -> f64 {
        if max_iters == 0 {
            return 0.0;
        }
        2.0 * (1.0 - iteration as f64 / max_iters as f64)
    }

    /// Offers a scored wolf to the leader board, keeping it sorted.
    fn offer(&mut self, position: &[f64], fit: f64) {
        let Some(slot) = self.leader_fitness.iter().position(|&f| fit > f) else {
            return;
        };
        for i in (slot + 1..3).rev() {
            self.leader_fitness[i] = self.leader_fitness[i - 1];
            self.leaders[i] = self.leaders[i - 1].clone();
        }
        self.leader_fitness[slot] = fit;
        self.leaders[slot] = position.to_vec();
    }
}

/// Alpha fitness after initialization and after every iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GwoTrace {
    pub alpha_fitness: Vec<f64>,
}

/// `served - penalty * non_alloc - penalty_power * max(0, total - p_max)`.
pub fn fitness(served: usize, non_alloc: usize, total_power: f64, p_max: f64, params: &GwoParams) -> f64 {
    let excess = (total_power - p_max).max(0.0);
    served as f64 - non_alloc as f64 * params.penalty - params.penalty_power * excess
}

fn label(x: f64, n_clusters: usize) -> usize {
    if x.is_finite() && x > 0.0 {
        (x.floor() as usize).min(n_clusters - 1)
    } else {
        0
    }
}

/// Maps affinities to clusters (`floor`, clamped to `[0, n_clusters - 1]`).
pub fn decode_position(position: &[f64], n_clusters: usize) -> Vec<Vec<usize>> {
    let mut clusters = vec![Vec::new(); n_clusters];
    for (u, &x) in position.iter().enumerate() {
        clusters[label(x, n_clusters)].push(u);
    }
    clusters
}

/// Fitness depends only on the decoded labels, so scores are memoized by
/// label vector.
struct Scorer<'e, 'a> {
    eval: &'e Evaluator<'a>,
    params: &'e GwoParams,
    memo: HashMap<Vec<u16>, f64>,
}

impl Scorer<'_, '_> {
    fn score(&mut self, position: &[f64]) -> f64 {
        let m = self.eval.instance().n_clusters;
        let labels: Vec<u16> = position.iter().map(|&x| label(x, m) as u16).collect();
        if let Some(&f) = self.memo.get(&labels) {
            return f;
        }
        let f = score(self.eval, position, self.params);
        self.memo.insert(labels, f);
        f
    }
}

fn score(eval: &Evaluator<'_>, position: &[f64], params: &GwoParams) -> f64 {
    let inst = eval.instance();
    let clusters = eval.prune_weakest_first(decode_position(position, inst.n_clusters));
    let e = eval.evaluate(&clusters);
    let served: usize = clusters.iter().map(Vec::len).sum();
    let total = if e.total.is_finite() { e.total } else { 0.0 };
    fitness(served, inst.n_users() - served, total, inst.p_max, params)
}

pub fn gwo(inst: &Instance, params: &GwoParams, seed: u64) -> Outcome {
    gwo_traced(inst, params, seed).0
}

/// Like [`gwo`], also returning the alpha fitness history.
pub fn gwo_traced(inst: &Instance, params: &GwoParams, seed: u64) -> (Outcome, GwoTrace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eval = Evaluator::new(inst);
    let mut scorer = Scorer {
        eval: &eval,
        params,
        memo: HashMap::new(),
    };
    let n = inst.n_users();
    let upper = inst.n_clusters as f64;
    let top = upper - upper * f64::EPSILON;
    let pop = params.pop_size.max(3);

    let positions: Vec<Vec<f64>> = (0..pop)
        .map(|_| (0..n).map(|_| rng.random_range(0.0..upper)).collect())
        .collect();
    let mut state = GwoState {
        fitness: positions.iter().map(|x| scorer.score(x)).collect(),
        positions,
        leaders: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        leader_fitness: [f64::NEG_INFINITY; 3],
        a: GwoState::schedule(0, params.max_iters),
        iteration: 0,
    };
    for w in 0..pop {
        let (x, f) = (state.positions[w].clone(), state.fitness[w]);
        state.offer(&x, f);
    }
    let mut trace = GwoTrace {
        alpha_fitness: vec![state.leader_fitness[0]],
    };

    while state.iteration < params.max_iters {
        let a = GwoState::schedule(state.iteration, params.max_iters);
        state.a = a;
        for w in 0..pop {
            for d in 0..n {
                let x = state.positions[w][d];
                let mut guided = 0.0;
                for leader in &state.leaders {
                    let r1: f64 = rng.random();
                    let r2: f64 = rng.random();
                    let big_a = 2.0 * a * r1 - a;
                    let big_c = 2.0 * r2;
                    let dist = (big_c * leader[d] - x).abs();
                    guided += leader[d] - big_a * dist;
                }
                state.positions[w][d] = (guided / 3.0).clamp(0.0, top);
            }
        }
        for w in 0..pop {
            let f = scorer.score(&state.positions[w]);
            state.fitness[w] = f;
            let x = state.positions[w].clone();
            state.offer(&x, f);
        }
        state.iteration += 1;
        trace.alpha_fitness.push(state.leader_fitness[0]);
    }

    let clusters = eval.prune_weakest_first(decode_position(&state.leaders[0], inst.n_clusters));
    (eval.finalize(clusters), trace)
}
