use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::beamforming::{representative, stack_rows, zf_precode, BeamformerSet};
use crate::cluster::{ClusterAssignment, Instance, Outcome};
use crate::power::{
    cluster_coefficients, last_user_coefficients, min_power_from_coefficients, run_power_control,
    ClusterPowerCoefficients, MinPower, PowerSolution, SinrModel,
};

const CACHE_LIMIT: usize = 20_000;

/// A candidate clustering after beamforming and minimum-power allocation.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// Clusters in SIC decoding order (descending `c * g`).
    pub clusters: Vec<Vec<usize>>,
    pub representatives: Vec<Option<usize>>,
    pub model: SinrModel,
    /// Minimum total power; infinite when no finite allocation exists.
    pub total: f64,
    pub feasible: bool,
}

/// Evaluates clusterings of one instance, caching beams by representative set.
pub struct Evaluator<'a> {
    inst: &'a Instance,
    cache: RefCell<HashMap<Vec<usize>, Option<Rc<BeamformerSet>>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Evaluator {
            inst,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    /// Beams for the representatives of the non-empty clusters, in order.
    fn beams(&self, reps: &[usize]) -> Option<Rc<BeamformerSet>> {
        if let Some(hit) = self.cache.borrow().get(reps) {
            return hit.clone();
        }
        let rows: Vec<&[_]> = reps.iter().map(|&r| self.inst.channels.vector(r)).collect();
        let beams = zf_precode(&stack_rows(&rows)).ok().map(Rc::new);
        let mut cache = self.cache.borrow_mut();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(reps.to_vec(), beams.clone());
        beams
    }

    /// Collinearity-to-representative and effective gain of every served
    /// user; `None` if the beams cannot be formed.
    fn user_model(&self, clusters: &[Vec<usize>], reps: &[Option<usize>]) -> Option<SinrModel> {
        let n = self.inst.n_users();
        let mut model = SinrModel {
            gamma_th: self.inst.gamma_th.clone(),
            noise_power: self.inst.noise_power,
            collinearity: vec![1.0; n],
            gain: vec![0.0; n],
        };
        let active: Vec<usize> = reps.iter().flatten().copied().collect();
        if active.is_empty() {
            return Some(model);
        }
        let beams = self.beams(&active)?;
        let mut beam = 0;
        for (members, rep) in clusters.iter().zip(reps) {
            let Some(rep) = *rep else { continue };
            for &u in members {
                model.collinearity[u] = if u == rep {
                    1.0
                } else {
                    self.inst.collinearity.get(u, rep)
                };
                model.gain[u] = beams.effective_gain(self.inst.channels.vector(u), beam);
            }
            beam += 1;
        }
        Some(model)
    }

    fn strength(model: &SinrModel, u: usize) -> f64 {
        model.collinearity[u] * model.gain[u]
    }

    fn sort_decoding(model: &SinrModel, members: &mut [usize]) {
        members.sort_by(|&a, &b| {
            Self::strength(model, b)
                .total_cmp(&Self::strength(model, a))
                .then(a.cmp(&b))
        });
    }

    fn usable(model: &SinrModel, members: &[usize]) -> bool {
        members.iter().all(|&u| {
            let s = Self::strength(model, u);
            s > 0.0 && s.is_finite()
        })
    }

    /// Full evaluation of `clusters` (one entry per slot, possibly empty).
    pub fn evaluate(&self, clusters: &[Vec<usize>]) -> Evaluation {
        let reps: Vec<Option<usize>> = clusters
            .iter()
            .map(|m| representative(m, &self.inst.collinearity))
            .collect();
        let mut ordered = clusters.to_vec();
        let Some(model) = self.user_model(clusters, &reps) else {
            return self.failed(ordered, reps);
        };
        for members in ordered.iter_mut() {
            Self::sort_decoding(&model, members);
        }
        if !ordered.iter().all(|m| Self::usable(&model, m)) {
            return self.failed_with(ordered, reps, model);
        }
        let total = match min_power_from_coefficients(cluster_coefficients(&ordered, &model)) {
            Ok(min) => min.total,
            Err(_) => f64::INFINITY,
        };
        Evaluation {
            clusters: ordered,
            representatives: reps,
            model,
            total,
            feasible: total.is_finite() && total <= self.inst.p_max,
        }
    }

    fn failed(&self, clusters: Vec<Vec<usize>>, reps: Vec<Option<usize>>) -> Evaluation {
        let n = self.inst.n_users();
        let model = SinrModel {
            gamma_th: self.inst.gamma_th.clone(),
            noise_power: self.inst.noise_power,
            collinearity: vec![1.0; n],
            gain: vec![0.0; n],
        };
        self.failed_with(clusters, reps, model)
    }

    fn failed_with(
        &self,
        clusters: Vec<Vec<usize>>,
        reps: Vec<Option<usize>>,
        model: SinrModel,
    ) -> Evaluation {
        Evaluation {
            clusters,
            representatives: reps,
            model,
            total: f64::INFINITY,
            feasible: false,
        }
    }

    pub fn is_feasible(&self, clusters: &[Vec<usize>]) -> bool {
        self.evaluate(clusters).feasible
    }

    /// Evicts users until the clustering fits the power budget, each time
    /// dropping the weakest (lowest `c * g`) member of the cluster whose
    /// weakest member is the most expensive. Beams are rebuilt only when a
    /// representative itself is evicted.
    pub fn prune_weakest_first(&self, clusters: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let c = &self.inst.collinearity;
        let mut clusters = clusters;
        let mut reps: Vec<Option<usize>> = clusters.iter().map(|m| representative(m, c)).collect();

        'beams: loop {
            let Some(model) = self.user_model(&clusters, &reps) else {
                // Beams could not be formed: drop the weakest member of the
                // smallest cluster and retry.
                let k = (0..clusters.len())
                    .filter(|&k| !clusters[k].is_empty())
                    .min_by_key(|&k| (clusters[k].len(), k))
                    .expect("a failed beam set has clusters");
                let gain = |u: usize| self.inst.channels.gain(u);
                let victim = *clusters[k]
                    .iter()
                    .min_by(|&&a, &&b| gain(a).total_cmp(&gain(b)).then(a.cmp(&b)))
                    .unwrap();
                clusters[k].retain(|&u| u != victim);
                reps[k] = representative(&clusters[k], c);
                continue;
            };
            for members in clusters.iter_mut() {
                Self::sort_decoding(&model, members);
            }
            let mut coeffs = self.coefficients_of(&clusters, &model);
            loop {
                let min = min_power_from_coefficients(coeffs.clone()).ok();
                let feasible = min
                    .as_ref()
                    .is_some_and(|p| p.total.is_finite() && p.total <= self.inst.p_max);
                if feasible || clusters.iter().all(Vec::is_empty) {
                    break 'beams;
                }
                let (k, victim) = Self::costliest(&clusters, &model, &coeffs, min.as_ref());
                clusters[k].pop();
                // Representatives stay fixed while bulk pruning unless one is
                // evicted; the check below settles any drift.
                if reps[k] == Some(victim) {
                    reps[k] = representative(&clusters[k], c);
                    continue 'beams;
                }
                let one = self.coefficients_of(std::slice::from_ref(&clusters[k]), &model);
                coeffs.alpha[k] = one.alpha[0];
                coeffs.beta[k] = one.beta[0];
            }
        }

        // Confirm with a fresh evaluation and the true representatives.
        loop {
            let e = self.evaluate(&clusters);
            if e.feasible || clusters.iter().all(Vec::is_empty) {
                return e.clusters;
            }
            let coeffs = self.coefficients_of(&e.clusters, &e.model);
            let min = min_power_from_coefficients(coeffs.clone()).ok();
            let (k, victim) = Self::costliest(&e.clusters, &e.model, &coeffs, min.as_ref());
            clusters = e.clusters;
            clusters[k].retain(|&u| u != victim);
        }
    }

    /// The last-decoded (lowest `c * g`) member of the cluster whose last
    /// user needs the most power. Without a finite solution the cluster
    /// with the largest coupling coefficient is chosen.
    fn costliest(
        clusters: &[Vec<usize>],
        model: &SinrModel,
        coeffs: &ClusterPowerCoefficients,
        min: Option<&MinPower>,
    ) -> (usize, usize) {
        let cost = |k: usize| -> f64 {
            let (a, b) = last_user_coefficients(&clusters[k], model);
            if !a.is_finite() {
                return f64::INFINITY;
            }
            match min {
                Some(p) if p.total.is_finite() => a + b * (p.total - p.cluster_totals[k]),
                _ => coeffs.beta[k],
            }
        };
        let k = (0..clusters.len())
            .filter(|&k| !clusters[k].is_empty())
            .map(|k| (k, cost(k)))
            .fold(None, |best: Option<(usize, f64)>, (k, c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((k, c)),
            })
            .expect("an infeasible clustering has members")
            .0;
        (k, *clusters[k].last().unwrap())
    }

    fn coefficients_of(&self, clusters: &[Vec<usize>], model: &SinrModel) -> ClusterPowerCoefficients {
        if clusters.iter().all(|m| Self::usable(model, m)) {
            cluster_coefficients(clusters, model)
        } else {
            // Unusable users make the cluster infinitely expensive.
            let mut co = cluster_coefficients(clusters, model);
            for (k, m) in clusters.iter().enumerate() {
                if !Self::usable(model, m) {
                    co.alpha[k] = f64::INFINITY;
                }
            }
            co
        }
    }

    /// Applies power control to a feasible clustering and packages it.
    /// Infeasible input is pruned first.
    pub fn finalize(&self, clusters: Vec<Vec<usize>>) -> Outcome {
        let mut e = self.evaluate(&clusters);
        if !e.feasible {
            e = self.evaluate(&self.prune_weakest_first(clusters));
        }
        let n = self.inst.n_users();
        let solution = run_power_control(&e.clusters, &e.model, self.inst.p_max, self.inst.control)
            .unwrap_or_else(|_| PowerSolution::minimum(&e.clusters, &e.model, self.inst.p_max));
        Outcome {
            assignment: ClusterAssignment::from_clusters(e.clusters, n),
            solution,
            representatives: e.representatives,
        }
    }
}
