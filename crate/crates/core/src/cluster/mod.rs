//! User clustering strategies and the shared allocation pipeline they use.
//!
//! Every strategy produces a [`ClusterAssignment`] and evaluates candidate
//! structures through [`Evaluator`], which picks representatives, builds the
//! zero-forcing beams, derives each user's collinearity and effective gain,
//! orders users for SIC by descending `c * g` and solves for minimum power.

mod assignment;
mod cia;
mod evaluate;
mod gwo;
mod kuc;
mod pairing;
mod random;

use std::fmt;
use std::str::FromStr;

pub use assignment::ClusterAssignment;
pub use cia::cia;
pub use evaluate::{Evaluation, Evaluator};
pub use gwo::{decode_position, fitness, gwo, gwo_traced, GwoParams, GwoState, GwoTrace};
pub use kuc::{kmeans, kmeans_pp_probabilities, kuc, lloyd_assign, KmeansState, KucParams};
pub use pairing::{correlation_pairing, near_far_pairing};
pub use random::random_clustering;

use crate::channel::ChannelSet;
use crate::correlation::{collinearity, sorted_pairs, CollinearityMatrix, SortedPairList};
use crate::error::{Error, Result};
use crate::power::{PowerControlConfig, PowerSolution};

/// Everything a clustering run needs about one channel realization.
#[derive(Debug, Clone)]
pub struct Instance {
    pub channels: ChannelSet,
    pub collinearity: CollinearityMatrix,
    pub pairs: SortedPairList,
    /// Linear SINR threshold per user.
    pub gamma_th: Vec<f64>,
    /// Noise power, watts.
    pub noise_power: f64,
    /// Total transmit power budget, watts.
    pub p_max: f64,
    /// Number of clusters (RF chains).
    pub n_clusters: usize,
    pub control: PowerControlConfig,
}

impl Instance {
    pub fn new(
        channels: ChannelSet,
        gamma_th: Vec<f64>,
        noise_power: f64,
        p_max: f64,
        n_clusters: usize,
    ) -> Result<Self> {
        let collinearity = collinearity(&channels)?;
        Self::with_collinearity(channels, collinearity, gamma_th, noise_power, p_max, n_clusters)
    }

    /// Uses a caller-supplied collinearity matrix instead of the realized one.
    pub fn with_collinearity(
        channels: ChannelSet,
        collinearity: CollinearityMatrix,
        gamma_th: Vec<f64>,
        noise_power: f64,
        p_max: f64,
        n_clusters: usize,
    ) -> Result<Self> {
        let n = channels.n_users();
        if collinearity.n_users() != n {
            return Err(Error::invalid("collinearity", "size differs from user count"));
        }
        if gamma_th.len() != n {
            return Err(Error::invalid("gamma_th", "need one threshold per user"));
        }
        if gamma_th.iter().any(|g| !(*g > 0.0)) {
            return Err(Error::invalid("gamma_th", "thresholds must be positive"));
        }
        if !(noise_power > 0.0) {
            return Err(Error::invalid("noise_power", "must be positive"));
        }
        if !(p_max > 0.0) {
            return Err(Error::invalid("p_max", "must be positive"));
        }
        if n_clusters == 0 {
            return Err(Error::invalid("n_clusters", "must be at least 1"));
        }
        if n_clusters > channels.n_tx() {
            return Err(Error::TooManyClusters {
                clusters: n_clusters,
                antennas: channels.n_tx(),
            });
        }
        let pairs = sorted_pairs(&collinearity);
        Ok(Instance {
            channels,
            collinearity,
            pairs,
            gamma_th,
            noise_power,
            p_max,
            n_clusters,
            control: PowerControlConfig::default(),
        })
    }

    pub fn n_users(&self) -> usize {
        self.channels.n_users()
    }
}

/// Final clustering plus the controlled power allocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub assignment: ClusterAssignment,
    pub solution: PowerSolution,
    /// Representative per cluster slot (`None` for empty slots).
    pub representatives: Vec<Option<usize>>,
}

impl Outcome {
    pub fn served_users(&self) -> usize {
        self.assignment.served_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    NearFar,
    CorrPair,
    Random,
    Cia,
    Kuc,
    Gwo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::NearFar,
        Algorithm::CorrPair,
        Algorithm::Random,
        Algorithm::Cia,
        Algorithm::Kuc,
        Algorithm::Gwo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::NearFar => "near_far",
            Algorithm::CorrPair => "corr_pair",
            Algorithm::Random => "random",
            Algorithm::Cia => "cia",
            Algorithm::Kuc => "kuc",
            Algorithm::Gwo => "gwo",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "algorithm",
                    format!(
                        "unknown algorithm `{s}` (expected near_far, corr_pair, random, cia, kuc or gwo)"
                    ),
                )
            })
    }
}

/// Tunables of the stochastic strategies.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgorithmParams {
    pub gwo: GwoParams,
    pub kuc: KucParams,
}

/// Runs `algorithm` on `instance`. `seed` drives the stochastic strategies.
pub fn run(
    algorithm: Algorithm,
    instance: &Instance,
    params: &AlgorithmParams,
    seed: u64,
) -> Result<Outcome> {
    Ok(match algorithm {
        Algorithm::NearFar => near_far_pairing(instance),
        Algorithm::CorrPair => correlation_pairing(instance),
        Algorithm::Random => random_clustering(instance, seed),
        Algorithm::Cia => cia(instance),
        Algorithm::Kuc => kuc(instance, &params.kuc, seed)?,
        Algorithm::Gwo => gwo(instance, &params.gwo, seed),
    })
}
