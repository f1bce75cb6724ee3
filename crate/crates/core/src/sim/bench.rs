//! Wall-clock timing of each algorithm per sweep point.

use std::io::Write;
use std::time::Instant;

use super::config::ScenarioConfig;
use super::sweep::{algorithm_seed, build_instance, sweep_points, trial_seed};
use crate::cluster::{run, Algorithm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub n_users: usize,
    pub n_clusters: usize,
    pub reps: usize,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Times `bench_reps` runs per (algorithm, point), each on a fresh channel
/// realization. Runs are sequential so timings do not compete for cores.
pub fn run_bench(config: &ScenarioConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for point in sweep_points(config) {
        let instances = (0..config.bench_reps)
            .map(|r| {
                let seed = trial_seed(config.seed, point.key(), r as u64);
                build_instance(config, point, seed).map(|i| (i, seed))
            })
            .collect::<Result<Vec<_>>>()?;
        for &algorithm in &config.algorithms {
            let mut times = Vec::with_capacity(instances.len());
            for (inst, seed) in &instances {
                let start = Instant::now();
                match run(algorithm, inst, &config.params, algorithm_seed(*seed)) {
                    Ok(_) | Err(Error::DegenerateInstance(_)) => {}
                    Err(e) => return Err(e),
                }
                times.push(start.elapsed().as_secs_f64() * 1e3);
            }
            let min_ms = times.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_ms = times.iter().cloned().fold(0.0, f64::max);
            rows.push(BenchRow {
                algorithm,
                n_users: point.n_users,
                n_clusters: point.n_clusters,
                reps: times.len(),
                median_ms: median(&mut times),
                min_ms,
                max_ms,
            });
        }
    }
    Ok(rows)
}

pub fn write_bench<W: Write>(w: W, rows: &[BenchRow]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    wr.write_record([
        "algorithm",
        "n_users",
        "n_clusters",
        "reps",
        "median_ms",
        "min_ms",
        "max_ms",
    ])?;
    for r in rows {
        wr.write_record([
            r.algorithm.name().to_string(),
            r.n_users.to_string(),
            r.n_clusters.to_string(),
            r.reps.to_string(),
            format!("{:.3}", r.median_ms),
            format!("{:.3}", r.min_ms),
            format!("{:.3}", r.max_ms),
        ])?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}
