//! Monte-Carlo sweeps over user and cluster counts.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::ScenarioConfig;
use crate::channel::{generate_channels, ChannelParams};
use crate::cluster::{run, Algorithm, Instance, Outcome};
use crate::error::{Error, Result};
use crate::metrics::MetricsRecord;

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `mix64(mix64(mix64(master) ^ sweep) ^ trial)`: seed of one trial.
pub fn trial_seed(master: u64, sweep_index: u64, trial_index: u64) -> u64 {
    mix64(mix64(mix64(master) ^ sweep_index) ^ trial_index)
}

/// Seed handed to stochastic clustering, kept apart from the channel stream.
pub fn algorithm_seed(trial_seed: u64) -> u64 {
    mix64(trial_seed ^ 0xA5A5_A5A5_A5A5_A5A5)
}

/// One (user count, cluster count) combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepPoint {
    /// Position in the sweep.
    pub index: usize,
    pub n_users: usize,
    pub n_clusters: usize,
}

impl SweepPoint {
    /// Seed-stream identity of the point, `(n_clusters << 32) | n_users`.
    /// It depends on the point itself, not its position, so adding or
    /// reordering sweep values leaves other points' trials unchanged.
    pub fn key(&self) -> u64 {
        ((self.n_clusters as u64) << 32) | self.n_users as u64
    }
}

/// Cluster counts outermost, user counts innermost.
pub fn sweep_points(config: &ScenarioConfig) -> Vec<SweepPoint> {
    config
        .n_clusters
        .iter()
        .flat_map(|&m| config.n_users.iter().map(move |&n| (n, m)))
        .enumerate()
        .map(|(index, (n_users, n_clusters))| SweepPoint {
            index,
            n_users,
            n_clusters,
        })
        .collect()
}

/// One raw CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub n_users: usize,
    pub n_clusters: usize,
    pub trial: usize,
    pub served_users: usize,
    pub total_power_w: f64,
    pub sum_rate_bps: f64,
    pub energy_efficiency_bpj: f64,
    pub runtime_ms: f64,
    pub seed: u64,
}

pub const ROW_HEADER: [&str; 10] = [
    "algorithm",
    "n_users",
    "n_clusters",
    "trial",
    "served_users",
    "total_power_w",
    "sum_rate_bps",
    "energy_efficiency_bpj",
    "runtime_ms",
    "seed",
];

impl ResultRow {
    fn record(&self) -> [String; 10] {
        [
            self.algorithm.name().to_string(),
            self.n_users.to_string(),
            self.n_clusters.to_string(),
            self.trial.to_string(),
            self.served_users.to_string(),
            self.total_power_w.to_string(),
            self.sum_rate_bps.to_string(),
            self.energy_efficiency_bpj.to_string(),
            self.runtime_ms.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Mean and standard error of one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

impl Stat {
    /// Sample mean and `s / sqrt(n)` with the `n - 1` variance; zero spread
    /// for a single sample.
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        if values.is_empty() {
            return Stat {
                mean: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        if values.len() < 2 {
            return Stat { mean, se: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Stat {
            mean,
            se: (var / n).sqrt(),
        }
    }
}

/// Aggregates of one (algorithm, sweep point).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub n_users: usize,
    pub n_clusters: usize,
    pub trials: usize,
    pub served_users: Stat,
    pub total_power_w: Stat,
    pub sum_rate_bps: Stat,
    pub energy_efficiency_bpj: Stat,
    pub runtime_ms: Stat,
}

pub const SUMMARY_HEADER: [&str; 14] = [
    "algorithm",
    "n_users",
    "n_clusters",
    "trials",
    "served_mean",
    "served_se",
    "power_mean_w",
    "power_se_w",
    "sum_rate_mean_bps",
    "sum_rate_se_bps",
    "ee_mean_bpj",
    "ee_se_bpj",
    "runtime_mean_ms",
    "runtime_se_ms",
];

impl SummaryRow {
    fn record(&self) -> Vec<String> {
        let mut r = vec![
            self.algorithm.name().to_string(),
            self.n_users.to_string(),
            self.n_clusters.to_string(),
            self.trials.to_string(),
        ];
        for s in [
            self.served_users,
            self.total_power_w,
            self.sum_rate_bps,
            self.energy_efficiency_bpj,
            self.runtime_ms,
        ] {
            r.push(s.mean.to_string());
            r.push(s.se.to_string());
        }
        r
    }
}

/// Raw rows in (sweep point, trial, algorithm) order plus their aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    /// Runs that failed (for example too few users for the cluster count).
    pub skipped: Vec<String>,
}

impl SweepResult {
    /// Summary row for `(algorithm, n_users, n_clusters)`.
    pub fn point(&self, algorithm: Algorithm, n_users: usize, n_clusters: usize) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.algorithm == algorithm && s.n_users == n_users && s.n_clusters == n_clusters)
    }
}

/// Channel realization and problem instance of one trial.
pub fn build_instance(config: &ScenarioConfig, point: SweepPoint, seed: u64) -> Result<Instance> {
    let params = ChannelParams {
        n_tx_antennas: point.n_clusters,
        seed,
        ..config.channel.clone()
    };
    let channels = generate_channels(&params, point.n_users)?;
    let mut inst = Instance::new(
        channels,
        config.thresholds(point.n_users),
        config.noise_power_w,
        config.p_max_w,
        point.n_clusters,
    )?;
    inst.control = config.control;
    Ok(inst)
}

/// Runs one algorithm on one instance and packages the metrics.
pub fn evaluate_run(
    config: &ScenarioConfig,
    inst: &Instance,
    algorithm: Algorithm,
    seed: u64,
) -> Result<(Outcome, MetricsRecord, f64)> {
    let start = Instant::now();
    let outcome = run(algorithm, inst, &config.params, algorithm_seed(seed))?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let metrics = MetricsRecord::new(&outcome.solution, outcome.served_users(), config.bandwidth_hz);
    Ok((outcome, metrics, elapsed))
}

type TrialOutput = (Vec<ResultRow>, Vec<String>);

fn run_trial(config: &ScenarioConfig, point: SweepPoint, trial: usize) -> Result<TrialOutput> {
    let seed = trial_seed(config.seed, point.key(), trial as u64);
    let inst = build_instance(config, point, seed)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &algorithm in &config.algorithms {
        match evaluate_run(config, &inst, algorithm, seed) {
            Ok((_, m, elapsed)) => rows.push(ResultRow {
                algorithm,
                n_users: point.n_users,
                n_clusters: point.n_clusters,
                trial,
                served_users: m.served_users,
                total_power_w: m.total_power_w,
                sum_rate_bps: m.sum_rate_bps,
                energy_efficiency_bpj: m.energy_efficiency_bpj,
                runtime_ms: if config.timing { elapsed } else { 0.0 },
                seed,
            }),
            Err(Error::DegenerateInstance(why)) => skipped.push(format!(
                "{algorithm} n_users={} n_clusters={} trial={trial}: {why}",
                point.n_users, point.n_clusters
            )),
            Err(e) => return Err(e),
        }
    }
    Ok((rows, skipped))
}

/// Worker count: `NOMA_LAB_THREADS` if set and positive, else all cores.
pub fn worker_count() -> usize {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var("NOMA_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(cores)
}

/// Runs `f` on a pool capped by [`worker_count`].
pub(crate) fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::invalid("NOMA_LAB_THREADS", e.to_string()))?;
    Ok(pool.install(f))
}

/// Every (sweep point, trial) is independent; results are gathered in order.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult> {
    config.validate()?;
    let tasks: Vec<(SweepPoint, usize)> = sweep_points(config)
        .into_iter()
        .flat_map(|p| (0..config.trials).map(move |t| (p, t)))
        .collect();
    let outputs: Vec<Result<TrialOutput>> =
        with_pool(|| tasks.par_iter().map(|&(p, t)| run_trial(config, p, t)).collect())?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for out in outputs {
        let (r, s) = out?;
        rows.extend(r);
        skipped.extend(s);
    }
    let summary = summarize(config, &rows);
    Ok(SweepResult {
        rows,
        summary,
        skipped,
    })
}

/// Mean and standard error per (algorithm, sweep point) from raw rows.
pub fn summarize(config: &ScenarioConfig, rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for point in sweep_points(config) {
        for &algorithm in &config.algorithms {
            let sel: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| {
                    r.algorithm == algorithm && r.n_users == point.n_users && r.n_clusters == point.n_clusters
                })
                .collect();
            if sel.is_empty() {
                continue;
            }
            let stat = |f: fn(&ResultRow) -> f64| Stat::of(&sel.iter().map(|r| f(r)).collect::<Vec<_>>());
            out.push(SummaryRow {
                algorithm,
                n_users: point.n_users,
                n_clusters: point.n_clusters,
                trials: sel.len(),
                served_users: stat(|r| r.served_users as f64),
                total_power_w: stat(|r| r.total_power_w),
                sum_rate_bps: stat(|r| r.sum_rate_bps),
                energy_efficiency_bpj: stat(|r| r.energy_efficiency_bpj),
                runtime_ms: stat(|r| r.runtime_ms),
            });
        }
    }
    out
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_rows<W: Write>(w: W, rows: &[ResultRow]) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(ROW_HEADER)?;
    for r in rows {
        wr.write_record(r.record())?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_summary<W: Write>(w: W, summary: &[SummaryRow]) -> Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(SUMMARY_HEADER)?;
    for s in summary {
        wr.write_record(s.record())?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Parses raw rows back from CSV.
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize| {
            Error::config(
                ROW_HEADER[i],
                format!("bad value `{}` in {}", field(i), path.display()),
            )
        };
        let int = |i: usize| field(i).parse::<usize>().map_err(|_| bad(i));
        let real = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
        rows.push(ResultRow {
            algorithm: field(0).parse()?,
            n_users: int(1)?,
            n_clusters: int(2)?,
            trial: int(3)?,
            served_users: int(4)?,
            total_power_w: real(5)?,
            sum_rate_bps: real(6)?,
            energy_efficiency_bpj: real(7)?,
            runtime_ms: real(8)?,
            seed: field(9).parse().map_err(|_| bad(9))?,
        });
    }
    Ok(rows)
}

/// Path of the aggregate file written next to `raw`: `x.csv` -> `x.summary.csv`.
pub fn summary_path(raw: &Path) -> std::path::PathBuf {
    let stem = raw
        .file_stem()
        .map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
    raw.with_file_name(format!("{stem}.summary.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
        assert_ne!(trial_seed(1, 2, 3), trial_seed(1, 3, 2));
        assert_ne!(trial_seed(0, 0, 0), trial_seed(0, 0, 1));
        // Reference value of the splitmix64 finalizer on 0.
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn standard_error() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(Stat::of(&[7.0]).se, 0.0);
    }

    #[test]
    fn points_order() {
        let c = ScenarioConfig::parse("n_users = 10, 20\nn_clusters = 2, 3").unwrap();
        let p: Vec<(usize, usize)> = sweep_points(&c)
            .iter()
            .map(|p| (p.n_users, p.n_clusters))
            .collect();
        assert_eq!(p, vec![(10, 2), (20, 2), (10, 3), (20, 3)]);
    }
}
