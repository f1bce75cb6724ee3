//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! hard check fails. Trend criteria run on the hotspot scenario.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use noma_lab::beamforming::{pseudo_inverse, zf_precode};
use noma_lab::channel::C64;
use noma_lab::cluster::{run, Algorithm};
use noma_lab::power::{power_control_step, PowerControlState};
use noma_lab::sim::config::ScenarioConfig;
use noma_lab::sim::oracle::{run_oracle, OracleConfig};
use noma_lab::sim::sweep::{run_sweep, write_rows, Stat, SweepResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use Algorithm::{Cia, Gwo, Kuc, NearFar, Random};

const TRIALS: usize = 50;

/// Pairing in the trend criteria is near-far pairing.
const PAIRING: Algorithm = NearFar;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn report(id: &str, name: &str, elapsed: Duration, v: &Verdict) -> bool {
    println!(
        "{} {id} {name} ({:.1} s): {}",
        if v.pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        v.detail
    );
    v.pass
}

fn c1_oracle() -> Verdict {
    let config = OracleConfig::default();
    let r = run_oracle(&config).unwrap();
    verdict(
        r.instances >= 1000 && r.passed(1e-6),
        format!(
            "{} instances, {} feasible, {} disagreements, max deviation {:.2e}, threshold paths {:.2e}",
            r.instances, r.feasible, r.disagreements, r.max_rel_deviation, r.max_threshold_path_deviation
        ),
    )
}

fn c2_feasibility() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    let mut failures = Vec::new();
    for scenario in 0..200u64 {
        let n = rng.random_range(2..=60);
        let m = rng.random_range(1..=8);
        let inst = common::scenario(10_000 + scenario, n, m);
        for alg in Algorithm::ALL {
            match run(alg, &inst, &Default::default(), scenario) {
                Ok(out) => {
                    checked += 1;
                    if let Err(e) = common::check_outcome(&inst, &out) {
                        failures.push(format!("{alg} scenario {scenario}: {e}"));
                    }
                }
                Err(e) if alg == Kuc && n < m => {
                    let _ = e;
                }
                Err(e) => failures.push(format!("{alg} scenario {scenario}: {e}")),
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{checked} solutions checked, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn c3_zero_forcing() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut axiom, mut frob, mut cross) = (0f64, 0f64, 0f64);
    for _ in 0..500 {
        let n_tx = rng.random_range(1..=8);
        let k = rng.random_range(1..=n_tx);
        let h = DMatrix::from_fn(k, n_tx, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let p = pseudo_inverse(&h).unwrap();
        let hp = &h * &p;
        let ph = &p * &h;
        axiom = axiom
            .max((&hp * &h - &h).norm())
            .max((&ph * &p - &p).norm())
            .max((hp.adjoint() - &hp).norm())
            .max((ph.adjoint() - &ph).norm());
        let zf = zf_precode(&h).unwrap();
        frob = frob.max((zf.beams.norm() - 1.0).abs());
        let g = &h * &zf.beams;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    cross = cross.max(g[(i, j)].norm());
                }
            }
        }
    }
    verdict(
        axiom <= 1e-9 && frob <= 1e-12 && cross <= 1e-12,
        format!("axioms {axiom:.1e}, Frobenius {frob:.1e}, cross-terms {cross:.1e} over 500 sets"),
    )
}

fn served(r: &SweepResult, a: Algorithm, n: usize, m: usize) -> Stat {
    r.point(a, n, m).unwrap().served_users
}

/// `a > b` with the gap at least two standard errors of the difference.
fn separated(a: Stat, b: Stat) -> bool {
    a.mean - b.mean >= 2.0 * (a.se * a.se + b.se * b.se).sqrt() && a.mean > b.mean
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target
}

const ORDER: [Algorithm; 5] = [Cia, Gwo, Kuc, Random, PAIRING];

fn trend_config(n_users: Vec<usize>, n_clusters: Vec<usize>) -> ScenarioConfig {
    ScenarioConfig {
        n_users,
        n_clusters,
        algorithms: ORDER.to_vec(),
        trials: TRIALS,
        ..ScenarioConfig::hotspot_scenario()
    }
}

fn describe(r: &SweepResult, n: usize, m: usize, f: impl Fn(&noma_lab::sim::SummaryRow) -> Stat) -> String {
    ORDER
        .iter()
        .map(|&a| {
            let s = f(r.point(a, n, m).unwrap());
            format!("{a} {:.3e}±{:.1e}", s.mean, s.se)
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn c4_served_vs_users(r: &SweepResult) -> Verdict {
    let s: Vec<Stat> = ORDER.iter().map(|&a| served(r, a, 150, 5)).collect();
    let ordered = s.windows(2).all(|w| separated(w[0], w[1]));
    let cap = r
        .rows
        .iter()
        .filter(|x| x.algorithm == PAIRING)
        .all(|x| x.served_users <= 10);
    let trials = r.summary.iter().all(|x| x.trials >= TRIALS);
    let soft_cia = within(s[0].mean, 40.0, 0.3);
    let soft_gwo = within(s[1].mean, 30.0, 0.3);
    verdict(
        ordered && cap && trials,
        format!(
            "served {}; pairing cap {}; soft bands CIA~40 {} GWO~30 {}",
            describe(r, 150, 5, |x| x.served_users),
            if cap { "held" } else { "broken" },
            if soft_cia { "in" } else { "out" },
            if soft_gwo { "in" } else { "out" },
        ),
    )
}

fn c5_served_vs_chains(r: &SweepResult) -> Verdict {
    let ms = [5, 10, 15, 20, 25];
    let mut dips = Vec::new();
    for a in ORDER {
        for w in ms.windows(2) {
            let (lo, hi) = (served(r, a, 100, w[0]), served(r, a, 100, w[1]));
            if hi.mean < lo.mean {
                dips.push(format!(
                    "{a} M={}->{}: {:.2}->{:.2}",
                    w[0], w[1], lo.mean, hi.mean
                ));
            }
        }
    }
    let at25: Vec<f64> = ORDER.iter().map(|&a| served(r, a, 100, 25).mean).collect();
    let ordered = at25.windows(2).all(|w| w[0] > w[1]);
    verdict(
        dips.is_empty() && ordered,
        format!(
            "at M=25 {}; decreases {:?}",
            describe(r, 100, 25, |x| x.served_users),
            dips
        ),
    )
}

fn c6_power(r150: &SweepResult, r300: &SweepResult) -> Verdict {
    let mut problems = Vec::new();
    let mut notes = Vec::new();
    for (r, n) in [(r150, 150), (r300, 300)] {
        let p = |a: Algorithm| r.point(a, n, 5).unwrap().total_power_w;
        let pair = p(PAIRING);
        if ORDER
            .iter()
            .filter(|&&a| a != PAIRING)
            .any(|&a| p(a).mean <= pair.mean)
        {
            problems.push(format!("N={n}: pairing not lowest"));
        }
        if !(pair.mean >= 1e-3 && pair.mean <= 1e-1) {
            problems.push(format!("N={n}: pairing {:.3e} W not of order 0.01 W", pair.mean));
        }
        if !(p(Gwo).mean <= 0.75 * p(Cia).mean) {
            problems.push(format!("N={n}: GWO not 25% below CIA"));
        }
        let cia = p(Cia);
        let highest = ORDER.iter().all(|&a| p(a).mean <= cia.mean);
        let rnd = p(Random);
        let tied = (cia.mean - rnd.mean).abs() <= 2.0 * (cia.se * cia.se + rnd.se * rnd.se).sqrt()
            && ORDER
                .iter()
                .filter(|&&a| a != Random && a != Cia)
                .all(|&a| p(a).mean <= cia.mean.max(rnd.mean));
        if !(highest || tied) {
            problems.push(format!("N={n}: CIA neither highest nor tied with random"));
        }
        notes.push(format!("N={n}: {}", describe(r, n, 5, |x| x.total_power_w)));
    }
    let over = r150
        .rows
        .iter()
        .chain(&r300.rows)
        .filter(|x| x.total_power_w > 1.0)
        .count();
    if over > 0 {
        problems.push(format!("{over} runs above 1 W"));
    }
    verdict(
        problems.is_empty(),
        format!("{}; {:?}", notes.join("; "), problems),
    )
}

fn c7_efficiency(r300: &SweepResult) -> Verdict {
    let order = [PAIRING, Gwo, Cia, Kuc, Random];
    let ee: Vec<f64> = order
        .iter()
        .map(|&a| r300.point(a, 300, 5).unwrap().energy_efficiency_bpj.mean)
        .collect();
    let ordered = ee.windows(2).all(|w| w[0] > w[1]);
    let magnitude = ee[0] >= 8e7 && ee[0] <= 8e9;
    verdict(
        ordered && magnitude,
        format!(
            "EE {}; ordering {}, pairing magnitude {}",
            describe(r300, 300, 5, |x| x.energy_efficiency_bpj),
            if ordered { "held" } else { "broken" },
            if magnitude {
                "within 10x of 8e8"
            } else {
                "outside 10x of 8e8"
            }
        ),
    )
}

fn c8_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("det.cfg");
    let mut config = trend_config(vec![40, 80], vec![3, 5]);
    config.algorithms = Algorithm::ALL.to_vec();
    config.trials = 3;
    config.seed = 8;
    std::fs::write(&cfg, config.to_text()).unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_noma-lab"))
            .env("NOMA_LAB_THREADS", threads)
            .args([
                "run",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    let mut lib = Vec::new();
    write_rows(&mut lib, &run_sweep(&config).unwrap().rows).unwrap();
    let same = outputs[0] == outputs[1] && outputs[0] == lib;
    verdict(
        same,
        format!(
            "{} bytes, CLI runs and library sweep {}",
            lib.len(),
            if same { "identical" } else { "differ" }
        ),
    )
}

fn c9_conservation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0f64;
    for _ in 0..10_000 {
        let m = rng.random_range(2..=25);
        let state = PowerControlState {
            p_max: (0..m).map(|_| 10f64.powf(rng.random_range(-3.0..0.0))).collect(),
            p_min: (0..m).map(|_| 10f64.powf(rng.random_range(-6.0..-1.0))).collect(),
        };
        let before: f64 = state.p_max.iter().sum();
        let after: f64 = power_control_step(&state).iter().sum();
        worst = worst.max((after - before).abs() / before);
    }
    verdict(
        worst <= 1e-12,
        format!("max relative drift {worst:.1e} over 10^4 states"),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    // Exact suites and runtime limits gate the exit status. Statistical
    // trend checks are reported with their verdict but do not.
    let mut exact = true;
    let mut passed = 0;
    let mut tally = |pass: bool| {
        passed += pass as usize;
        pass
    };

    let (v, t) = timed(c1_oracle);
    exact &= tally(report("C1", "oracle equivalence", t, &v)) && t < Duration::from_secs(30);
    let (v, t) = timed(c2_feasibility);
    exact &= tally(report("C2", "SIC feasibility suite", t, &v)) && t < Duration::from_secs(300);
    let (v, t) = timed(c3_zero_forcing);
    exact &= tally(report("C3", "zero-forcing algebra", t, &v)) && t < Duration::from_secs(10);

    let (r150, t150) = timed(|| run_sweep(&trend_config(vec![150], vec![5])).unwrap());
    tally(report(
        "C4",
        "served users vs. users",
        t150,
        &c4_served_vs_users(&r150),
    ));
    exact &= t150 < Duration::from_secs(900);
    let (rm, t) = timed(|| run_sweep(&trend_config(vec![100], vec![5, 10, 15, 20, 25])).unwrap());
    tally(report(
        "C5",
        "served users vs. RF chains",
        t,
        &c5_served_vs_chains(&rm),
    ));
    let (r300, t300) = timed(|| run_sweep(&trend_config(vec![300], vec![5])).unwrap());
    tally(report("C6", "total power", t150 + t300, &c6_power(&r150, &r300)));
    tally(report("C7", "energy efficiency", t300, &c7_efficiency(&r300)));

    let (v, t) = timed(c8_determinism);
    exact &= tally(report("C8", "byte-identical reruns", t, &v));
    let (v, t) = timed(c9_conservation);
    exact &= tally(report("C9", "power-control conservation", t, &v));

    println!("{passed} of 9 criteria passed");
    if exact {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
