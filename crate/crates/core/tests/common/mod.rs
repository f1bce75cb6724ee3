#![allow(dead_code)]

use noma_lab::beamforming::{select_representatives, stack_rows, zf_precode};
use noma_lab::channel::{generate_channels, ChannelParams, C64};
use noma_lab::cluster::{Instance, Outcome};
use noma_lab::power::{sinr, test_p, SinrModel};
use noma_lab::sim::config::ScenarioConfig;

/// Random instance from the hotspot scenario with `n` users and `m` clusters.
pub fn scenario(seed: u64, n: usize, m: usize) -> Instance {
    let config = ScenarioConfig::hotspot_scenario();
    let params = ChannelParams {
        n_tx_antennas: m,
        seed,
        ..config.channel
    };
    let channels = generate_channels(&params, n).unwrap();
    Instance::new(
        channels,
        config.thresholds(n),
        config.noise_power_w,
        config.p_max_w,
        m,
    )
    .unwrap()
}

/// Instance on hand-written channel vectors.
pub fn handmade(vectors: Vec<Vec<C64>>, m: usize, gamma: f64, p_max: f64) -> Instance {
    let n_tx = vectors[0].len();
    let params = ChannelParams {
        n_tx_antennas: n_tx,
        ..ChannelParams::default()
    };
    let n = vectors.len();
    let channels = noma_lab::channel::ChannelSet::from_vectors(params, vectors).unwrap();
    Instance::new(channels, vec![gamma; n], 0.01, p_max, m).unwrap()
}

pub fn re(values: &[f64]) -> Vec<C64> {
    values.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// Rebuilds representatives, beams and the per-user SINR model from the
/// assignment alone.
pub fn rebuild_model(inst: &Instance, clusters: &[Vec<usize>]) -> SinrModel {
    let n = inst.n_users();
    let active: Vec<Vec<usize>> = clusters.iter().filter(|c| !c.is_empty()).cloned().collect();
    let mut model = SinrModel {
        gamma_th: inst.gamma_th.clone(),
        noise_power: inst.noise_power,
        collinearity: vec![1.0; n],
        gain: vec![0.0; n],
    };
    if active.is_empty() {
        return model;
    }
    let reps = select_representatives(&active, &inst.collinearity).unwrap();
    let rows: Vec<&[C64]> = reps.iter().map(|&r| inst.channels.vector(r)).collect();
    let beams = zf_precode(&stack_rows(&rows)).unwrap();
    for (k, (members, &rep)) in active.iter().zip(&reps).enumerate() {
        for &u in members {
            model.collinearity[u] = if u == rep {
                1.0
            } else {
                inst.collinearity.get(u, rep)
            };
            model.gain[u] = beams.effective_gain(inst.channels.vector(u), k);
        }
    }
    model
}

/// Partition validity, budget check and recomputed SINR for one outcome.
pub fn check_outcome(inst: &Instance, out: &Outcome) -> Result<(), String> {
    let a = &out.assignment;
    a.validate(inst.n_users(), inst.n_clusters)
        .map_err(|e| e.to_string())?;
    if !test_p(&out.solution, inst.p_max) {
        return Err(format!("budget check failed: total {}", out.solution.total));
    }
    let model = rebuild_model(inst, &a.clusters);
    for members in &a.clusters {
        for w in members.windows(2) {
            let s = |u: usize| model.collinearity[u] * model.gain[u];
            if s(w[0]) < s(w[1]) {
                return Err(format!("cluster {members:?} is not in decoding order"));
            }
        }
    }
    for &u in a.clusters.iter().flatten() {
        let achieved = sinr(u, &out.solution.powers, &a.clusters, &model);
        if achieved < inst.gamma_th[u] - 1e-9 * inst.gamma_th[u].max(1.0) {
            return Err(format!("user {u}: SINR {achieved} below {}", inst.gamma_th[u]));
        }
    }
    for u in &a.unserved {
        if out.solution.powers[*u] != 0.0 {
            return Err(format!("unserved user {u} has power"));
        }
    }
    Ok(())
}
