//! Six preset sweeps (served users, total power and energy efficiency,
//! each against user count and against RF-chain count), rendered as CSV,
//! a text table and an SVG line chart.

use std::fmt::Write as _;
use std::path::Path;

use super::config::ScenarioConfig;
use super::sweep::{run_sweep, write_rows, write_summary, SummaryRow, SweepResult};
use crate::cluster::Algorithm;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Served,
    Power,
    EnergyEfficiency,
}

impl Metric {
    fn label(self) -> &'static str {
        match self {
            Metric::Served => "served users",
            Metric::Power => "total power (W)",
            Metric::EnergyEfficiency => "energy efficiency (bit/J)",
        }
    }

    fn value(self, s: &SummaryRow) -> f64 {
        match self {
            Metric::Served => s.served_users.mean,
            Metric::Power => s.total_power_w.mean,
            Metric::EnergyEfficiency => s.energy_efficiency_bpj.mean,
        }
    }

    fn log_scale(self) -> bool {
        !matches!(self, Metric::Served)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Users,
    RfChains,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub name: &'static str,
    pub title: &'static str,
    pub metric: Metric,
    pub axis: Axis,
}

pub const FIGURES: [FigureSpec; 6] = [
    FigureSpec {
        name: "served_vs_users",
        title: "Served users vs. users (M = 5)",
        metric: Metric::Served,
        axis: Axis::Users,
    },
    FigureSpec {
        name: "served_vs_rf_chains",
        title: "Served users vs. RF chains (N = 100)",
        metric: Metric::Served,
        axis: Axis::RfChains,
    },
    FigureSpec {
        name: "power_vs_users",
        title: "Total power vs. users (M = 5)",
        metric: Metric::Power,
        axis: Axis::Users,
    },
    FigureSpec {
        name: "power_vs_rf_chains",
        title: "Total power vs. RF chains (N = 100)",
        metric: Metric::Power,
        axis: Axis::RfChains,
    },
    FigureSpec {
        name: "ee_vs_users",
        title: "Energy efficiency vs. users (M = 5)",
        metric: Metric::EnergyEfficiency,
        axis: Axis::Users,
    },
    FigureSpec {
        name: "ee_vs_rf_chains",
        title: "Energy efficiency vs. RF chains (N = 100)",
        metric: Metric::EnergyEfficiency,
        axis: Axis::RfChains,
    },
];

pub const DEFAULT_TRIALS: usize = 50;

/// User-count sweep at M = 5 on the hotspot scenario.
pub fn users_sweep(trials: usize) -> ScenarioConfig {
    ScenarioConfig {
        n_users: vec![50, 100, 150, 200, 250, 300],
        n_clusters: vec![5],
        algorithms: Algorithm::ALL.to_vec(),
        trials,
        ..ScenarioConfig::hotspot_scenario()
    }
}

/// RF-chain sweep at N = 100 on the hotspot scenario.
pub fn rf_chain_sweep(trials: usize) -> ScenarioConfig {
    ScenarioConfig {
        n_users: vec![100],
        n_clusters: vec![5, 10, 15, 20, 25],
        algorithms: Algorithm::ALL.to_vec(),
        trials,
        ..ScenarioConfig::hotspot_scenario()
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn x_of(axis: Axis, s: &SummaryRow) -> f64 {
    match axis {
        Axis::Users => s.n_users as f64,
        Axis::RfChains => s.n_clusters as f64,
    }
}

/// Series per algorithm: `(x, y)` points in sweep order.
fn series(result: &SweepResult, fig: &FigureSpec) -> Vec<(Algorithm, Vec<(f64, f64)>)> {
    Algorithm::ALL
        .iter()
        .map(|&a| {
            let pts = result
                .summary
                .iter()
                .filter(|s| s.algorithm == a)
                .map(|s| (x_of(fig.axis, s), fig.metric.value(s)))
                .collect();
            (a, pts)
        })
        .filter(|(_, p): &(Algorithm, Vec<(f64, f64)>)| !p.is_empty())
        .collect()
}

/// Plain-text table: one row per x value, one column per algorithm.
pub fn render_table(result: &SweepResult, fig: &FigureSpec, trials: usize) -> String {
    let data = series(result, fig);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {} ({}), {trials} trials per point",
        fig.title,
        fig.metric.label()
    );
    let _ = write!(s, "{:>8}", "x");
    for (a, _) in &data {
        let _ = write!(s, " {:>12}", a.name());
    }
    s.push('\n');
    let xs: Vec<f64> = data
        .first()
        .map(|(_, p)| p.iter().map(|q| q.0).collect())
        .unwrap_or_default();
    for (i, x) in xs.iter().enumerate() {
        let _ = write!(s, "{x:>8}");
        for (_, p) in &data {
            let y = p.get(i).map_or(f64::NAN, |q| q.1);
            if fig.metric.log_scale() {
                let _ = write!(s, " {y:>12.4e}");
            } else {
                let _ = write!(s, " {y:>12.2}");
            }
        }
        s.push('\n');
    }
    s
}

const COLORS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

/// Minimal SVG line chart (log-scaled y for power and efficiency).
pub fn render_svg(result: &SweepResult, fig: &FigureSpec, trials: usize) -> String {
    let data = series(result, fig);
    let (w, h, left, right, top, bottom) = (640.0, 420.0, 70.0, 130.0, 40.0, 50.0);
    let tf = |y: f64| {
        if fig.metric.log_scale() {
            y.max(1e-300).log10()
        } else {
            y
        }
    };
    let all = data.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        if !y.is_finite() || (fig.metric.log_scale() && y <= 0.0) {
            continue;
        }
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(tf(y));
        y1 = y1.max(tf(y));
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    if !fig.metric.log_scale() {
        y0 = y0.min(0.0);
    }
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (tf(y) - y0) / (y1 - y0) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{} ({trials} trials)</text>"#,
        w / 2.0,
        fig.title
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        h - bottom,
        w - right,
        h - bottom,
        h - bottom
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (left + w - right) / 2.0,
        h - 12.0,
        match fig.axis {
            Axis::Users => "users",
            Axis::RfChains => "RF chains",
        }
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">{}</text>"#,
        (top + h - bottom) / 2.0,
        (top + h - bottom) / 2.0,
        fig.metric.label()
    );
    for i in 0..=4 {
        let v = y0 + (y1 - y0) * i as f64 / 4.0;
        let y = h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom);
        let label = if fig.metric.log_scale() {
            format!("1e{v:.1}")
        } else {
            format!("{v:.1}")
        };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    for (i, (a, pts)) in data.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .filter(|(_, y)| y.is_finite() && (!fig.metric.log_scale() || *y > 0.0))
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        let ly = top + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            w - right + 10.0,
            a.name()
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Runs both preset sweeps and writes raw rows, aggregates, one text table
/// and one SVG per figure into `out_dir`.
pub fn run_figures(out_dir: &Path, trials: usize) -> Result<Vec<String>> {
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let mut written = Vec::new();
    let users = run_sweep(&users_sweep(trials))?;
    let chains = run_sweep(&rf_chain_sweep(trials))?;
    for (name, result) in [("users_sweep", &users), ("rf_chain_sweep", &chains)] {
        let raw = out_dir.join(format!("{name}.csv"));
        write_rows(std::fs::File::create(&raw).map_err(io(&raw))?, &result.rows)?;
        let sum = out_dir.join(format!("{name}.summary.csv"));
        write_summary(std::fs::File::create(&sum).map_err(io(&sum))?, &result.summary)?;
        written.push(raw.display().to_string());
        written.push(sum.display().to_string());
    }
    for fig in &FIGURES {
        let result = match fig.axis {
            Axis::Users => &users,
            Axis::RfChains => &chains,
        };
        let txt = out_dir.join(format!("{}.txt", fig.name));
        std::fs::write(&txt, render_table(result, fig, trials)).map_err(io(&txt))?;
        let svg = out_dir.join(format!("{}.svg", fig.name));
        std::fs::write(&svg, render_svg(result, fig, trials)).map_err(io(&svg))?;
        written.push(txt.display().to_string());
        written.push(svg.display().to_string());
    }
    let meta = out_dir.join("metadata.txt");
    let mut m = format!("trials_per_point = {trials}\n\n# users sweep\n");
    m.push_str(&users_sweep(trials).to_text());
    m.push_str("\n# rf chain sweep\n");
    m.push_str(&rf_chain_sweep(trials).to_text());
    std::fs::write(&meta, m).map_err(io(&meta))?;
    written.push(meta.display().to_string());
    Ok(written)
}
