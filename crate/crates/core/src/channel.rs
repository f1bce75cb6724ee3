//! Clustered mmWave downlink channels (extended Saleh-Valenzuela model).
//!
//! Every user sees `n_scatter_clusters` scattering clusters, each made of
//! `rays_per_cluster` rays. A ray contributes
//! `alpha * G(azimuth) * a(azimuth, elevation)` where `alpha` is a unit
//! variance circularly-symmetric Gaussian gain, `G` the antenna gain pattern
//! and `a` the unit-norm transmit array response. The sum is scaled by the
//! normalization `gamma = sqrt(n_tx / (clusters * rays))`, which makes
//! `E[|h|^2] = n_tx` for unit-gain antennas, and by an optional large-scale
//! path gain.
//!
//! Users are single-antenna, so the receive response collapses to 1.
//! Spatial correlation between users comes from *hotspots*: users placed in
//! the same hotspot share the scattering-cluster center angles and differ
//! only in their Laplacian ray offsets and fading gains.

use std::f64::consts::PI;

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Transmit array layout. Spacing is in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrayGeometry {
    UniformLinear {
        spacing: f64,
    },
    /// Elements on a `rows x cols` grid; `rows` is the largest divisor of the
    /// element count not exceeding its square root.
    UniformPlanar {
        spacing: f64,
    },
}

impl ArrayGeometry {
    pub fn spacing(&self) -> f64 {
        match *self {
            ArrayGeometry::UniformLinear { spacing } | ArrayGeometry::UniformPlanar { spacing } => spacing,
        }
    }
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        ArrayGeometry::UniformLinear { spacing: 0.5 }
    }
}

/// Antenna power pattern applied to every ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AntennaGain {
    #[default]
    Unit,
    /// Ideal 120-degree sector: power gain 3 inside |azimuth| <= 60 degrees,
    /// 20 dB lower outside.
    Sectorized,
}

impl AntennaGain {
    /// Amplitude factor (square root of the power gain) at `azimuth`.
    pub fn amplitude(&self, azimuth: f64) -> f64 {
        match self {
            AntennaGain::Unit => 1.0,
            AntennaGain::Sectorized => {
                let az = wrap_angle(azimuth);
                if az.abs() <= PI / 3.0 {
                    3f64.sqrt()
                } else {
                    (3.0 * 0.01f64).sqrt()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub n_tx_antennas: usize,
    pub n_scatter_clusters: usize,
    pub rays_per_cluster: usize,
    /// Laplacian scale of the per-ray angle offsets, radians.
    pub angular_spread: f64,
    /// Overrides the default `sqrt(n_tx / (clusters * rays))` normalization.
    pub carrier_normalization: Option<f64>,
    pub antenna_gain: AntennaGain,
    pub geometry: ArrayGeometry,
    /// Number of co-located user groups sharing cluster angles; 0 means one
    /// hotspot per transmit antenna.
    pub n_hotspots: usize,
    /// Large-scale gain applied to every user, dB.
    pub path_gain_db: f64,
    pub seed: u64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            n_tx_antennas: 5,
            n_scatter_clusters: 4,
            rays_per_cluster: 10,
            angular_spread: 10f64.to_radians(),
            carrier_normalization: None,
            antenna_gain: AntennaGain::Unit,
            geometry: ArrayGeometry::default(),
            n_hotspots: 0,
            path_gain_db: 0.0,
            seed: 0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_tx_antennas == 0 {
            return Err(Error::invalid("n_tx_antennas", "must be at least 1"));
        }
        if self.n_scatter_clusters == 0 {
            return Err(Error::invalid("n_scatter_clusters", "must be at least 1"));
        }
        if self.rays_per_cluster == 0 {
            return Err(Error::invalid("rays_per_cluster", "must be at least 1"));
        }
        if !(self.angular_spread > 0.0) || !self.angular_spread.is_finite() {
            return Err(Error::invalid(
                "angular_spread",
                format!("must be positive, got {}", self.angular_spread),
            ));
        }
        let spacing = self.geometry.spacing();
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid(
                "element_spacing",
                format!("must be positive, got {spacing}"),
            ));
        }
        if let Some(g) = self.carrier_normalization {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::invalid(
                    "carrier_normalization",
                    format!("must be positive, got {g}"),
                ));
            }
        }
        if !self.path_gain_db.is_finite() {
            return Err(Error::invalid("path_gain_db", "must be finite"));
        }
        Ok(())
    }

    /// The normalization factor applied to the ray sum.
    pub fn normalization(&self) -> f64 {
        self.carrier_normalization.unwrap_or_else(|| {
            (self.n_tx_antennas as f64 / (self.n_scatter_clusters * self.rays_per_cluster) as f64).sqrt()
        })
    }

    pub fn hotspot_count(&self) -> usize {
        if self.n_hotspots == 0 {
            self.n_tx_antennas
        } else {
            self.n_hotspots
        }
    }
}

/// Per-user channel vectors plus the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub params: ChannelParams,
    vectors: Vec<Vec<C64>>,
    hotspot: Vec<usize>,
}

impl ChannelSet {
    /// Wraps explicit channel vectors, e.g. for hand-built test instances.
    pub fn from_vectors(params: ChannelParams, vectors: Vec<Vec<C64>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::invalid("n_users", "must be at least 1"));
        }
        for (u, h) in vectors.iter().enumerate() {
            if h.len() != params.n_tx_antennas {
                return Err(Error::invalid(
                    "channel",
                    format!(
                        "user {u} has {} entries, expected {}",
                        h.len(),
                        params.n_tx_antennas
                    ),
                ));
            }
            if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::invalid("channel", format!("user {u} is not finite")));
            }
            if norm_sqr(h) == 0.0 {
                return Err(Error::DegenerateChannel { user: u });
            }
        }
        let hotspot = vec![0; vectors.len()];
        Ok(ChannelSet {
            params,
            vectors,
            hotspot,
        })
    }

    pub fn n_users(&self) -> usize {
        self.vectors.len()
    }

    pub fn n_tx(&self) -> usize {
        self.params.n_tx_antennas
    }

    pub fn vector(&self, user: usize) -> &[C64] {
        &self.vectors[user]
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    /// Hotspot each user was dropped into (all zero for hand-built sets).
    pub fn hotspot(&self, user: usize) -> usize {
        self.hotspot[user]
    }

    /// Squared channel norm, the "channel gain" used by near-far pairing.
    pub fn gain(&self, user: usize) -> f64 {
        norm_sqr(&self.vectors[user])
    }
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

fn planar_rows(n: usize) -> usize {
    let mut rows = (n as f64).sqrt().floor() as usize;
    while rows > 1 && n % rows != 0 {
        rows -= 1;
    }
    rows.max(1)
}

/// Unit-norm transmit steering vector for `(azimuth, elevation)` in radians.
///
/// The linear array lies along one axis with phase ramp
/// `2 pi d m sin(az) cos(el)`; the planar array uses
/// `2 pi d (m sin(az) sin(el) + n cos(el))`.
pub fn array_response(geometry: ArrayGeometry, angles: (f64, f64), n_elements: usize) -> Vec<C64> {
    assert!(n_elements >= 1, "array needs at least one element");
    let (az, el) = (wrap_angle(angles.0), wrap_angle(angles.1));
    let scale = 1.0 / (n_elements as f64).sqrt();
    let k = 2.0 * PI * geometry.spacing();
    match geometry {
        ArrayGeometry::UniformLinear { .. } => {
            let step = k * az.sin() * el.cos();
            (0..n_elements)
                .map(|m| C64::from_polar(scale, step * m as f64))
                .collect()
        }
        ArrayGeometry::UniformPlanar { .. } => {
            let rows = planar_rows(n_elements);
            let cols = n_elements / rows;
            let (u, v) = (k * az.sin() * el.sin(), k * el.cos());
            let mut out = Vec::with_capacity(n_elements);
            for m in 0..rows {
                for n in 0..cols {
                    out.push(C64::from_polar(scale, u * m as f64 + v * n as f64));
                }
            }
            out
        }
    }
}

/// Laplacian sample with scale `b` by inverse CDF.
pub(crate) fn laplace<R: Rng + ?Sized>(rng: &mut R, b: f64) -> f64 {
    // u in (-0.5, 0.5]
    let u: f64 = 0.5 - rng.random::<f64>();
    let mag = -(1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln();
    b * mag * u.signum()
}

/// Circularly-symmetric complex Gaussian with unit variance.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    // Box-Muller; each component has variance 1/2.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-u1.ln()).sqrt();
    C64::from_polar(r, 2.0 * PI * u2)
}

/// Draws one channel vector per user. Pure in `(params, n_users)`.
pub fn generate_channels(params: &ChannelParams, n_users: usize) -> Result<ChannelSet> {
    params.validate()?;
    if n_users == 0 {
        return Err(Error::invalid("n_users", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_tx = params.n_tx_antennas;
    let n_hot = params.hotspot_count();

    // Cluster-center angles per hotspot: (azimuth, elevation).
    let centers: Vec<Vec<(f64, f64)>> = (0..n_hot)
        .map(|_| {
            (0..params.n_scatter_clusters)
                .map(|_| {
                    let az = rng.random_range(-PI / 2.0..PI / 2.0);
                    let el = rng.random_range(-PI / 6.0..PI / 6.0);
                    (az, el)
                })
                .collect()
        })
        .collect();

    let amp = params.normalization() * 10f64.powf(params.path_gain_db / 20.0);
    let b = params.angular_spread;
    let mut vectors = Vec::with_capacity(n_users);
    let mut hotspot = Vec::with_capacity(n_users);
    for _ in 0..n_users {
        let spot = rng.random_range(0..n_hot);
        let mut h = vec![C64::new(0.0, 0.0); n_tx];
        for &(caz, cel) in &centers[spot] {
            for _ in 0..params.rays_per_cluster {
                let az = caz + laplace(&mut rng, b);
                let el = cel + laplace(&mut rng, b);
                let gain = complex_gaussian(&mut rng) * params.antenna_gain.amplitude(az);
                let a = array_response(params.geometry, (az, el), n_tx);
                for (hm, am) in h.iter_mut().zip(&a) {
                    *hm += gain * am;
                }
            }
        }
        for hm in h.iter_mut() {
            *hm *= amp;
        }
        vectors.push(h);
        hotspot.push(spot);
    }
    for (u, h) in vectors.iter().enumerate() {
        if norm_sqr(h) == 0.0 {
            return Err(Error::DegenerateChannel { user: u });
        }
    }
    Ok(ChannelSet {
        params: params.clone(),
        vectors,
        hotspot,
    })
}
