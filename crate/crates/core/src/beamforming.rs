//! Representative selection and Frobenius-normalized zero-forcing beams.

use nalgebra::{DMatrix, SVD};

use crate::channel::C64;
use crate::correlation::CollinearityMatrix;
use crate::error::{Error, Result};

/// Smallest admissible ratio of smallest to largest singular value.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Member of each cluster with the largest summed collinearity to the other
/// members; ties go to the lowest user index.
pub fn select_representatives(clusters: &[Vec<usize>], c: &CollinearityMatrix) -> Result<Vec<usize>> {
    clusters
        .iter()
        .enumerate()
        .map(|(k, members)| representative(members, c).ok_or(Error::EmptyCluster { cluster: k }))
        .collect()
}

pub(crate) fn representative(members: &[usize], c: &CollinearityMatrix) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &u in members {
        let score: f64 = members.iter().filter(|&&v| v != u).map(|&v| c.get(u, v)).sum();
        best = match best {
            None => Some((u, score)),
            Some((b, s)) if score > s || (score == s && u < b) => Some((u, score)),
            keep => keep,
        };
    }
    best.map(|(u, _)| u)
}

/// One normalized beam per representative row of `H_rep`.
#[derive(Debug, Clone)]
pub struct BeamformerSet {
    /// Column `k` is the beam of cluster `k`; `||beams||_F = 1`.
    pub beams: DMatrix<C64>,
    /// Frobenius norm of the pseudo-inverse before normalization.
    pub unnormalized_norm: f64,
}

impl BeamformerSet {
    pub fn n_beams(&self) -> usize {
        self.beams.ncols()
    }

    /// `h . w_k` (no conjugation, matching `H W`).
    pub fn response(&self, h: &[C64], beam: usize) -> C64 {
        h.iter()
            .zip(self.beams.column(beam).iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `|h . w_k|^2`.
    pub fn effective_gain(&self, h: &[C64], beam: usize) -> f64 {
        self.response(h, beam).norm_sqr()
    }
}

/// Stacks rows into a `K x n_tx` matrix.
pub fn stack_rows(rows: &[&[C64]]) -> DMatrix<C64> {
    let k = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(k, n, |i, j| rows[i][j])
}

/// Moore-Penrose pseudo-inverse through the SVD. Fails when the smallest
/// singular value drops below `RANK_CUTOFF` times the largest.
pub fn pseudo_inverse(h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let svd = SVD::new(h.clone(), true, true);
    let s = &svd.singular_values;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || !(min / max >= RANK_CUTOFF) {
        let ratio = if max > 0.0 { min / max } else { 0.0 };
        return Err(Error::RankDeficient { ratio });
    }
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^H");
    // W = V diag(1/s) U^H
    let mut v = v_t.adjoint();
    for (j, sv) in s.iter().enumerate() {
        let inv = 1.0 / sv;
        v.column_mut(j).iter_mut().for_each(|z| *z *= inv);
    }
    Ok(v * u.adjoint())
}

enum QrInverse {
    Inverse(DMatrix<C64>),
    /// Certainly below `RANK_CUTOFF`; carries an upper bound on the ratio.
    Deficient(f64),
    Undecided,
}

/// Right inverse of `h` from the QR factors of its adjoint: `h^H = Q R`
/// gives `h^+ = Q R^-H`. With `b = 1 / (||R||_F ||R^-1||_F)` and `k` rows,
/// `b <= s_min / s_max <= k b`, which settles the rank test except in a
/// narrow band where the SVD decides.
fn qr_right_inverse(h: &DMatrix<C64>) -> QrInverse {
    let k = h.nrows();
    let qr = h.adjoint().qr();
    let r = qr.r();
    let Some(r_inv) = r.solve_upper_triangular(&DMatrix::identity(k, k)) else {
        return QrInverse::Deficient(0.0);
    };
    let bound = 1.0 / (r.norm() * r_inv.norm());
    if bound >= RANK_CUTOFF {
        QrInverse::Inverse(qr.q() * r_inv.adjoint())
    } else if !(k as f64 * bound >= RANK_CUTOFF) {
        QrInverse::Deficient(if bound.is_finite() { k as f64 * bound } else { 0.0 })
    } else {
        QrInverse::Undecided
    }
}

/// Zero-forcing precoder for the stacked representative channels.
pub fn zf_precode(h_rep: &DMatrix<C64>) -> Result<BeamformerSet> {
    let (k, n_tx) = h_rep.shape();
    if k == 0 {
        return Err(Error::invalid("h_rep", "needs at least one representative"));
    }
    if k > n_tx {
        return Err(Error::TooManyClusters {
            clusters: k,
            antennas: n_tx,
        });
    }
    if h_rep.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("h_rep", "entries must be finite"));
    }
    let w = match qr_right_inverse(h_rep) {
        QrInverse::Inverse(w) => w,
        QrInverse::Deficient(ratio) => return Err(Error::RankDeficient { ratio }),
        QrInverse::Undecided => pseudo_inverse(h_rep)?,
    };
    let norm = w.norm();
    Ok(BeamformerSet {
        beams: w / C64::new(norm, 0.0),
        unnormalized_norm: norm,
    })
}
