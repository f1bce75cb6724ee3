//! Pairwise channel collinearity and the descending pair list fed to the
//! clustering algorithms.

use crate::channel::{norm_sqr, ChannelSet, C64};
use crate::error::{Error, Result};

/// Symmetric matrix of `|<h_i, h_j>| / (|h_i| |h_j|)`, unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CollinearityMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CollinearityMatrix {
    /// Builds a matrix from explicit row-major entries. Used for synthetic
    /// instances; the entries must already satisfy the matrix invariants.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid("collinearity", "matrix must be square"));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid(
                        "collinearity",
                        format!("entry ({i},{j}) = {v} outside [0,1]"),
                    ));
                }
                if i == j && v != 1.0 {
                    return Err(Error::invalid("collinearity", "diagonal must be 1"));
                }
                if rows[j][i] != v {
                    return Err(Error::invalid("collinearity", "matrix must be symmetric"));
                }
            }
            entries.extend_from_slice(row);
        }
        Ok(CollinearityMatrix { n, entries })
    }

    pub fn n_users(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Realized collinearity of every user pair.
pub fn collinearity(channels: &ChannelSet) -> Result<CollinearityMatrix> {
    collinearity_of(channels.vectors())
}

pub(crate) fn collinearity_of(vectors: &[Vec<C64>]) -> Result<CollinearityMatrix> {
    let n = vectors.len();
    if n == 0 {
        return Err(Error::invalid("n_users", "must be at least 1"));
    }
    let norms: Vec<f64> = vectors.iter().map(|h| norm_sqr(h).sqrt()).collect();
    if let Some(user) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::DegenerateChannel { user });
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        entries[i * n + i] = 1.0;
        for j in i + 1..n {
            let ip: C64 = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            let c = (ip.norm() / (norms[i] * norms[j])).clamp(0.0, 1.0);
            entries[i * n + j] = c;
            entries[j * n + i] = c;
        }
    }
    Ok(CollinearityMatrix { n, entries })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedPair {
    pub first: usize,
    pub second: usize,
    pub collinearity: f64,
}

/// All unordered pairs, descending by collinearity; ties by `(first, second)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedPairList {
    pairs: Vec<CorrelatedPair>,
}

impl SortedPairList {
    pub fn iter(&self) -> impl Iterator<Item = &CorrelatedPair> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn as_slice(&self) -> &[CorrelatedPair] {
        &self.pairs
    }
}

pub fn sorted_pairs(c: &CollinearityMatrix) -> SortedPairList {
    let n = c.n_users();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(CorrelatedPair {
                first: i,
                second: j,
                collinearity: c.get(i, j),
            });
        }
    }
    pairs.sort_by(|a, b| {
        b.collinearity
            .total_cmp(&a.collinearity)
            .then(a.first.cmp(&b.first))
            .then(a.second.cmp(&b.second))
    });
    SortedPairList { pairs }
}
