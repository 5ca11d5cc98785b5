use num_complex::Complex64;

use super::model::Model;
use crate::linalg::CMatrix;
use crate::scenario::{BeamformerSet, CachePlacement, ClusterMatrix, MulticastGroups};

/// Diagonal 0/1 matrices `J_n` picking the antennas of BS `n` out of the
/// network-wide `N * L` dimensions.
#[derive(Debug, Clone, Copy)]
pub struct SelectionMatrices {
    pub n_bs: usize,
    pub n_ant: usize,
}

impl SelectionMatrices {
    pub fn new(n_bs: usize, n_ant: usize) -> Self {
        Self { n_bs, n_ant }
    }

    pub fn j(&self, n: usize) -> CMatrix {
        let d = self.n_bs * self.n_ant;
        CMatrix::from_fn(d, d, |i, k| {
            if i == k && i / self.n_ant == n {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `Tr(W J_n)` without forming `J_n`.
    pub fn trace(&self, w: &CMatrix, n: usize) -> f64 {
        (n * self.n_ant..(n + 1) * self.n_ant).map(|i| w[(i, i)].re).sum()
    }
}

/// Active pairs are blocks above `threshold` times the largest block power,
/// plus every pair whose content is cached at the BS. Blocks of inactive
/// pairs are zeroed in the returned beamformers.
pub fn extract_clusters(
    w: &BeamformerSet,
    c: &CachePlacement,
    groups: &MulticastGroups,
    threshold: f64,
) -> (ClusterMatrix, BeamformerSet) {
    let contents: Vec<usize> = groups.groups.iter().map(|g| g.content).collect();
    extract_by_content(w, c, &contents, threshold)
}

pub(crate) fn extract_by_content(
    w: &BeamformerSet,
    c: &CachePlacement,
    contents: &[usize],
    threshold: f64,
) -> (ClusterMatrix, BeamformerSet) {
    let powers = w.block_powers();
    let max = powers.iter().flatten().copied().fold(0.0, f64::max);
    let n_bs = w.n_bs();
    let mut s = ClusterMatrix::empty(w.n_beams(), n_bs);
    let mut out = w.clone();
    for m in 0..w.n_beams() {
        for n in 0..n_bs {
            let on = powers[m][n] > threshold * max;
            s.set(m, n, on || c.cached(contents[m], n));
            if !on {
                out.block_mut(m, n).iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            }
        }
    }
    (s, out)
}

impl Model<'_> {
    pub(crate) fn extract(&self, w: &BeamformerSet, threshold: f64) -> (ClusterMatrix, BeamformerSet) {
        let contents: Vec<usize> = self.beams.iter().map(|b| b.content).collect();
        extract_by_content(w, &self.sc.cache, &contents, threshold)
    }

    /// [`Model::extract`], except that a beam left with no active BS keeps
    /// its strongest block. A group with a weak but nonzero beam would
    /// otherwise lose all service under the global threshold.
    pub(crate) fn extract_serving(&self, w: &BeamformerSet, threshold: f64) -> (ClusterMatrix, BeamformerSet) {
        let (mut s, mut out) = self.extract(w, threshold);
        let powers = w.block_powers();
        for (m, row) in powers.iter().enumerate() {
            if s.s[m].iter().any(|&on| on) {
                continue;
            }
            let Some((n, _)) = row.iter().enumerate().filter(|(_, p)| **p > 0.0).max_by(|a, b| a.1.total_cmp(b.1)) else {
                continue;
            };
            s.set(m, n, true);
            out.block_mut(m, n).copy_from_slice(w.block(m, n));
        }
        (s, out)
    }
}
