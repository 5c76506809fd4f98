#![allow(dead_code)]

use dressed_core::labeling::{self, LabelLadder, Levels, Provenance};

/// Ladder `eps_n = n - kerr n(n-1)/2` (occupancy 0) that meets an intruder
/// level (occupancy 1) detuned by `detuning` at `n_star`, with coupling
/// `coupling`.
///
/// Linear extrapolation overshoots the bare level at `n_star` by `kerr`, so a
/// narrow window can see only the intruder-like branch.
pub struct AvoidedCrossing {
    pub energies: Vec<f64>,
    pub occupancy: Vec<f64>,
    pub n_star: usize,
    /// Splitting of the two hybridized branches.
    pub gap: f64,
}

impl AvoidedCrossing {
    pub fn new(n_star: usize, n_top: usize, detuning: f64, coupling: f64, kerr: f64) -> Self {
        let bare = |n: usize| n as f64 - kerr * (n * n.saturating_sub(1)) as f64 / 2.0;
        let gap = (detuning * detuning + 4.0 * coupling * coupling).sqrt();
        let mut levels: Vec<(f64, f64)> = (0..=n_top).filter(|&n| n != n_star).map(|n| (bare(n), 0.0)).collect();
        for lambda in [(detuning - gap) / 2.0, (detuning + gap) / 2.0] {
            // eigenvector of [[0, x], [x, d]] is proportional to (x, lambda)
            let weight = lambda * lambda / (coupling * coupling + lambda * lambda);
            levels.push((bare(n_star) + lambda, weight));
        }
        levels.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            energies: levels.iter().map(|l| l.0).collect(),
            occupancy: levels.iter().map(|l| l.1).collect(),
            n_star,
            gap,
        }
    }

    pub fn ladder(&self, delta: f64, n_max: usize) -> LabelLadder {
        let levels = Levels::new(&self.energies, &self.occupancy);
        labeling::label_continuity_levels(&levels, Provenance::Synthetic("avoided crossing".into()), 0, &[0], delta, n_max)
    }
}
