//! Cavity-frequency and occupancy curves from labeled ladders, and a simple
//! detector for resonance features on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::LabelLadder;

/// `f_n = eps_{p,n+1} - eps_{p,n}` in units of `omega_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyCurve {
    pub points: Vec<(usize, f64)>,
    /// Ladder description, e.g. `continuity(delta=0.01)`.
    pub source: String,
    pub p: usize,
}

impl FrequencyCurve {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn at(&self, n: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == n).map(|p| p.1)
    }
}

/// `(n, <N_q>)` along a ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyCurve {
    pub points: Vec<(usize, f64)>,
    pub source: String,
    pub p: usize,
}

impl OccupancyCurve {
    /// Linear interpolation at fractional photon number; `None` outside the curve.
    pub fn interpolate(&self, n: f64) -> Option<f64> {
        let first = self.points.first()?.0 as f64;
        let last = self.points.last()?.0 as f64;
        if !(n >= first && n <= last) {
            return None;
        }
        let lo = n.floor() as usize - self.points[0].0;
        if lo + 1 >= self.points.len() {
            return Some(self.points[lo].1);
        }
        let t = n - n.floor();
        Some(self.points[lo].1 * (1.0 - t) + self.points[lo + 1].1 * t)
    }
}

pub fn cavity_frequency_curve(ladder: &LabelLadder) -> Result<FrequencyCurve> {
    if ladder.len() < 2 {
        return Err(Error::LadderTooShort {
            len: ladder.len(),
            needed: 2,
        });
    }
    let points = ladder
        .entries
        .windows(2)
        .map(|w| (w[0].n, w[1].energy - w[0].energy))
        .collect();
    Ok(FrequencyCurve {
        points,
        source: ladder.label(),
        p: ladder.p,
    })
}

pub fn occupancy_curve(ladder: &LabelLadder) -> OccupancyCurve {
    OccupancyCurve {
        points: ladder.entries.iter().map(|e| (e.n, e.occupancy)).collect(),
        source: ladder.label(),
        p: ladder.p,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    /// Excursion that returns to the preceding baseline.
    Peak,
    /// Persistent upward change of the baseline.
    Jump,
    /// Persistent downward change of the baseline.
    Drop,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Peak => "peak",
            FeatureKind::Jump => "jump",
            FeatureKind::Drop => "drop",
        }
    }
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonanceFeature {
    pub kind: FeatureKind,
    pub n_location: usize,
    /// Size of the excursion from the baseline, in `omega_c`.
    pub magnitude: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Minimum deviation from the baseline, in `omega_c`.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Number of trailing baseline points the median is taken over.
    #[serde(default = "default_baseline_window")]
    pub baseline_window: usize,
    /// An excursion must come back within this many points to count as a peak.
    #[serde(default = "default_return_window")]
    pub return_window: usize,
}

fn default_threshold() -> f64 {
    1e-4
}
fn default_baseline_window() -> usize {
    15
}
fn default_return_window() -> usize {
    10
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            threshold: default_threshold(),
            baseline_window: default_baseline_window(),
            return_window: default_return_window(),
        }
    }
}

impl DetectorConfig {
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Minimum number of baseline points before excursions are judged.
const MIN_BASELINE: usize = 3;

/// Finds peaks, jumps and drops relative to a trailing-median baseline.
///
/// Points belonging to an excursion never enter the baseline. After a
/// persistent change the baseline restarts from the new level.
pub fn detect_features(curve: &FrequencyCurve, cfg: &DetectorConfig) -> Vec<ResonanceFeature> {
    detect_in_series(&curve.points, cfg)
}

pub fn detect_in_series(points: &[(usize, f64)], cfg: &DetectorConfig) -> Vec<ResonanceFeature> {
    assert!(cfg.threshold > 0.0, "detection threshold must be positive");
    let f: Vec<f64> = points.iter().map(|p| p.1).collect();
    let len = f.len();
    let mut out = Vec::new();
    let mut history: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < len {
        if history.len() < MIN_BASELINE {
            history.push(f[i]);
            i += 1;
            continue;
        }
        let start = history.len().saturating_sub(cfg.baseline_window);
        let base = median(&history[start..]);
        if (f[i] - base).abs() <= cfg.threshold {
            history.push(f[i]);
            i += 1;
            continue;
        }
        let horizon = (i + cfg.return_window).min(len - 1);
        let back = (i + 1..=horizon).find(|&j| (f[j] - base).abs() <= cfg.threshold);
        match back {
            Some(j) => {
                let k = (i..j)
                    .max_by(|&a, &b| (f[a] - base).abs().total_cmp(&(f[b] - base).abs()))
                    .unwrap();
                out.push(ResonanceFeature {
                    kind: FeatureKind::Peak,
                    n_location: points[k].0,
                    magnitude: (f[k] - base).abs(),
                });
                i = j;
            }
            None => {
                let after = &f[i..=horizon];
                let level = median(after);
                let shift = level - base;
                let kind = if shift > 0.0 {
                    FeatureKind::Jump
                } else {
                    FeatureKind::Drop
                };
                let magnitude = if shift.abs() > cfg.threshold {
                    shift.abs()
                } else {
                    (f[i] - base).abs()
                };
                out.push(ResonanceFeature {
                    kind,
                    n_location: points[i].0,
                    magnitude,
                });
                history.clear();
                history.push(f[i]);
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::{LadderEntry, Method, Provenance};

    fn ladder_from_energies(e: &[f64]) -> LabelLadder {
        let entries = e
            .iter()
            .enumerate()
            .map(|(n, &energy)| LadderEntry {
                n,
                eigen_index: n,
                energy,
                occupancy: 0.0,
                window_fallback: false,
                candidate_energy: None,
            })
            .collect();
        LabelLadder {
            p: 0,
            method: Method::Overlap,
            entries,
            delta: None,
            first_step: None,
            provenance: Provenance::Synthetic("test".into()),
            diagnostics: vec![],
        }
    }

    fn series(values: &[f64]) -> Vec<(usize, f64)> {
        values.iter().cloned().enumerate().collect()
    }

    #[test]
    fn linear_energies_give_constant_frequency() {
        let e: Vec<f64> = (0..20).map(|n| 0.3 + 0.75 * n as f64).collect();
        let c = cavity_frequency_curve(&ladder_from_energies(&e)).unwrap();
        assert_eq!(c.points.len(), 19);
        assert!(c.values().iter().all(|&f| (f - 0.75).abs() < 1e-12));
        assert!(detect_features(&c, &DetectorConfig::default()).is_empty());
    }

    #[test]
    fn short_ladder_is_an_error() {
        assert!(matches!(
            cavity_frequency_curve(&ladder_from_energies(&[1.0])),
            Err(Error::LadderTooShort { .. })
        ));
    }

    #[test]
    fn isolated_spike_is_a_peak() {
        let mut v = vec![1.0; 60];
        v[30] = 1.003;
        v[31] = 0.998;
        let feats = detect_in_series(&series(&v), &DetectorConfig::default());
        assert_eq!(feats.len(), 1);
        assert_eq!(feats[0].kind, FeatureKind::Peak);
        assert_eq!(feats[0].n_location, 30);
        assert!((feats[0].magnitude - 0.003).abs() < 1e-12);
    }

    #[test]
    fn persistent_changes_are_jumps_and_drops() {
        let mut v = vec![1.0; 40];
        v.extend(vec![1.004; 40]);
        v.extend(vec![0.99; 40]);
        let feats = detect_in_series(&series(&v), &DetectorConfig::default());
        let kinds: Vec<_> = feats.iter().map(|f| (f.kind, f.n_location)).collect();
        assert_eq!(kinds, vec![(FeatureKind::Jump, 40), (FeatureKind::Drop, 80)]);
    }

    #[test]
    fn slow_drift_is_not_a_feature() {
        let v: Vec<f64> = (0..200).map(|n| 1.002 - 1e-5 * n as f64).collect();
        assert!(detect_in_series(&series(&v), &DetectorConfig::default()).is_empty());
    }

    #[test]
    fn frequencies_telescope_back_to_the_energy_span() {
        let e: Vec<f64> = (0..50).map(|n| (n as f64).sqrt() * 0.37 + n as f64).collect();
        let c = cavity_frequency_curve(&ladder_from_energies(&e)).unwrap();
        let total: f64 = c.values().iter().sum();
        assert!((total - (e[49] - e[0])).abs() < 1e-12);
    }

    #[test]
    fn interpolation() {
        let c = OccupancyCurve {
            points: vec![(0, 0.0), (1, 1.0), (2, 4.0)],
            source: "t".into(),
            p: 0,
        };
        assert_eq!(c.interpolate(0.5), Some(0.5));
        assert_eq!(c.interpolate(1.25), Some(1.75));
        assert_eq!(c.interpolate(2.0), Some(4.0));
        assert_eq!(c.interpolate(2.5), None);
        assert_eq!(c.interpolate(-0.1), None);
    }
}
