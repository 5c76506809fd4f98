//! Assigning `(qubit level p, photon number n)` labels to eigenstates.
//!
//! Four strategies are provided:
//!
//! * overlap: the eigenstate with the largest weight on `|p>_q (x) |n>_c`;
//! * block: for excitation-preserving Hamiltonians, the state in the
//!   `M = p + n` excitation block whose photon number is closest to `n`;
//! * recursive: the eigenstate with the largest overlap with
//!   `c^dag |p, n-1>` where `|p, n-1>` is the previous labeled state;
//! * continuity: extrapolate the next energy linearly, collect every
//!   eigenstate inside an energy window around it, and keep the one whose
//!   qubit occupancy changes least.
//!
//! All ladders start from the overlap assignment at `n = 0`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::SystemSpec;
use crate::spectrum::EigenSolution;

/// Fock levels kept free above `n_max` unless overridden.
pub const DEFAULT_TRUNCATION_MARGIN: usize = 90;

/// Energy window used when none is configured, in units of `hbar omega_c`.
pub const DEFAULT_DELTA: f64 = 1.0e-2;

/// Allowed `max |[H, N_q + c^dag c]| / max |H|` for block labeling.
pub const BLOCK_COMMUTATOR_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Overlap,
    Block,
    Recursive,
    Continuity,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Overlap => "overlap",
            Method::Block => "block",
            Method::Recursive => "recursive",
            Method::Continuity => "continuity",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "overlap" => Ok(Method::Overlap),
            "block" => Ok(Method::Block),
            "recursive" => Ok(Method::Recursive),
            "continuity" => Ok(Method::Continuity),
            other => Err(Error::Config(format!("unknown labeling method `{other}`"))),
        }
    }
}

/// How the continuity ladder chooses its `n = 1` entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FirstStep {
    /// Candidate energy `eps_{p,0} + hbar omega_c`, then the window rule.
    #[default]
    Extrapolate,
    /// Largest overlap with `|p>_q (x) |1>_c`.
    Overlap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityConfig {
    pub delta: f64,
    pub n_max: usize,
    pub first_step: FirstStep,
    pub truncation_margin: usize,
}

impl ContinuityConfig {
    pub fn new(delta: f64, n_max: usize) -> Self {
        Self {
            delta,
            n_max,
            first_step: FirstStep::Extrapolate,
            truncation_margin: DEFAULT_TRUNCATION_MARGIN,
        }
    }

    pub fn with_first_step(mut self, first_step: FirstStep) -> Self {
        self.first_step = first_step;
        self
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.truncation_margin = margin;
        self
    }

    pub fn validate(&self, fock_cutoff: usize) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!("energy window delta must be > 0, got {}", self.delta)));
        }
        if self.n_max + self.truncation_margin > fock_cutoff {
            return Err(Error::TruncationMargin {
                n_max: self.n_max,
                fock_cutoff,
                margin: self.truncation_margin,
            });
        }
        Ok(())
    }
}

/// One labeled state `|p-bar, n-bar>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderEntry {
    pub n: usize,
    pub eigen_index: usize,
    pub energy: f64,
    pub occupancy: f64,
    /// No eigenstate fell inside the window; the closest ones were used.
    pub window_fallback: bool,
    /// Extrapolated energy the entry was selected against (continuity only).
    pub candidate_energy: Option<f64>,
}

/// Where a ladder's eigenstates came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    System(SystemSpec),
    Synthetic(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum LadderDiagnostic {
    /// The same eigenstate was labeled twice.
    ReusedEigenstate { eigen_index: usize, first_n: usize, n: usize },
}

impl std::fmt::Display for LadderDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LadderDiagnostic::ReusedEigenstate { eigen_index, first_n, n } => {
                write!(f, "eigenstate {eigen_index} labeled at n={first_n} and again at n={n}")
            }
        }
    }
}

/// Labeled ladder for a fixed starting qubit level.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelLadder {
    pub p: usize,
    pub method: Method,
    pub entries: Vec<LadderEntry>,
    pub delta: Option<f64>,
    pub first_step: Option<FirstStep>,
    pub provenance: Provenance,
    pub diagnostics: Vec<LadderDiagnostic>,
}

impl LabelLadder {
    pub fn n_max(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.eigen_index).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.energy).collect()
    }

    pub fn occupancies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.occupancy).collect()
    }

    /// Short description, e.g. `continuity(delta=0.015)`.
    pub fn label(&self) -> String {
        match self.delta {
            Some(d) => format!("{}(delta={d})", self.method),
            None => self.method.to_string(),
        }
    }

    fn new(p: usize, method: Method, provenance: Provenance, entries: Vec<LadderEntry>) -> Self {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut diagnostics = Vec::new();
        for e in &entries {
            if let Some(&first_n) = seen.get(&e.eigen_index) {
                diagnostics.push(LadderDiagnostic::ReusedEigenstate {
                    eigen_index: e.eigen_index,
                    first_n,
                    n: e.n,
                });
            } else {
                seen.insert(e.eigen_index, e.n);
            }
        }
        Self {
            p,
            method,
            entries,
            delta: None,
            first_step: None,
            provenance,
            diagnostics,
        }
    }
}

/// Energies and qubit occupancies of a sorted spectrum.
#[derive(Clone, Copy, Debug)]
pub struct Levels<'a> {
    pub energies: &'a [f64],
    pub occupancy: &'a [f64],
}

impl<'a> Levels<'a> {
    pub fn new(energies: &'a [f64], occupancy: &'a [f64]) -> Self {
        assert_eq!(energies.len(), occupancy.len());
        debug_assert!(energies.windows(2).all(|w| w[0] <= w[1]));
        Self { energies, occupancy }
    }

    pub fn of(sol: &'a EigenSolution) -> Self {
        Self::new(sol.energies(), sol.qubit_occupancy())
    }

    fn entry(&self, n: usize, index: usize) -> LadderEntry {
        LadderEntry {
            n,
            eigen_index: index,
            energy: self.energies[index],
            occupancy: self.occupancy[index],
            window_fallback: false,
            candidate_energy: None,
        }
    }

    /// Indices with `|eps - target| <= delta / 2`, ascending.
    pub fn window(&self, target: f64, delta: f64) -> Vec<usize> {
        let half = delta / 2.0;
        // widen the bracket slightly and filter with the exact inequality
        let slack = 4.0 * f64::EPSILON * target.abs().max(1.0);
        let lo = self.energies.partition_point(|&e| e < target - half - slack);
        let hi = self.energies.partition_point(|&e| e <= target + half + slack);
        (lo..hi)
            .filter(|&k| (self.energies[k] - target).abs() <= half)
            .collect()
    }

    /// The two eigenstates closest in energy to `target`; a third is added
    /// when it ties with the second.
    pub fn closest_two(&self, target: f64) -> Vec<usize> {
        let n = self.energies.len();
        let pos = self.energies.partition_point(|&e| e < target);
        let lo = pos.saturating_sub(3);
        let hi = (pos + 3).min(n);
        let mut near: Vec<(f64, usize)> = (lo..hi).map(|k| ((self.energies[k] - target).abs(), k)).collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut out: Vec<usize> = near.iter().take(2).map(|x| x.1).collect();
        if near.len() > 2 && near[2].0 == near[1].0 {
            out.push(near[2].1);
        }
        out.sort_unstable();
        out
    }
}

/// Result of one continuity step.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowChoice {
    pub index: usize,
    pub fallback: bool,
    pub candidates: Vec<usize>,
}

/// Picks the state in the window around `target` whose occupancy is closest
/// to `previous_occupancy`. Ties go to the energy closer to `target`, then
/// to the lower index.
pub fn select_in_window(levels: &Levels, target: f64, delta: f64, previous_occupancy: f64) -> WindowChoice {
    let mut candidates = levels.window(target, delta);
    let fallback = candidates.is_empty();
    if fallback {
        candidates = levels.closest_two(target);
    }
    let index = *candidates
        .iter()
        .min_by(|&&a, &&b| {
            let da = (levels.occupancy[a] - previous_occupancy).abs();
            let db = (levels.occupancy[b] - previous_occupancy).abs();
            da.total_cmp(&db)
                .then_with(|| {
                    let ea = (levels.energies[a] - target).abs();
                    let eb = (levels.energies[b] - target).abs();
                    ea.total_cmp(&eb)
                })
                .then(a.cmp(&b))
        })
        .expect("a non-empty spectrum always yields candidates");
    WindowChoice {
        index,
        fallback,
        candidates,
    }
}

/// Continuity walk from fixed leading entries.
///
/// `start` holds the eigen indices of `n = 0` and optionally `n = 1`.
/// The energy unit `omega_c` is used for the first extrapolation.
pub fn continuity_walk(levels: &Levels, start: &[usize], delta: f64, n_max: usize, omega_c: f64) -> Vec<LadderEntry> {
    assert!(!start.is_empty() && start.len() <= 2);
    let mut entries: Vec<LadderEntry> = start
        .iter()
        .enumerate()
        .take(n_max + 1)
        .map(|(n, &k)| levels.entry(n, k))
        .collect();
    for n in entries.len()..=n_max {
        let prev = entries[n - 1];
        let target = if n == 1 {
            prev.energy + omega_c
        } else {
            prev.energy + (prev.energy - entries[n - 2].energy)
        };
        let choice = select_in_window(levels, target, delta, prev.occupancy);
        let mut e = levels.entry(n, choice.index);
        e.window_fallback = choice.fallback;
        e.candidate_energy = Some(target);
        entries.push(e);
    }
    entries
}

/// Continuity ladder over an arbitrary sorted spectrum.
pub fn label_continuity_levels(
    levels: &Levels,
    provenance: Provenance,
    p: usize,
    start: &[usize],
    delta: f64,
    n_max: usize,
) -> LabelLadder {
    let entries = continuity_walk(levels, start, delta, n_max, 1.0);
    let mut ladder = LabelLadder::new(p, Method::Continuity, provenance, entries);
    ladder.delta = Some(delta);
    ladder.first_step = Some(if start.len() == 2 {
        FirstStep::Overlap
    } else {
        FirstStep::Extrapolate
    });
    ladder
}

fn check_range(sol: &EigenSolution, p: usize, n_max: usize) -> Result<()> {
    let layout = sol.layout();
    if p >= layout.levels {
        return Err(Error::OutOfRange {
            what: "qubit label",
            value: p,
            allowed: format!("0..{}", layout.levels),
        });
    }
    if n_max >= layout.fock_dim {
        return Err(Error::OutOfRange {
            what: "n_max",
            value: n_max,
            allowed: format!("0..={}", layout.fock_dim - 1),
        });
    }
    Ok(())
}

fn overlap_index(sol: &EigenSolution, p: usize, n: usize) -> Result<usize> {
    Ok(EigenSolution::argmax(&sol.product_state_overlaps(p, n)?))
}

fn provenance(sol: &EigenSolution) -> Provenance {
    Provenance::System(sol.spec().clone())
}

/// Largest overlap with `|p>_q (x) |n>_c` for every `n`.
pub fn label_overlap(sol: &EigenSolution, p: usize, n_max: usize) -> Result<LabelLadder> {
    check_range(sol, p, n_max)?;
    let levels = Levels::of(sol);
    let entries = (0..=n_max)
        .map(|n| Ok(levels.entry(n, overlap_index(sol, p, n)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabelLadder::new(p, Method::Overlap, provenance(sol), entries))
}

/// Excitation-block labeling; only valid when `[H, N_q + c^dag c] = 0`.
pub fn label_block(sol: &EigenSolution, p: usize, n_max: usize) -> Result<LabelLadder> {
    check_range(sol, p, n_max)?;
    let allowed = BLOCK_COMMUTATOR_TOLERANCE * sol.hamiltonian_scale();
    let norm = sol.excitation_commutator();
    if norm > allowed {
        return Err(Error::NotExcitationPreserving { norm, allowed });
    }
    let levels = Levels::of(sol);
    let photons = sol.photon_number();
    let occupancy = sol.qubit_occupancy();
    let mut entries = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let block = (p + n) as f64;
        let best = (0..sol.dim())
            .filter(|&k| (occupancy[k] + photons[k]).round() == block)
            .min_by(|&a, &b| {
                let da = (photons[a] - n as f64).abs();
                let db = (photons[b] - n as f64).abs();
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .ok_or(Error::OutOfRange {
                what: "excitation block",
                value: p + n,
                allowed: "a block present in the truncated spectrum".into(),
            })?;
        entries.push(levels.entry(n, best));
    }
    Ok(LabelLadder::new(p, Method::Block, provenance(sol), entries))
}

/// Largest overlap with `c^dag` applied to the previous labeled eigenvector.
pub fn label_recursive(sol: &EigenSolution, p: usize, n_max: usize) -> Result<LabelLadder> {
    check_range(sol, p, n_max)?;
    let levels = Levels::of(sol);
    let layout = sol.layout();
    let mut entries = vec![levels.entry(0, overlap_index(sol, p, 0)?)];
    for n in 1..=n_max {
        let prev = sol.eigenvector(entries[n - 1].eigen_index);
        let candidate = layout.apply_creation(&prev);
        let ov = sol.vector_overlaps(&candidate)?;
        entries.push(levels.entry(n, EigenSolution::argmax(&ov)));
    }
    Ok(LabelLadder::new(p, Method::Recursive, provenance(sol), entries))
}

/// Energy-window continuity labeling.
pub fn label_continuity(sol: &EigenSolution, p: usize, cfg: &ContinuityConfig) -> Result<LabelLadder> {
    check_range(sol, p, cfg.n_max)?;
    cfg.validate(sol.spec().fock_cutoff)?;
    let mut start = vec![overlap_index(sol, p, 0)?];
    if cfg.first_step == FirstStep::Overlap && cfg.n_max >= 1 {
        start.push(overlap_index(sol, p, 1)?);
    }
    let levels = Levels::of(sol);
    let entries = continuity_walk(&levels, &start, cfg.delta, cfg.n_max, 1.0);
    let mut ladder = LabelLadder::new(p, Method::Continuity, provenance(sol), entries);
    ladder.delta = Some(cfg.delta);
    ladder.first_step = Some(cfg.first_step);
    Ok(ladder)
}

/// Interval for the level repulsion at a point where two continuity ladders part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepulsionBound {
    pub divergence_n: usize,
    /// Window of the ladder that took the higher energy.
    pub delta_1: f64,
    /// Window of the ladder that took the lower energy.
    pub delta_2: f64,
    pub bound_low: f64,
    pub bound_high: f64,
    /// Mean of the two diverging energies.
    pub resonant_energy: f64,
    /// The shared extrapolated energy.
    pub candidate_energy: f64,
    /// Whether the two energies lie on opposite sides of the candidate.
    pub straddles: bool,
}

impl RepulsionBound {
    pub fn contains(&self, gap: f64) -> bool {
        gap > self.bound_low && gap < self.bound_high
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderComparison {
    /// First `n` at which the ladders pick different eigenstates.
    pub divergence_n: Option<usize>,
    pub bound: Option<RepulsionBound>,
}

/// Finds where two ladders of the same spectrum part ways.
///
/// A [`RepulsionBound`] is reported when both ladders are continuity
/// ladders that chose their diverging entries from inside their windows
/// around a shared candidate energy.
pub fn compare_ladders(a: &LabelLadder, b: &LabelLadder) -> Result<LadderComparison> {
    if a.provenance != b.provenance {
        return Err(Error::MismatchedLadders("ladders come from different spectra".into()));
    }
    if a.p != b.p {
        return Err(Error::MismatchedLadders(format!("qubit labels differ ({} vs {})", a.p, b.p)));
    }
    let divergence_n = a
        .entries
        .iter()
        .zip(&b.entries)
        .position(|(x, y)| x.eigen_index != y.eigen_index);
    let bound = divergence_n.and_then(|n| repulsion_bound(a, b, n));
    Ok(LadderComparison { divergence_n, bound })
}

fn repulsion_bound(a: &LabelLadder, b: &LabelLadder, n: usize) -> Option<RepulsionBound> {
    if a.method != Method::Continuity || b.method != Method::Continuity {
        return None;
    }
    let (ea, eb) = (&a.entries[n], &b.entries[n]);
    let (ca, cb) = (ea.candidate_energy?, eb.candidate_energy?);
    if ca != cb || ea.window_fallback || eb.window_fallback {
        return None;
    }
    let (hi, lo, d1, d2) = if ea.energy >= eb.energy {
        (ea, eb, a.delta?, b.delta?)
    } else {
        (eb, ea, b.delta?, a.delta?)
    };
    Some(RepulsionBound {
        divergence_n: n,
        delta_1: d1,
        delta_2: d2,
        bound_low: 0.0,
        bound_high: d1 + d2,
        resonant_energy: 0.5 * (hi.energy + lo.energy),
        candidate_energy: ca,
        straddles: lo.energy <= ca && ca <= hi.energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(energies: &[f64], occ: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (energies.to_vec(), occ.to_vec())
    }

    #[test]
    fn window_is_inclusive_at_the_edge() {
        let (e, q) = synth(&[0.0, 0.5, 1.0, 1.5], &[0.0; 4]);
        let l = Levels::new(&e, &q);
        assert_eq!(l.window(1.0, 1.0), vec![1, 2, 3]);
        assert_eq!(l.window(1.0, 0.5), vec![2]);
        assert!(l.window(0.75, 0.4).is_empty());
    }

    #[test]
    fn closest_two_includes_ties() {
        let (e, q) = synth(&[0.0, 1.0, 2.0, 3.0, 10.0], &[0.0; 5]);
        let l = Levels::new(&e, &q);
        assert_eq!(l.closest_two(1.2), vec![1, 2]);
        // 1.0 is closest, 0.0 and 2.0 tie for second
        assert_eq!(l.closest_two(1.0), vec![0, 1, 2]);
        assert_eq!(l.closest_two(100.0), vec![3, 4]);
    }

    #[test]
    fn selection_prefers_occupancy_then_energy_then_index() {
        let e = [0.99, 1.0, 1.01, 1.02];
        let q = [0.5, 0.1, 0.1, 0.3];
        let l = Levels::new(&e, &q);
        let c = select_in_window(&l, 1.008, 0.05, 0.0);
        // 1 and 2 tie on occupancy; 2 is closer to the target
        assert_eq!(c.index, 2);
        assert!(!c.fallback);
        let e = [1.0, 1.0, 3.0];
        let q = [0.2, 0.2, 0.0];
        let l = Levels::new(&e, &q);
        assert_eq!(select_in_window(&l, 1.0, 0.1, 0.0).index, 0);
    }

    #[test]
    fn empty_window_falls_back_to_two_nearest() {
        let e = [0.0, 1.0, 2.0];
        let q = [0.0, 3.0, 0.1];
        let l = Levels::new(&e, &q);
        let c = select_in_window(&l, 1.4, 0.1, 0.0);
        assert!(c.fallback);
        assert_eq!(c.candidates, vec![1, 2]);
        assert_eq!(c.index, 2);
    }

    #[test]
    fn walk_extrapolates_linearly() {
        // harmonic ladder with spacing 0.99 plus distractors
        let mut e: Vec<f64> = (0..10).map(|n| 0.99 * n as f64).collect();
        let mut q = vec![0.0; 10];
        e.push(2.975);
        q.push(2.0);
        let mut idx: Vec<usize> = (0..e.len()).collect();
        idx.sort_by(|&a, &b| e[a].total_cmp(&e[b]));
        let e: Vec<f64> = idx.iter().map(|&k| e[k]).collect();
        let q: Vec<f64> = idx.iter().map(|&k| q[k]).collect();
        let l = Levels::new(&e, &q);
        let entries = continuity_walk(&l, &[0, 1], 0.02, 6, 1.0);
        let energies: Vec<f64> = entries.iter().map(|x| x.energy).collect();
        for (n, en) in energies.iter().enumerate() {
            assert!((en - 0.99 * n as f64).abs() < 1e-12);
        }
        // with the bare extrapolation the n = 1 candidate (1.0) misses 0.99 for a tiny window
        let entries = continuity_walk(&l, &[0], 0.001, 2, 1.0);
        assert!(entries[1].window_fallback);
        assert_eq!(entries[1].energy, 0.99);
    }

    #[test]
    fn reused_eigenstates_are_diagnosed() {
        // only one level near the ladder: every step lands on it
        let e = [0.0, 1.0, 50.0];
        let q = [0.0, 0.0, 0.0];
        let l = Levels::new(&e, &q);
        let ladder = label_continuity_levels(&l, Provenance::Synthetic("t".into()), 0, &[0], 0.1, 3);
        assert!(!ladder.diagnostics.is_empty());
    }

    #[test]
    fn identical_ladders_do_not_diverge() {
        let e: Vec<f64> = (0..8).map(|n| n as f64).collect();
        let q = vec![0.0; 8];
        let l = Levels::new(&e, &q);
        let a = label_continuity_levels(&l, Provenance::Synthetic("s".into()), 0, &[0], 0.01, 5);
        let b = label_continuity_levels(&l, Provenance::Synthetic("s".into()), 0, &[0], 0.02, 5);
        let cmp = compare_ladders(&a, &b).unwrap();
        assert_eq!(cmp.divergence_n, None);
        assert!(cmp.bound.is_none());
        let c = label_continuity_levels(&l, Provenance::Synthetic("other".into()), 0, &[0], 0.02, 5);
        assert!(compare_ladders(&a, &c).is_err());
    }

    #[test]
    fn equal_windows_give_twice_delta() {
        // two windows of the same width that diverge only through the start
        let e = [0.0, 0.995, 1.004, 2.0];
        let q = [0.0, 0.2, 0.3, 0.0];
        let l = Levels::new(&e, &q);
        let mut a = label_continuity_levels(&l, Provenance::Synthetic("s".into()), 0, &[0], 0.012, 1);
        let b = label_continuity_levels(&l, Provenance::Synthetic("s".into()), 0, &[0], 0.012, 1);
        // force a different in-window choice on one ladder
        a.entries[1] = LadderEntry {
            eigen_index: 2,
            energy: 1.004,
            occupancy: 0.3,
            ..a.entries[1]
        };
        let bound = compare_ladders(&a, &b).unwrap().bound.unwrap();
        assert_eq!(bound.bound_high, 2.0 * 0.012);
        assert!(bound.straddles);
        assert!((bound.resonant_energy - 0.9995).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(ContinuityConfig::new(0.01, 260).validate(350).is_ok());
        assert!(matches!(
            ContinuityConfig::new(0.01, 261).validate(350),
            Err(Error::TruncationMargin { .. })
        ));
        assert!(ContinuityConfig::new(0.01, 300).with_margin(0).validate(350).is_ok());
        assert!(ContinuityConfig::new(0.0, 10).validate(350).is_err());
    }
}
