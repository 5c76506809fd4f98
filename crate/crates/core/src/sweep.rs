//! Batch runs over offset charges and energy windows.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::cache::{self, SolutionCache};
use crate::config::{QubitLevel, RunConfig};
use crate::error::{Error, Result};
use crate::labeling::{self, LabelLadder, LadderComparison, Method};
use crate::observables::{self, FrequencyCurve, OccupancyCurve, ResonanceFeature};
use crate::operators::{self, SystemSpec};
use crate::output::{self, Manifest};
use crate::spectrum::EigenSolution;

/// A ladder with everything derived from it.
#[derive(Clone, Debug)]
pub struct LadderReport {
    pub ladder: LabelLadder,
    pub frequency: FrequencyCurve,
    pub occupancy: OccupancyCurve,
    pub features: Vec<ResonanceFeature>,
    /// Largest top-two-Fock-level population over the ladder's eigenstates.
    pub ceiling_population: f64,
}

impl LadderReport {
    pub fn new(sol: &EigenSolution, ladder: LabelLadder, detector: &observables::DetectorConfig) -> Result<Self> {
        let frequency = observables::cavity_frequency_curve(&ladder)?;
        let occupancy = observables::occupancy_curve(&ladder);
        let features = observables::detect_features(&frequency, detector);
        let ceiling_population = ladder
            .entries
            .iter()
            .map(|e| sol.fock_ceiling_population(e.eigen_index))
            .fold(0.0, f64::max);
        Ok(Self {
            ladder,
            frequency,
            occupancy,
            features,
            ceiling_population,
        })
    }

    /// File stem such as `ng0.1000_g_continuity-d0.015`.
    pub fn stem(&self, n_g: f64) -> String {
        let method = match self.ladder.delta {
            Some(d) => format!("{}-d{d}", self.ladder.method),
            None => self.ladder.method.to_string(),
        };
        format!("ng{n_g:.4}_{}_{method}", QubitLevel(self.ladder.p))
    }
}

/// Results for one `(n_g, ladder)` grid point.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub n_g: f64,
    pub ladder_start: QubitLevel,
    pub reports: Vec<LadderReport>,
    /// `(a, b, comparison)` with `a` and `b` indexing `reports`.
    pub comparisons: Vec<(usize, usize, LadderComparison)>,
    pub residual: f64,
    pub wall_seconds: f64,
    pub error: Option<String>,
}

impl PointResult {
    fn failed(n_g: f64, ladder_start: QubitLevel, err: &Error, wall_seconds: f64) -> Self {
        Self {
            n_g,
            ladder_start,
            reports: Vec::new(),
            comparisons: Vec::new(),
            residual: f64::NAN,
            wall_seconds,
            error: Some(err.to_string()),
        }
    }

    pub fn report(&self, method: Method, delta: Option<f64>) -> Option<&LadderReport> {
        self.reports
            .iter()
            .find(|r| r.ladder.method == method && (delta.is_none() || r.ladder.delta == delta))
    }

    pub fn diagnostics(&self) -> Vec<String> {
        self.reports
            .iter()
            .flat_map(|r| r.ladder.diagnostics.iter().map(move |d| format!("{}: {d}", r.ladder.label())))
            .chain(self.error.iter().cloned())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
    pub manifest: Manifest,
}

impl SweepResult {
    pub fn has_diagnostics(&self) -> bool {
        self.points.iter().any(|p| !p.diagnostics().is_empty())
    }
}

/// Labels ladder `p` of `sol` with every requested method; continuity uses `deltas`.
pub fn label_methods(
    sol: &EigenSolution,
    p: usize,
    methods: &[Method],
    cfg: &RunConfig,
    deltas: &[f64],
) -> Result<Vec<LabelLadder>> {
    let l = &cfg.labeling;
    let mut out = Vec::new();
    for &m in methods {
        match m {
            Method::Overlap => out.push(labeling::label_overlap(sol, p, l.n_max)?),
            Method::Block => out.push(labeling::label_block(sol, p, l.n_max)?),
            Method::Recursive => out.push(labeling::label_recursive(sol, p, l.n_max)?),
            Method::Continuity => {
                for &d in deltas {
                    out.push(labeling::label_continuity(sol, p, &l.continuity(d))?);
                }
            }
        }
    }
    Ok(out)
}

/// Largest eigen-residual over the states used by `ladders` (sampled every
/// tenth entry plus the ends).
pub fn ladder_residual(sol: &EigenSolution, ladders: &[LabelLadder]) -> Result<f64> {
    let h = operators::build_composite_sparse(sol.spec())?;
    let mut idx: Vec<usize> = ladders
        .iter()
        .flat_map(|l| {
            let last = l.len().saturating_sub(1);
            l.entries
                .iter()
                .filter(move |e| e.n % 10 == 0 || e.n == last)
                .map(|e| e.eigen_index)
        })
        .collect();
    idx.sort_unstable();
    idx.dedup();
    Ok(sol.residuals(&h, idx).into_iter().fold(0.0, f64::max))
}

fn point_for(
    sol: &EigenSolution,
    cfg: &RunConfig,
    p: QubitLevel,
    methods: &[Method],
    deltas: &[f64],
) -> Result<(Vec<LadderReport>, Vec<(usize, usize, LadderComparison)>, f64)> {
    let ladders = label_methods(sol, p.0, methods, cfg, deltas)?;
    let residual = ladder_residual(sol, &ladders)?;
    let detector = cfg.labeling.detector();
    let reports = ladders
        .into_iter()
        .map(|l| LadderReport::new(sol, l, &detector))
        .collect::<Result<Vec<_>>>()?;
    let mut comparisons = Vec::new();
    for a in 0..reports.len() {
        for b in a + 1..reports.len() {
            comparisons.push((a, b, labeling::compare_ladders(&reports[a].ladder, &reports[b].ladder)?));
        }
    }
    Ok((reports, comparisons, residual))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn open_cache(cfg: &RunConfig) -> Option<SolutionCache> {
    if cfg.cache {
        SolutionCache::from_env()
    } else {
        None
    }
}

/// Diagonalizes each `n_g` in the grid and labels every configured ladder.
/// A failing point is recorded and the others continue.
pub fn run_offset_charge_sweep(cfg: &RunConfig, workers: usize) -> Result<SweepResult> {
    let sweep = cfg
        .sweep
        .as_ref()
        .filter(|s| !s.n_g.is_empty())
        .ok_or_else(|| Error::Config("offset-charge sweep needs a non-empty [sweep] n_g grid".into()))?;
    let ladders = cfg.sweep_ladders();
    let cache = open_cache(cfg);
    let per_ng: Vec<Vec<PointResult>> = pool(workers)?.install(|| {
        sweep
            .n_g
            .par_iter()
            .map(|&n_g| {
                let start = Instant::now();
                let spec = SystemSpec {
                    n_g,
                    ..cfg.system.clone()
                };
                let sol = match cache::solve_cached(&spec, cache.as_ref()) {
                    Ok((s, _)) => s,
                    Err(e) => {
                        let t = start.elapsed().as_secs_f64();
                        return ladders.iter().map(|&p| PointResult::failed(n_g, p, &e, t)).collect();
                    }
                };
                let solve_time = start.elapsed().as_secs_f64();
                ladders
                    .iter()
                    .map(|&p| {
                        let t0 = Instant::now();
                        let delta = sweep.delta_for(p, n_g, cfg.labeling.delta);
                        match point_for(&sol, cfg, p, &cfg.labeling.methods, &[delta]) {
                            Ok((reports, comparisons, residual)) => PointResult {
                                n_g,
                                ladder_start: p,
                                reports,
                                comparisons,
                                residual,
                                wall_seconds: solve_time + t0.elapsed().as_secs_f64(),
                                error: None,
                            },
                            Err(e) => PointResult::failed(n_g, p, &e, solve_time + t0.elapsed().as_secs_f64()),
                        }
                    })
                    .collect()
            })
            .collect()
    });
    let points: Vec<PointResult> = per_ng.into_iter().flatten().collect();
    let manifest = sweep_manifest(cfg, "offset_charge", &points)?;
    Ok(SweepResult { points, manifest })
}

/// One diagonalization at the configured `n_g`, continuity ladders for every
/// window in the grid plus the other configured methods, and all pairwise
/// ladder comparisons.
pub fn run_window_sweep(cfg: &RunConfig, workers: usize) -> Result<SweepResult> {
    let sweep = cfg
        .sweep
        .as_ref()
        .filter(|s| !s.delta.is_empty())
        .ok_or_else(|| Error::Config("window sweep needs a non-empty [sweep] delta grid".into()))?;
    let start = Instant::now();
    let cache = open_cache(cfg);
    let (sol, _) = cache::solve_cached(&cfg.system, cache.as_ref())?;
    let solve_time = start.elapsed().as_secs_f64();
    let mut methods = cfg.labeling.methods.clone();
    if !methods.contains(&Method::Continuity) {
        methods.push(Method::Continuity);
    }
    let ladders = cfg.sweep_ladders();
    let points = pool(workers)?.install(|| {
        ladders
            .par_iter()
            .map(|&p| {
                let t0 = Instant::now();
                match point_for(&sol, cfg, p, &methods, &sweep.delta) {
                    Ok((reports, comparisons, residual)) => PointResult {
                        n_g: cfg.system.n_g,
                        ladder_start: p,
                        reports,
                        comparisons,
                        residual,
                        wall_seconds: solve_time + t0.elapsed().as_secs_f64(),
                        error: None,
                    },
                    Err(e) => PointResult::failed(cfg.system.n_g, p, &e, solve_time + t0.elapsed().as_secs_f64()),
                }
            })
            .collect::<Vec<_>>()
    });
    let manifest = sweep_manifest(cfg, "window", &points)?;
    Ok(SweepResult { points, manifest })
}

fn sweep_manifest(cfg: &RunConfig, kind: &str, points: &[PointResult]) -> Result<Manifest> {
    let mut m = Manifest::new();
    m.push("sweep", kind);
    m.push_config(&crate::config::serialize_config(cfg)?);
    m.push("points", points.len());
    for (i, p) in points.iter().enumerate() {
        let key = |k: &str| format!("point.{i:03}.{k}");
        m.push_f64(key("n_g"), p.n_g);
        m.push(key("ladder"), p.ladder_start);
        m.push(key("wall_seconds"), format!("{:.3}", p.wall_seconds));
        m.push_f64(key("residual"), p.residual);
        for r in &p.reports {
            let rk = |k: &str| key(&format!("{}.{k}", r.ladder.label()));
            m.push_f64(rk("ceiling_population"), r.ceiling_population);
            m.push(rk("features"), r.features.len());
        }
        for (a, b, c) in &p.comparisons {
            let ck = key(&format!("compare.{}.{}", p.reports[*a].ladder.label(), p.reports[*b].ladder.label()));
            match c.divergence_n {
                Some(n) => m.push(format!("{ck}.divergence_n"), n),
                None => m.push(format!("{ck}.divergence_n"), "none"),
            }
            if let Some(bound) = &c.bound {
                m.push_f64(format!("{ck}.bound_high"), bound.bound_high);
                m.push_f64(format!("{ck}.resonant_energy"), bound.resonant_energy);
            }
        }
        for (j, d) in p.diagnostics().iter().enumerate() {
            m.push(key(&format!("diagnostic.{j}")), d);
        }
    }
    Ok(m)
}

/// Writes ladder, curve and feature files for every point plus `manifest.txt`.
pub fn write_sweep(result: &SweepResult, dir: &Path) -> Result<()> {
    for p in &result.points {
        for r in &p.reports {
            let stem = r.stem(p.n_g);
            output::write_file(dir, &format!("{stem}.ladder.csv"), &output::ladder_csv(&r.ladder))?;
            output::write_file(dir, &format!("{stem}.freq.csv"), &output::frequency_csv(&r.frequency))?;
            output::write_file(dir, &format!("{stem}.occ.csv"), &output::occupancy_csv(&r.occupancy))?;
            output::write_file(dir, &format!("{stem}.features.txt"), &output::features_text(&r.features))?;
        }
    }
    output::write_file(dir, "manifest.txt", &result.manifest.render())
}
