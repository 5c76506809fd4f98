//! Argument handling and subcommand drivers for the `dressed` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dressed_core::cache::{self, SolutionCache};
use dressed_core::config::{self, DriveConfig, QubitLevel, RunConfig, SweepConfig};
use dressed_core::dynamics::{self, Frame, InitialState};
use dressed_core::labeling::{self, FirstStep, Method};
use dressed_core::operators;
use dressed_core::output::{self, Manifest};
use dressed_core::spectrum::EigenSolution;
use dressed_core::sweep::{self, LadderReport};
use dressed_core::{CouplingForm, SystemSpec};

#[derive(Debug, Parser)]
#[command(name = "dressed", version, allow_negative_numbers = true, about = "Label transmon-cavity eigenstates and trace cavity-frequency ladders")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1, env = "DRESSED_WORKERS")]
    pub workers: usize,
    /// Skip the eigensolution cache even when DRESSED_CACHE_DIR is set.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub labeling: LabelingArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct SystemArgs {
    #[arg(long, global = true)]
    pub e_c: Option<f64>,
    #[arg(long, global = true)]
    pub e_j: Option<f64>,
    #[arg(long, global = true)]
    pub g: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub n_g: Option<f64>,
    #[arg(long, global = true)]
    pub charge_cutoff: Option<usize>,
    #[arg(long, global = true)]
    pub fock_cutoff: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub coupling: Option<Coupling>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Coupling {
    Full,
    Rwa,
}

#[derive(Debug, Default, Args)]
pub struct LabelingArgs {
    /// Comma-separated: overlap, block, recursive, continuity.
    #[arg(long, global = true, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Ladder starting levels: g, e, f or an index.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ladders: Option<Vec<QubitLevel>>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub first_step: Option<FirstStepArg>,
    #[arg(long, global = true)]
    pub truncation_margin: Option<usize>,
    #[arg(long, global = true)]
    pub peak_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub baseline_window: Option<usize>,
    #[arg(long, global = true)]
    pub return_window: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FirstStepArg {
    Extrapolate,
    Overlap,
}

#[derive(Debug, Default, Args)]
pub struct DriveArgs {
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub omega_d: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub fock_cutoff_dyn: Option<usize>,
    #[arg(long)]
    pub sample_every: Option<f64>,
    #[arg(long)]
    pub stop_photons: Option<f64>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    #[arg(long)]
    pub initial: Option<QubitLevel>,
    /// Photon interval `lo,hi` for trajectory-ladder comparisons.
    #[arg(long, value_delimiter = ',')]
    pub compare_range: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FrameArg {
    Lab,
    Displaced,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepKind {
    OffsetCharge,
    Window,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagonalize and write the lowest eigenpairs.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Label one ladder with one method.
    #[command(allow_negative_numbers = true)]
    Label {
        #[arg(long)]
        method: Option<Method>,
    },
    /// Ladders, cavity-frequency and occupancy curves, and resonance features.
    #[command(allow_negative_numbers = true)]
    Freq,
    /// Driven trajectory from a dressed vacuum state.
    #[command(allow_negative_numbers = true)]
    Dynamics {
        #[command(flatten)]
        drive: DriveArgs,
        /// Repeat the run at half the step and report the difference.
        #[arg(long)]
        check_convergence: bool,
    },
    /// Pairwise ladder comparisons, plus trajectory ranking when a drive is configured.
    #[command(allow_negative_numbers = true)]
    Compare {
        #[command(flatten)]
        drive: DriveArgs,
    },
    /// Offset-charge or energy-window grid.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long, value_enum, default_value = "offset-charge")]
        kind: SweepKind,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        n_g_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        delta_grid: Option<Vec<f64>>,
    },
}

/// What a finished command wants reported.
#[derive(Debug, Default)]
pub struct Outcome {
    pub output_dir: PathBuf,
    pub diagnostics: Vec<String>,
}

fn spec_from_flags(s: &SystemArgs) -> anyhow::Result<SystemSpec> {
    let need = |v: Option<f64>, name: &str| v.with_context(|| format!("--{name} is required without --config"));
    Ok(SystemSpec::new(
        need(s.e_c, "e-c")?,
        need(s.e_j, "e-j")?,
        need(s.g, "g")?,
        s.n_g.unwrap_or(0.0),
    ))
}

/// Config file (if any) with command-line overrides applied, revalidated.
pub fn build_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            config::parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => RunConfig::new(spec_from_flags(&cli.system)?),
    };
    let s = &cli.system;
    let sys = &mut cfg.system;
    set(&mut sys.e_c, s.e_c);
    set(&mut sys.e_j, s.e_j);
    set(&mut sys.g, s.g);
    set(&mut sys.n_g, s.n_g);
    set(&mut sys.charge_cutoff, s.charge_cutoff);
    set(&mut sys.fock_cutoff, s.fock_cutoff);
    if let Some(c) = s.coupling {
        sys.coupling_form = match c {
            Coupling::Full => CouplingForm::Full,
            Coupling::Rwa => CouplingForm::Rwa,
        };
    }
    let l = &cli.labeling;
    let lab = &mut cfg.labeling;
    set(&mut lab.methods, l.methods.clone());
    set(&mut lab.ladders, l.ladders.clone());
    set(&mut lab.delta, l.delta);
    set(&mut lab.n_max, l.n_max);
    set(&mut lab.truncation_margin, l.truncation_margin);
    set(&mut lab.peak_threshold, l.peak_threshold);
    set(&mut lab.baseline_window, l.baseline_window);
    set(&mut lab.return_window, l.return_window);
    if let Some(f) = l.first_step {
        lab.first_step = match f {
            FirstStepArg::Extrapolate => FirstStep::Extrapolate,
            FirstStepArg::Overlap => FirstStep::Overlap,
        };
    }
    set(&mut cfg.output_dir, cli.output_dir.clone());
    if cli.no_cache {
        cfg.cache = false;
    }
    match &cli.command {
        Command::Dynamics { drive, .. } | Command::Compare { drive } => apply_drive(&mut cfg, drive)?,
        Command::Sweep {
            n_g_grid, delta_grid, ..
        } if n_g_grid.is_some() || delta_grid.is_some() => {
            let sw = cfg.sweep.get_or_insert_with(SweepConfig::default);
            set(&mut sw.n_g, n_g_grid.clone());
            set(&mut sw.delta, delta_grid.clone());
        }
        _ => {}
    }
    // Round-trip through the parser so overrides get the same validation as files.
    let text = config::serialize_config(&cfg)?;
    config::parse_config(&text).context("invalid configuration after applying flags")
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_drive(cfg: &mut RunConfig, d: &DriveArgs) -> anyhow::Result<()> {
    let any = d.amplitude.is_some() || d.omega_d.is_some() || d.t_end.is_some() || d.fock_cutoff_dyn.is_some();
    if cfg.drive.is_none() {
        if !any {
            return Ok(());
        }
        let need = |v: Option<f64>, name: &str| v.with_context(|| format!("--{name} is required for a drive"));
        let params = dynamics::DriveParams::new(
            need(d.amplitude, "amplitude")?,
            need(d.omega_d, "omega-d")?,
            need(d.t_end, "t-end")?,
            d.fock_cutoff_dyn.context("--fock-cutoff-dyn is required for a drive")?,
        );
        cfg.drive = Some(DriveConfig {
            amplitude: params.amplitude,
            omega_d: params.omega_d,
            t_end: params.t_end,
            dt: params.dt,
            fock_cutoff_dyn: params.fock_cutoff_dyn,
            sample_every: params.sample_every,
            stop_photons: None,
            ceiling_limit: params.ceiling_limit,
            frame: Frame::Displaced,
            initial: QubitLevel::GROUND,
            compare_range: None,
        });
    }
    let dc = cfg.drive.as_mut().expect("drive set above");
    set(&mut dc.amplitude, d.amplitude);
    set(&mut dc.omega_d, d.omega_d);
    set(&mut dc.t_end, d.t_end);
    set(&mut dc.dt, d.dt);
    set(&mut dc.fock_cutoff_dyn, d.fock_cutoff_dyn);
    set(&mut dc.sample_every, d.sample_every);
    if d.stop_photons.is_some() {
        dc.stop_photons = d.stop_photons;
    }
    if let Some(f) = d.frame {
        dc.frame = match f {
            FrameArg::Lab => Frame::Lab,
            FrameArg::Displaced => Frame::Displaced,
        };
    }
    set(&mut dc.initial, d.initial);
    if let Some(r) = &d.compare_range {
        let &[lo, hi] = r.as_slice() else {
            bail!("--compare-range takes two values, lo,hi (got {})", r.len());
        };
        dc.compare_range = Some([lo, hi]);
    }
    Ok(())
}

fn solve(cfg: &RunConfig, manifest: &mut Manifest) -> anyhow::Result<EigenSolution> {
    let cache = if cfg.cache { SolutionCache::from_env() } else { None };
    let start = Instant::now();
    let (sol, hit) = cache::solve_cached(&cfg.system, cache.as_ref())?;
    manifest.push("cache_hit", hit);
    manifest.push("solve_seconds", format!("{:.3}", start.elapsed().as_secs_f64()));
    manifest.push("dim", sol.dim());
    Ok(sol)
}

fn base_manifest(cfg: &RunConfig, command: &str) -> anyhow::Result<Manifest> {
    let mut m = Manifest::new();
    m.push("command", command);
    m.push_config(&config::serialize_config(cfg)?);
    Ok(m)
}

fn ladder_reports(sol: &EigenSolution, cfg: &RunConfig, methods: &[Method]) -> anyhow::Result<Vec<LadderReport>> {
    let detector = cfg.labeling.detector();
    let mut out = Vec::new();
    for &p in &cfg.labeling.ladders {
        for l in sweep::label_methods(sol, p.0, methods, cfg, &[cfg.labeling.delta])? {
            out.push(LadderReport::new(sol, l, &detector)?);
        }
    }
    Ok(out)
}

fn record_reports(m: &mut Manifest, sol: &EigenSolution, reports: &[LadderReport]) -> anyhow::Result<Vec<String>> {
    let ladders: Vec<_> = reports.iter().map(|r| r.ladder.clone()).collect();
    m.push_f64("residual", sweep::ladder_residual(sol, &ladders)?);
    let mut diagnostics = Vec::new();
    for r in reports {
        let key = format!("{}.{}", QubitLevel(r.ladder.p), r.ladder.label());
        m.push_f64(format!("{key}.ceiling_population"), r.ceiling_population);
        m.push(format!("{key}.features"), r.features.len());
        for d in &r.ladder.diagnostics {
            diagnostics.push(format!("{key}: {d}"));
        }
    }
    Ok(diagnostics)
}

fn write_reports(dir: &Path, n_g: f64, reports: &[LadderReport], curves: bool) -> anyhow::Result<()> {
    for r in reports {
        let stem = r.stem(n_g);
        output::write_file(dir, &format!("{stem}.ladder.csv"), &output::ladder_csv(&r.ladder))?;
        if curves {
            output::write_file(dir, &format!("{stem}.freq.csv"), &output::frequency_csv(&r.frequency))?;
            output::write_file(dir, &format!("{stem}.occ.csv"), &output::occupancy_csv(&r.occupancy))?;
            output::write_file(dir, &format!("{stem}.features.txt"), &output::features_text(&r.features))?;
        }
    }
    Ok(())
}

fn finish(dir: &Path, mut m: Manifest, diagnostics: Vec<String>) -> anyhow::Result<Outcome> {
    m.push("diagnostics", diagnostics.len());
    for (i, d) in diagnostics.iter().enumerate() {
        m.push(format!("diagnostic.{i}"), d);
    }
    output::write_file(dir, "manifest.txt", &m.render())?;
    Ok(Outcome {
        output_dir: dir.to_path_buf(),
        diagnostics,
    })
}

fn drive_run(
    sol: &EigenSolution,
    cfg: &RunConfig,
    m: &mut Manifest,
    check: bool,
) -> anyhow::Result<(dynamics::Trajectory, Option<f64>)> {
    let Some(d) = &cfg.drive else {
        bail!("no drive configured; pass --amplitude, --omega-d, --t-end and --fock-cutoff-dyn or add a [drive] section")
    };
    let init = InitialState::dressed_vacuum(sol, d.initial.0, d.fock_cutoff_dyn)?;
    m.push("initial", &init.description);
    let start = Instant::now();
    let (traj, diff) = if check {
        let (t, diff) = dynamics::step_halving_check(&cfg.system, &d.params(), &init, d.frame)?;
        m.push_f64("step_halving_difference", diff);
        (t, Some(diff))
    } else {
        let t = match d.frame {
            Frame::Lab => dynamics::integrate_lab(&cfg.system, &d.params(), &init)?,
            Frame::Displaced => dynamics::integrate_displaced(&cfg.system, &d.params(), &init)?,
        };
        (t, None)
    };
    m.push("dynamics_seconds", format!("{:.3}", start.elapsed().as_secs_f64()));
    m.push_f64("max_norm_drift", traj.max_norm_drift);
    m.push_f64("max_fock_ceiling_population", traj.max_ceiling_population);
    m.push_f64("final_photon_lab", traj.final_sample().photon_lab);
    Ok((traj, diff))
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = build_config(cli)?;
    let dir = cfg.output_dir.clone();
    match &cli.command {
        Command::Spectrum { count } => {
            let mut m = base_manifest(&cfg, "spectrum")?;
            let sol = solve(&cfg, &mut m)?;
            let h = operators::build_composite_sparse(&cfg.system)?;
            let count = (*count).min(sol.dim());
            let residual = sol.residuals(&h, 0..count).into_iter().fold(0.0, f64::max);
            m.push_f64("residual", residual);
            let ceiling = (0..count).map(|k| sol.fock_ceiling_population(k)).fold(0.0, f64::max);
            m.push_f64("max_fock_ceiling_population", ceiling);
            output::write_file(&dir, "spectrum.csv", &output::spectrum_csv(&sol, count))?;
            finish(&dir, m, Vec::new())
        }
        Command::Label { method } => {
            let method = method.unwrap_or(cfg.labeling.methods[0]);
            let mut one = cfg.clone();
            one.labeling.ladders.truncate(1);
            let mut m = base_manifest(&one, "label")?;
            let sol = solve(&one, &mut m)?;
            let reports = ladder_reports(&sol, &one, &[method])?;
            let diagnostics = record_reports(&mut m, &sol, &reports)?;
            write_reports(&dir, one.system.n_g, &reports, false)?;
            finish(&dir, m, diagnostics)
        }
        Command::Freq => {
            let mut m = base_manifest(&cfg, "freq")?;
            let sol = solve(&cfg, &mut m)?;
            let reports = ladder_reports(&sol, &cfg, &cfg.labeling.methods)?;
            let diagnostics = record_reports(&mut m, &sol, &reports)?;
            write_reports(&dir, cfg.system.n_g, &reports, true)?;
            finish(&dir, m, diagnostics)
        }
        Command::Dynamics { check_convergence, .. } => {
            let mut m = base_manifest(&cfg, "dynamics")?;
            let sol = solve(&cfg, &mut m)?;
            let (traj, diff) = drive_run(&sol, &cfg, &mut m, *check_convergence)?;
            output::write_file(&dir, "trajectory.csv", &output::trajectory_csv(&traj))?;
            let mut diagnostics = Vec::new();
            if traj.max_norm_drift > 1e-6 {
                diagnostics.push(format!("norm drift {:e} exceeds 1e-6", traj.max_norm_drift));
            }
            if let Some(d) = diff.filter(|&d| d > 1e-6) {
                diagnostics.push(format!("step halving changed observables by {d:e}"));
            }
            finish(&dir, m, diagnostics)
        }
        Command::Compare { .. } => {
            let mut m = base_manifest(&cfg, "compare")?;
            let sol = solve(&cfg, &mut m)?;
            let reports = ladder_reports(&sol, &cfg, &cfg.labeling.methods)?;
            let mut diagnostics = record_reports(&mut m, &sol, &reports)?;
            let mut text = String::new();
            for (i, a) in reports.iter().enumerate() {
                for b in &reports[i + 1..] {
                    if a.ladder.p != b.ladder.p {
                        continue;
                    }
                    let c = labeling::compare_ladders(&a.ladder, &b.ladder)?;
                    let div = c.divergence_n.map_or("none".to_string(), |n| n.to_string());
                    text += &format!("ladders {} {} {} divergence_n {div}", QubitLevel(a.ladder.p), a.ladder.label(), b.ladder.label());
                    if let Some(bd) = c.bound {
                        text += &format!(
                            " bound ({}, {}) resonant_energy {}",
                            output::fmt_f64(bd.bound_low),
                            output::fmt_f64(bd.bound_high),
                            output::fmt_f64(bd.resonant_energy)
                        );
                    }
                    text.push('\n');
                }
            }
            if let Some(d) = cfg.drive.clone() {
                let (traj, _) = drive_run(&sol, &cfg, &mut m, false)?;
                output::write_file(&dir, "trajectory.csv", &output::trajectory_csv(&traj))?;
                let [lo, hi] = d.compare_range.unwrap_or([0.0, cfg.labeling.n_max as f64]);
                let curves: Vec<_> = reports
                    .iter()
                    .filter(|r| r.ladder.p == d.initial.0)
                    .map(|r| r.occupancy.clone())
                    .collect();
                match dynamics::rank_ladders(&traj, &curves, lo, hi) {
                    Ok(ranking) => {
                        for (rank, r) in ranking.iter().enumerate() {
                            text += &format!(
                                "trajectory rank {} {} l1_mean {} samples {}\n",
                                rank + 1,
                                r.source,
                                output::fmt_f64(r.l1_mean),
                                r.samples_used
                            );
                        }
                    }
                    Err(e) => diagnostics.push(format!("trajectory comparison: {e}")),
                }
            }
            output::write_file(&dir, "compare.txt", &text)?;
            finish(&dir, m, diagnostics)
        }
        Command::Sweep { kind, .. } => {
            let result = match kind {
                SweepKind::OffsetCharge => sweep::run_offset_charge_sweep(&cfg, cli.workers)?,
                SweepKind::Window => sweep::run_window_sweep(&cfg, cli.workers)?,
            };
            sweep::write_sweep(&result, &dir)?;
            Ok(Outcome {
                output_dir: dir,
                diagnostics: result.points.iter().flat_map(|p| p.diagnostics()).collect(),
            })
        }
    }
}
