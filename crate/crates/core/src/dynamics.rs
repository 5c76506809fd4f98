//! Driven Schrödinger dynamics of the transmon-cavity system.
//!
//! The lab frame integrates `i d/dt psi = [H + E (e^{-i w_d t} c^dag + h.c.)] psi`
//! directly. The displaced frame writes `psi = D(alpha) phi` with
//! `D(alpha) = exp(alpha c^dag - alpha^* c)` and co-integrates
//!
//! ```text
//! d alpha/dt = -i [ w_c (alpha + <c>) + i g <N_t> + E e^{-i w_d t} ]
//! i d phi/dt = [ H_q + w_c c^dag c + i g N_t (c^dag - c) + 2 g Im(alpha) N_t
//!                + beta c^dag + beta^* c ] phi,      beta = -(w_c <c> + i g <N_t>)
//! ```
//!
//! where expectations are taken in `phi`. The drive only enters through
//! `alpha`, so the cavity truncation needs to hold the fluctuations around
//! the coherent amplitude rather than the full photon number. Scalar terms
//! of the transformed generator are dropped; they only change a global phase.
//!
//! Both frames use fourth-order Runge-Kutta in the interaction picture of
//! the diagonal part `w_i + n` (Lawson's scheme), which removes the step
//! size limit set by the bare cavity and transmon frequencies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::OccupancyCurve;
use crate::operators::{self, SystemSpec};
use crate::spectrum::EigenSolution;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Default limit on the population of the two highest Fock levels.
pub const DEFAULT_CEILING_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveParams {
    /// Drive amplitude `E` in units of `omega_c`.
    pub amplitude: f64,
    /// Drive frequency in units of `omega_c`.
    pub omega_d: f64,
    /// Final time in units of `1 / omega_c`.
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Highest Fock state kept in the dynamics basis.
    pub fock_cutoff_dyn: usize,
    /// Time between recorded samples.
    #[serde(default = "default_sample_every")]
    pub sample_every: f64,
    /// Stop once the lab-frame photon number reaches this value.
    #[serde(default)]
    pub stop_photons: Option<f64>,
    #[serde(default = "default_ceiling_limit")]
    pub ceiling_limit: f64,
}

fn default_dt() -> f64 {
    1e-3
}
fn default_sample_every() -> f64 {
    0.5
}
fn default_ceiling_limit() -> f64 {
    DEFAULT_CEILING_LIMIT
}

impl DriveParams {
    pub fn new(amplitude: f64, omega_d: f64, t_end: f64, fock_cutoff_dyn: usize) -> Self {
        Self {
            amplitude,
            omega_d,
            t_end,
            dt: default_dt(),
            fock_cutoff_dyn,
            sample_every: default_sample_every(),
            stop_photons: None,
            ceiling_limit: default_ceiling_limit(),
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_sample_every(mut self, every: f64) -> Self {
        self.sample_every = every;
        self
    }

    pub fn with_stop_photons(mut self, n: f64) -> Self {
        self.stop_photons = Some(n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidDrive {
                field,
                reason: reason.into(),
            })
        };
        if !(self.amplitude >= 0.0) {
            return bad("amplitude", "must be >= 0");
        }
        if !self.omega_d.is_finite() {
            return bad("omega_d", "must be finite");
        }
        if !(self.dt > 0.0) {
            return bad("dt", "must be > 0");
        }
        if !(self.t_end > 0.0) {
            return bad("t_end", "must be > 0");
        }
        if !(self.sample_every >= self.dt) {
            return bad("sample_every", "must be >= dt");
        }
        if self.fock_cutoff_dyn < 2 {
            return bad("fock_cutoff_dyn", "must be >= 2");
        }
        Ok(())
    }

    fn stride(&self) -> usize {
        ((self.sample_every / self.dt).round() as usize).max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Displaced,
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Displaced => "displaced",
        })
    }
}

/// Initial state in the dynamics basis (qubit eigenbasis (x) Fock, qubit-major).
#[derive(Clone, Debug)]
pub struct InitialState {
    pub vector: Vec<Complex64>,
    pub description: String,
}

impl InitialState {
    /// Copies eigenstate `index` of `sol` into a basis with `fock_cutoff_dyn`,
    /// dropping or zero-padding Fock levels as needed, then renormalizes.
    pub fn from_eigenstate(sol: &EigenSolution, index: usize, fock_cutoff_dyn: usize, description: &str) -> Self {
        let src = sol.layout();
        let v = sol.eigenvector(index);
        let dst = operators::CompositeLayout {
            levels: src.levels,
            fock_dim: fock_cutoff_dyn + 1,
        };
        let mut out = vec![ZERO; dst.dim()];
        for i in 0..src.levels {
            for n in 0..src.fock_dim.min(dst.fock_dim) {
                out[dst.index(i, n)] = v[src.index(i, n)];
            }
        }
        let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        out.iter_mut().for_each(|z| *z /= norm);
        Self {
            vector: out,
            description: description.to_string(),
        }
    }

    /// The eigenstate with the largest overlap with `|p>_q (x) |0>_c`.
    pub fn dressed_vacuum(sol: &EigenSolution, p: usize, fock_cutoff_dyn: usize) -> Result<Self> {
        let index = EigenSolution::argmax(&sol.product_state_overlaps(p, 0)?);
        let label = crate::config::QubitLevel(p);
        Ok(Self::from_eigenstate(sol, index, fock_cutoff_dyn, &format!("|{label}-bar, 0-bar> (eigenstate {index})")))
    }

    pub fn product(levels: usize, fock_cutoff_dyn: usize, level: usize, photons: usize) -> Self {
        let layout = operators::CompositeLayout {
            levels,
            fock_dim: fock_cutoff_dyn + 1,
        };
        Self {
            vector: operators::product_state(&layout, level, photons),
            description: format!("product(p={level}, n={photons})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Displacement in the displaced frame, `<c>` in the lab frame.
    pub alpha: Complex64,
    pub occupancy: f64,
    pub photon_lab: f64,
    /// Lab-frame `<H>` of the undriven Hamiltonian.
    pub energy: f64,
    pub norm: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub frame: Frame,
    pub samples: Vec<Sample>,
    pub initial: String,
    pub max_norm_drift: f64,
    pub max_ceiling_population: f64,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("trajectories always hold the initial sample")
    }
}

/// Observables of one state.
struct Moments {
    norm_sqr: f64,
    c: Complex64,
    charge: Complex64,
    occupancy: f64,
    photons: f64,
    diag_energy: f64,
    coupling_energy: f64,
    ceiling: f64,
}

/// Right-hand side of the driven problem in the interaction picture of
/// `diag(w_i + n)`. Internal storage is photon-major: `k = n * levels + i`.
struct Model {
    levels: usize,
    fock_dim: usize,
    g: f64,
    charge: Vec<Complex64>,
    diag: Vec<f64>,
    sqrt_n: Vec<f64>,
    amplitude: f64,
    omega_d: f64,
    frame: Frame,
}

impl Model {
    fn new(spec: &SystemSpec, drive: &DriveParams, frame: Frame) -> Result<Self> {
        let q = operators::build_qubit_eigensystem(spec)?;
        let levels = q.levels();
        let fock_dim = drive.fock_cutoff_dyn + 1;
        let mut charge = vec![ZERO; levels * levels];
        for i in 0..levels {
            for j in 0..levels {
                charge[i * levels + j] = q.charge[(i, j)];
            }
        }
        if spec.coupling_form == operators::CouplingForm::Rwa {
            return Err(Error::InvalidDrive {
                field: "coupling_form",
                reason: "driven dynamics uses the full capacitive coupling".into(),
            });
        }
        let mut diag = vec![0.0; levels * fock_dim];
        for n in 0..fock_dim {
            for i in 0..levels {
                diag[n * levels + i] = q.energies[i] + n as f64;
            }
        }
        Ok(Self {
            levels,
            fock_dim,
            g: spec.g,
            charge,
            diag,
            sqrt_n: (0..=fock_dim).map(|n| (n as f64).sqrt()).collect(),
            amplitude: drive.amplitude,
            omega_d: drive.omega_d,
            frame,
        })
    }

    fn dim(&self) -> usize {
        self.levels * self.fock_dim
    }

    fn to_internal(&self, qubit_major: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim()];
        for i in 0..self.levels {
            for n in 0..self.fock_dim {
                out[n * self.levels + i] = qubit_major[i * self.fock_dim + n];
            }
        }
        out
    }

    fn moments(&self, psi: &[Complex64]) -> Moments {
        let l = self.levels;
        let mut m = Moments {
            norm_sqr: 0.0,
            c: ZERO,
            charge: ZERO,
            occupancy: 0.0,
            photons: 0.0,
            diag_energy: 0.0,
            coupling_energy: 0.0,
            ceiling: 0.0,
        };
        let mut tmp = vec![ZERO; l];
        for n in 0..self.fock_dim {
            let block = &psi[n * l..(n + 1) * l];
            let mut w = 0.0;
            for (i, z) in block.iter().enumerate() {
                let p = z.norm_sqr();
                w += p;
                m.occupancy += i as f64 * p;
                m.diag_energy += self.diag[n * l + i] * p;
            }
            m.norm_sqr += w;
            m.photons += n as f64 * w;
            if n + 2 >= self.fock_dim {
                m.ceiling += w;
            }
            self.charge_apply(block, &mut tmp);
            m.charge += block.iter().zip(&tmp).map(|(a, b)| a.conj() * b).sum::<Complex64>();
            if n + 1 < self.fock_dim {
                let up = &psi[(n + 1) * l..(n + 2) * l];
                let s = self.sqrt_n[n + 1];
                // <c> = sum sqrt(n+1) conj(psi_n) psi_{n+1};  <N_t c>
                m.c += block.iter().zip(up).map(|(a, b)| a.conj() * b).sum::<Complex64>() * s;
                self.charge_apply(up, &mut tmp);
                let nt_c: Complex64 = block.iter().zip(&tmp).map(|(a, b)| a.conj() * b).sum::<Complex64>() * s;
                // <i g N_t (c^dag - c)> = -2 g Re(i <N_t c>) ... = 2 g Im(<N_t c>)
                m.coupling_energy += 2.0 * self.g * nt_c.im;
            }
        }
        m
    }

    #[inline]
    fn charge_apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let l = self.levels;
        for (o, row) in out[..l].iter_mut().zip(self.charge.chunks_exact(l)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Off-diagonal generator applied to `psi` (times `-i`), plus `d alpha/dt`
    /// without its `-i w_c alpha` part.
    fn rhs(&self, t: f64, psi: &[Complex64], alpha: Complex64, out: &mut [Complex64]) -> Complex64 {
        let l = self.levels;
        let drive = self.amplitude * Complex64::from_polar(1.0, -self.omega_d * t);
        let (beta, shift, dalpha) = match self.frame {
            Frame::Lab => (drive, 0.0, ZERO),
            Frame::Displaced => {
                let m = self.moments(psi);
                let mean = m.c + I * self.g * m.charge;
                (-mean, 2.0 * self.g * alpha.im, -I * (mean + drive))
            }
        };
        let ig = I * self.g;
        let mut mix = vec![ZERO; l];
        let mut tmp = vec![ZERO; l];
        for n in 0..self.fock_dim {
            let cur = &psi[n * l..(n + 1) * l];
            for i in 0..l {
                let up = if n > 0 { psi[(n - 1) * l + i] * self.sqrt_n[n] } else { ZERO };
                let down = if n + 1 < self.fock_dim {
                    psi[(n + 1) * l + i] * self.sqrt_n[n + 1]
                } else {
                    ZERO
                };
                mix[i] = ig * (up - down) + cur[i] * shift;
                tmp[i] = beta * up + beta.conj() * down;
            }
            let dst = &mut out[n * l..(n + 1) * l];
            for i in 0..l {
                let row = &self.charge[i * l..(i + 1) * l];
                let h: Complex64 = row.iter().zip(&mix).map(|(a, b)| a * b).sum::<Complex64>() + tmp[i];
                dst[i] = -I * h;
            }
        }
        dalpha
    }
}

struct Stepper {
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    alpha_half: Complex64,
    alpha_full: Complex64,
    k: [Vec<Complex64>; 4],
    y: Vec<Complex64>,
}

impl Stepper {
    fn new(model: &Model, dt: f64) -> Self {
        let half = model.diag.iter().map(|&w| Complex64::from_polar(1.0, -w * dt / 2.0)).collect();
        let full = model.diag.iter().map(|&w| Complex64::from_polar(1.0, -w * dt)).collect();
        let dim = model.dim();
        Self {
            half,
            full,
            alpha_half: Complex64::from_polar(1.0, -dt / 2.0),
            alpha_full: Complex64::from_polar(1.0, -dt),
            k: [vec![ZERO; dim], vec![ZERO; dim], vec![ZERO; dim], vec![ZERO; dim]],
            y: vec![ZERO; dim],
        }
    }

    /// One Lawson-RK4 step of size `h` from time `t`.
    fn step(&mut self, model: &Model, t: f64, h: f64, psi: &mut [Complex64], alpha: &mut Complex64) {
        let dim = psi.len();
        let [k1, k2, k3, k4] = &mut self.k;
        let a1 = model.rhs(t, psi, *alpha, k1);
        for j in 0..dim {
            self.y[j] = self.half[j] * (psi[j] + k1[j] * (h / 2.0));
        }
        let ya = self.alpha_half * (*alpha + a1 * (h / 2.0));
        let a2 = model.rhs(t + h / 2.0, &self.y, ya, k2);
        for j in 0..dim {
            self.y[j] = self.half[j] * psi[j] + k2[j] * (h / 2.0);
        }
        let ya = self.alpha_half * *alpha + a2 * (h / 2.0);
        let a3 = model.rhs(t + h / 2.0, &self.y, ya, k3);
        for j in 0..dim {
            self.y[j] = self.full[j] * psi[j] + self.half[j] * k3[j] * h;
        }
        let ya = self.alpha_full * *alpha + self.alpha_half * a3 * h;
        let a4 = model.rhs(t + h, &self.y, ya, k4);
        for j in 0..dim {
            psi[j] = self.full[j] * psi[j]
                + (self.full[j] * k1[j] + self.half[j] * (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
        }
        if model.frame == Frame::Displaced {
            *alpha = self.alpha_full * *alpha
                + (self.alpha_full * a1 + self.alpha_half * (a2 + a3) * 2.0 + a4) * (h / 6.0);
        }
    }
}

fn sample(model: &Model, t: f64, psi: &[Complex64], alpha: Complex64) -> (Sample, f64) {
    let m = model.moments(psi);
    let norm = m.norm_sqr.sqrt();
    let (alpha_out, photon_lab, energy) = match model.frame {
        Frame::Lab => (m.c, m.photons, m.diag_energy + m.coupling_energy),
        Frame::Displaced => {
            let cross = 2.0 * (alpha.conj() * m.c).re;
            let shift = alpha.norm_sqr() * m.norm_sqr;
            let photon = m.photons + cross + shift;
            let energy = m.diag_energy + cross + shift + m.coupling_energy + 2.0 * model.g * alpha.im * m.charge.re;
            (alpha, photon, energy)
        }
    };
    (
        Sample {
            t,
            alpha: alpha_out,
            occupancy: m.occupancy,
            photon_lab,
            energy,
            norm,
        },
        m.ceiling,
    )
}

fn integrate(
    spec: &SystemSpec,
    drive: &DriveParams,
    initial: &InitialState,
    frame: Frame,
) -> Result<Trajectory> {
    spec.validate()?;
    drive.validate()?;
    let model = Model::new(spec, drive, frame)?;
    if initial.vector.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: initial.vector.len(),
        });
    }
    let mut psi = model.to_internal(&initial.vector);
    let mut alpha = ZERO;
    let mut stepper = Stepper::new(&model, drive.dt);
    let stride = drive.stride();
    let steps = (drive.t_end / drive.dt).round() as usize;
    let alpha_limit = spec.fock_cutoff as f64;

    let mut samples = Vec::new();
    let mut max_drift = 0.0f64;
    let mut max_ceiling = 0.0f64;
    let mut record = |t: f64, psi: &[Complex64], alpha: Complex64| -> Result<bool> {
        let (s, ceiling) = sample(&model, t, psi, alpha);
        max_drift = max_drift.max((s.norm - 1.0).abs());
        max_ceiling = max_ceiling.max(ceiling);
        if ceiling > drive.ceiling_limit {
            return Err(Error::FockCeiling {
                time: t,
                population: ceiling,
                limit: drive.ceiling_limit,
            });
        }
        if frame == Frame::Displaced && alpha.norm_sqr() > alpha_limit {
            return Err(Error::DisplacementDiverged {
                time: t,
                alpha_sq: alpha.norm_sqr(),
                limit: alpha_limit,
            });
        }
        let stop = drive.stop_photons.is_some_and(|n| s.photon_lab >= n);
        samples.push(s);
        Ok(stop)
    };
    record(0.0, &psi, alpha)?;
    for step in 1..=steps {
        let t = (step - 1) as f64 * drive.dt;
        stepper.step(&model, t, drive.dt, &mut psi, &mut alpha);
        if (step % stride == 0 || step == steps) && record(step as f64 * drive.dt, &psi, alpha)? {
            break;
        }
    }
    Ok(Trajectory {
        frame,
        samples,
        initial: initial.description.clone(),
        max_norm_drift: max_drift,
        max_ceiling_population: max_ceiling,
    })
}

/// Lab-frame integration; needs a Fock cutoff above the driven photon number.
pub fn integrate_lab(spec: &SystemSpec, drive: &DriveParams, initial: &InitialState) -> Result<Trajectory> {
    integrate(spec, drive, initial, Frame::Lab)
}

/// Displaced-frame integration with `alpha(0) = 0`.
pub fn integrate_displaced(spec: &SystemSpec, drive: &DriveParams, initial: &InitialState) -> Result<Trajectory> {
    integrate(spec, drive, initial, Frame::Displaced)
}

/// Largest difference in `(<N_q>, photon_lab)` between samples at equal times.
pub fn max_observable_difference(a: &Trajectory, b: &Trajectory) -> f64 {
    let mut worst = 0.0f64;
    let mut j = 0;
    for s in &a.samples {
        while j < b.samples.len() && b.samples[j].t < s.t - 1e-9 {
            j += 1;
        }
        if let Some(o) = b.samples.get(j) {
            if (o.t - s.t).abs() < 1e-9 {
                worst = worst
                    .max((o.occupancy - s.occupancy).abs())
                    .max((o.photon_lab - s.photon_lab).abs());
            }
        }
    }
    worst
}

/// Runs with `dt` and `dt / 2` and reports the largest observable difference.
pub fn step_halving_check(
    spec: &SystemSpec,
    drive: &DriveParams,
    initial: &InitialState,
    frame: Frame,
) -> Result<(Trajectory, f64)> {
    let coarse = integrate(spec, drive, initial, frame)?;
    let fine = integrate(spec, &drive.clone().with_dt(drive.dt / 2.0), initial, frame)?;
    let diff = max_observable_difference(&coarse, &fine);
    Ok((fine, diff))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryComparison {
    pub source: String,
    /// Mean `|<N_q>(t) - N_q^ladder(photon_lab(t))|` over the used samples.
    pub l1_mean: f64,
    pub samples_used: usize,
}

/// Deviation of a trajectory from a ladder occupancy curve for samples whose
/// photon number lies in `[n_lo, n_hi]`.
pub fn trajectory_vs_ladder(
    traj: &Trajectory,
    curve: &OccupancyCurve,
    n_lo: f64,
    n_hi: f64,
) -> Result<TrajectoryComparison> {
    let mut total = 0.0;
    let mut used = 0;
    for s in &traj.samples {
        if s.photon_lab < n_lo || s.photon_lab > n_hi {
            continue;
        }
        if let Some(v) = curve.interpolate(s.photon_lab) {
            total += (s.occupancy - v).abs();
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::EmptyOverlap);
    }
    Ok(TrajectoryComparison {
        source: curve.source.clone(),
        l1_mean: total / used as f64,
        samples_used: used,
    })
}

/// Compares several ladders against one trajectory, closest first.
pub fn rank_ladders(
    traj: &Trajectory,
    curves: &[OccupancyCurve],
    n_lo: f64,
    n_hi: f64,
) -> Result<Vec<TrajectoryComparison>> {
    let mut out = curves
        .iter()
        .map(|c| trajectory_vs_ladder(traj, c, n_lo, n_hi))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.l1_mean.total_cmp(&b.l1_mean));
    Ok(out)
}
