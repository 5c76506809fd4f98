//! Text serialization of ladders, curves, features, trajectories and
//! manifests. Floats are written with 17 significant digits so that
//! identical runs produce identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::labeling::{LabelLadder, Provenance};
use crate::observables::{FrequencyCurve, OccupancyCurve, ResonanceFeature};
use crate::spectrum::EigenSolution;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(out: &mut String, pairs: &[(&str, String)]) {
    for (k, v) in pairs {
        let _ = writeln!(out, "# {k}: {v}");
    }
}

fn provenance(p: &Provenance) -> String {
    match p {
        Provenance::System(s) => format!(
            "e_c={} e_j={} g={} n_g={} charge_cutoff={} fock_cutoff={} coupling={:?}",
            fmt_f64(s.e_c),
            fmt_f64(s.e_j),
            fmt_f64(s.g),
            fmt_f64(s.n_g),
            s.charge_cutoff,
            s.fock_cutoff,
            s.coupling_form
        ),
        Provenance::Synthetic(name) => format!("synthetic {name}"),
    }
}

pub fn ladder_csv(ladder: &LabelLadder) -> String {
    let mut out = String::new();
    header(
        &mut out,
        &[
            ("ladder", ladder.label()),
            ("p", ladder.p.to_string()),
            ("system", provenance(&ladder.provenance)),
        ],
    );
    for d in &ladder.diagnostics {
        let _ = writeln!(out, "# diagnostic: {d}");
    }
    out.push_str("n,eigen_index,energy,nq_expect,window_fallback\n");
    for e in &ladder.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.n,
            e.eigen_index,
            fmt_f64(e.energy),
            fmt_f64(e.occupancy),
            u8::from(e.window_fallback)
        );
    }
    out
}

fn series_csv(source: &str, p: usize, quantity: &str, points: &[(usize, f64)]) -> String {
    let mut out = String::new();
    header(
        &mut out,
        &[("ladder", source.to_string()), ("p", p.to_string()), ("quantity", quantity.to_string())],
    );
    out.push_str("n,value\n");
    for (n, v) in points {
        let _ = writeln!(out, "{n},{}", fmt_f64(*v));
    }
    out
}

pub fn frequency_csv(curve: &FrequencyCurve) -> String {
    series_csv(&curve.source, curve.p, "cavity_frequency", &curve.points)
}

pub fn occupancy_csv(curve: &OccupancyCurve) -> String {
    series_csv(&curve.source, curve.p, "qubit_occupancy", &curve.points)
}

/// One `kind n magnitude` line per feature.
pub fn features_text(features: &[ResonanceFeature]) -> String {
    features
        .iter()
        .map(|f| format!("{} {} {}\n", f.kind, f.n_location, fmt_f64(f.magnitude)))
        .collect()
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    header(
        &mut out,
        &[
            ("frame", traj.frame.to_string()),
            ("initial", traj.initial.clone()),
            ("max_norm_drift", fmt_f64(traj.max_norm_drift)),
            ("max_ceiling_population", fmt_f64(traj.max_ceiling_population)),
        ],
    );
    out.push_str("t,re_alpha,im_alpha,nq,photon_lab\n");
    for s in &traj.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.alpha.re),
            fmt_f64(s.alpha.im),
            fmt_f64(s.occupancy),
            fmt_f64(s.photon_lab)
        );
    }
    out
}

/// Lowest `count` eigenpairs with their cached expectations.
pub fn spectrum_csv(sol: &EigenSolution, count: usize) -> String {
    let mut out = String::new();
    header(&mut out, &[("system", provenance(&Provenance::System(sol.spec().clone())))]);
    out.push_str("index,energy,nq,photons,ceiling_population\n");
    for k in 0..count.min(sol.dim()) {
        let _ = writeln!(
            out,
            "{k},{},{},{},{}",
            fmt_f64(sol.energies()[k]),
            fmt_f64(sol.qubit_occupancy()[k]),
            fmt_f64(sol.photon_number()[k]),
            fmt_f64(sol.fock_ceiling_population(k))
        );
    }
    out
}

/// Ordered `key = value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        let mut m = Self::default();
        m.push("tool", env!("CARGO_PKG_NAME"));
        m.push("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn push_f64(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, fmt_f64(value));
    }

    /// Records a config snapshot, one `config.N` line per TOML line.
    pub fn push_config(&mut self, toml_text: &str) {
        use sha2::{Digest, Sha256};
        let hash: String = Sha256::digest(toml_text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        self.push("config_hash", hash);
        for (i, line) in toml_text.lines().enumerate() {
            self.push(format!("config.{i:03}"), line);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, prefix: &str, other: &Manifest) {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}{k}"), v.clone()));
        }
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}
