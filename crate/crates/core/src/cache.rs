//! On-disk cache of eigensolutions keyed by the system specification.
//!
//! Files are little-endian binary and hold everything needed to rebuild an
//! [`EigenSolution`] bit for bit; cached expectations are recomputed from
//! the stored vectors, which is deterministic.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use faer::Mat;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::EigenVectors;
use crate::operators::{CouplingForm, SystemSpec};
use crate::spectrum::{self, EigenSolution};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "DRESSED_CACHE_DIR";

const MAGIC: &[u8; 8] = b"DRSCACH1";

/// Hex digest identifying a spec; equal specs give equal keys.
pub fn spec_key(spec: &SystemSpec) -> String {
    let mut h = Sha256::new();
    h.update(MAGIC);
    h.update(spec_bytes(spec));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn spec_bytes(spec: &SystemSpec) -> Vec<u8> {
    let mut out = Vec::with_capacity(49);
    for x in [spec.e_c, spec.e_j, spec.g, spec.n_g] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out.extend_from_slice(&(spec.charge_cutoff as u64).to_le_bytes());
    out.extend_from_slice(&(spec.fock_cutoff as u64).to_le_bytes());
    out.push(match spec.coupling_form {
        CouplingForm::Full => 0,
        CouplingForm::Rwa => 1,
    });
    out
}

#[derive(Clone, Debug)]
pub struct SolutionCache {
    dir: PathBuf,
}

impl SolutionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache rooted at `$DRESSED_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_DIR_ENV).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, spec: &SystemSpec) -> PathBuf {
        self.dir.join(format!("{}.eig", spec_key(spec)))
    }

    pub fn load(&self, spec: &SystemSpec) -> Result<Option<EigenSolution>> {
        let path = self.path_for(spec);
        if !path.exists() {
            return Ok(None);
        }
        read_solution(&path, spec).map(Some)
    }

    pub fn store(&self, sol: &EigenSolution) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(sol.spec());
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        write_solution(&tmp, sol)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Loads a cached solution or solves and stores it. The flag reports a hit.
    pub fn solve(&self, spec: &SystemSpec) -> Result<(EigenSolution, bool)> {
        if let Some(sol) = self.load(spec)? {
            log::debug!("cache hit {}", self.path_for(spec).display());
            return Ok((sol, true));
        }
        let sol = spectrum::solve(spec)?;
        self.store(&sol)?;
        Ok((sol, false))
    }
}

/// Solves `spec`, going through `cache` when one is given.
pub fn solve_cached(spec: &SystemSpec, cache: Option<&SolutionCache>) -> Result<(EigenSolution, bool)> {
    match cache {
        Some(c) => c.solve(spec),
        None => spectrum::solve(spec).map(|s| (s, false)),
    }
}

struct Writer<W: Write>(W);

impl<W: Write> Writer<W> {
    fn f64(&mut self, x: f64) -> std::io::Result<()> {
        self.0.write_all(&x.to_le_bytes())
    }
    fn u64(&mut self, x: u64) -> std::io::Result<()> {
        self.0.write_all(&x.to_le_bytes())
    }
    fn c64(&mut self, z: Complex64) -> std::io::Result<()> {
        self.f64(z.re)?;
        self.f64(z.im)
    }
}

fn write_solution(path: &Path, sol: &EigenSolution) -> Result<()> {
    let mut w = Writer(BufWriter::with_capacity(1 << 20, File::create(path)?));
    w.0.write_all(MAGIC)?;
    w.0.write_all(&spec_bytes(sol.spec()))?;
    let n = sol.dim();
    w.u64(n as u64)?;
    w.f64(sol.hamiltonian_scale())?;
    w.f64(sol.excitation_commutator())?;
    for &e in sol.energies() {
        w.f64(e)?;
    }
    match sol.vectors() {
        EigenVectors::Gauged {
            gauge,
            column_phase,
            real,
        } => {
            w.0.write_all(&[0])?;
            for &z in gauge.iter().chain(column_phase) {
                w.c64(z)?;
            }
            for j in 0..n {
                for i in 0..n {
                    w.f64(real[(i, j)])?;
                }
            }
        }
        EigenVectors::Complex(m) => {
            w.0.write_all(&[1])?;
            for j in 0..n {
                for i in 0..n {
                    w.c64(m[(i, j)])?;
                }
            }
        }
    }
    w.0.flush()?;
    Ok(())
}

struct Reader<R: Read>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> std::io::Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b)?;
        Ok(b)
    }
    fn f64(&mut self) -> std::io::Result<f64> {
        self.bytes::<8>().map(f64::from_le_bytes)
    }
    fn u64(&mut self) -> std::io::Result<u64> {
        self.bytes::<8>().map(u64::from_le_bytes)
    }
    fn c64(&mut self) -> std::io::Result<Complex64> {
        Ok(Complex64::new(self.f64()?, self.f64()?))
    }
}

fn read_solution(path: &Path, spec: &SystemSpec) -> Result<EigenSolution> {
    let bad = |reason: &str| Error::Cache {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut r = Reader(BufReader::with_capacity(1 << 20, File::open(path)?));
    if &r.bytes::<8>()? != MAGIC {
        return Err(bad("bad magic"));
    }
    let expected = spec_bytes(spec);
    let mut stored = vec![0u8; expected.len()];
    r.0.read_exact(&mut stored)?;
    if stored != expected {
        return Err(bad("spec mismatch"));
    }
    let n = r.u64()? as usize;
    if n != spec.composite_dim() {
        return Err(bad("dimension mismatch"));
    }
    let scale = r.f64()?;
    let commutator = r.f64()?;
    let energies = (0..n).map(|_| r.f64()).collect::<std::io::Result<Vec<_>>>()?;
    let kind = r.bytes::<1>()?[0];
    let vectors = match kind {
        0 => {
            let gauge = (0..n).map(|_| r.c64()).collect::<std::io::Result<Vec<_>>>()?;
            let column_phase = (0..n).map(|_| r.c64()).collect::<std::io::Result<Vec<_>>>()?;
            let mut real = Mat::<f64>::zeros(n, n);
            for j in 0..n {
                for i in 0..n {
                    real[(i, j)] = r.f64()?;
                }
            }
            EigenVectors::Gauged {
                gauge,
                column_phase,
                real,
            }
        }
        1 => {
            let mut m = Mat::<Complex64>::zeros(n, n);
            for j in 0..n {
                for i in 0..n {
                    m[(i, j)] = r.c64()?;
                }
            }
            EigenVectors::Complex(m)
        }
        _ => return Err(bad("unknown vector storage")),
    };
    Ok(EigenSolution::from_parts(spec.clone(), energies, vectors, scale, commutator))
}
