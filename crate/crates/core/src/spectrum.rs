//! Full diagonalization of the composite Hamiltonian and overlap queries.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, EigenVectors};
use crate::operators::{self, Basis, CompositeLayout, LinearOperator, OperatorMatrix, SystemSpec};

/// Sorted eigenpairs of the composite Hamiltonian with cached expectations.
#[derive(Clone, Debug)]
pub struct EigenSolution {
    spec: SystemSpec,
    layout: CompositeLayout,
    energies: Vec<f64>,
    vectors: EigenVectors,
    qubit_occupancy: Vec<f64>,
    photon_number: Vec<f64>,
    hamiltonian_scale: f64,
    excitation_commutator: f64,
}

/// Builds and diagonalizes the composite Hamiltonian of `spec`.
pub fn solve(spec: &SystemSpec) -> Result<EigenSolution> {
    let h = operators::build_composite_hamiltonian(spec)?;
    diagonalize(spec, h)
}

/// Full ascending eigendecomposition of a composite Hamiltonian built for `spec`.
pub fn diagonalize(spec: &SystemSpec, h: OperatorMatrix) -> Result<EigenSolution> {
    let layout = spec.layout();
    match h.basis() {
        Basis::Composite(l) if l == layout => {}
        _ => {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                got: h.dim(),
            })
        }
    }
    if !h.is_hermitian() {
        let asym = h.max_asymmetry();
        if asym > 0.0 {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
    }
    let scale = h.max_abs();
    let commutator = excitation_commutator(&h, &layout);
    let key = operators::composite_tie_key(&layout);
    let eig = linalg::hermitian_eigen(h.into_matrix(), &key)?;
    Ok(EigenSolution::from_parts(
        spec.clone(),
        eig.values,
        eig.vectors,
        scale,
        commutator,
    ))
}

/// `max |[H, N_q + c^dag c]_ij| = max |H_ij| |M_j - M_i|`, exploiting the
/// diagonal excitation operator.
pub fn excitation_commutator(h: &OperatorMatrix, layout: &CompositeLayout) -> f64 {
    let m: Vec<f64> = (0..layout.dim())
        .map(|k| (layout.level_of(k) + layout.photons_of(k)) as f64)
        .collect();
    let mut out = 0.0f64;
    for j in 0..h.dim() {
        for i in 0..h.dim() {
            out = out.max(h.get(i, j).norm() * (m[j] - m[i]).abs());
        }
    }
    out
}

impl EigenSolution {
    pub(crate) fn from_parts(
        spec: SystemSpec,
        energies: Vec<f64>,
        vectors: EigenVectors,
        scale: f64,
        excitation_commutator: f64,
    ) -> Self {
        let layout = spec.layout();
        let nq: Vec<f64> = (0..layout.dim()).map(|k| layout.level_of(k) as f64).collect();
        let nc: Vec<f64> = (0..layout.dim()).map(|k| layout.photons_of(k) as f64).collect();
        let qubit_occupancy = vectors.diagonal_expectations(&nq);
        let photon_number = vectors.diagonal_expectations(&nc);
        Self {
            spec,
            layout,
            energies,
            vectors,
            qubit_occupancy,
            photon_number,
            hamiltonian_scale: scale,
            excitation_commutator,
        }
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn layout(&self) -> CompositeLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `<lambda|N_q|lambda>` for every eigenstate.
    pub fn qubit_occupancy(&self) -> &[f64] {
        &self.qubit_occupancy
    }

    /// `<lambda|c^dag c|lambda>` for every eigenstate.
    pub fn photon_number(&self) -> &[f64] {
        &self.photon_number
    }

    pub fn vectors(&self) -> &EigenVectors {
        &self.vectors
    }

    /// `max |H_ij|` of the decomposed Hamiltonian.
    pub fn hamiltonian_scale(&self) -> f64 {
        self.hamiltonian_scale
    }

    /// `max |[H, N_q + c^dag c]|` of the decomposed Hamiltonian.
    pub fn excitation_commutator(&self) -> f64 {
        self.excitation_commutator
    }

    pub fn eigenvector(&self, index: usize) -> Vec<Complex64> {
        self.vectors.column(index)
    }

    /// Population of eigenstate `index` in the top two Fock levels.
    pub fn fock_ceiling_population(&self, index: usize) -> f64 {
        let top = self.layout.fock_dim - 1;
        (0..self.layout.levels)
            .flat_map(|i| [top, top.saturating_sub(1)].map(|n| self.layout.index(i, n)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|k| self.vectors.norm_sqr(k, index))
            .sum()
    }

    fn check_product(&self, level: usize, photons: usize) -> Result<()> {
        if level >= self.layout.levels {
            return Err(Error::OutOfRange {
                what: "qubit label",
                value: level,
                allowed: format!("0..{}", self.layout.levels),
            });
        }
        if photons >= self.layout.fock_dim {
            return Err(Error::OutOfRange {
                what: "photon number",
                value: photons,
                allowed: format!("0..={}", self.layout.fock_dim - 1),
            });
        }
        Ok(())
    }

    /// `|<lambda| (|p>_q (x) |n>_c)|^2` for every eigenstate.
    pub fn product_state_overlaps(&self, level: usize, photons: usize) -> Result<Vec<f64>> {
        self.check_product(level, photons)?;
        let k = self.layout.index(level, photons);
        Ok((0..self.dim()).map(|j| self.vectors.norm_sqr(k, j)).collect())
    }

    /// `|<lambda|v>|^2 / <v|v>` for every eigenstate.
    pub fn vector_overlaps(&self, v: &[Complex64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self
            .vectors
            .adjoint_apply(v)
            .into_iter()
            .map(|z| z.norm_sqr() / norm)
            .collect())
    }

    /// `||H v - eps v||_2` for the requested eigenvectors.
    pub fn residuals(&self, h: &impl LinearOperator, indices: impl IntoIterator<Item = usize>) -> Vec<f64> {
        indices
            .into_iter()
            .map(|j| {
                let v = self.eigenvector(j);
                let hv = h.apply_to(&v);
                hv.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - self.energies[j] * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Largest residual over an evenly strided sample of at most `samples` eigenvectors.
    pub fn sampled_max_residual(&self, h: &impl LinearOperator, samples: usize) -> f64 {
        let stride = (self.dim() / samples.max(1)).max(1);
        self.residuals(h, (0..self.dim()).step_by(stride))
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Index of the largest entry, ties to the lowest index.
    pub fn argmax(values: &[f64]) -> usize {
        let mut best = 0;
        for (k, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = k;
            }
        }
        best
    }
}
