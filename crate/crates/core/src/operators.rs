//! Transmon, cavity and composite operators in a truncated basis.
//!
//! Energies are in units of the bare cavity quantum (`hbar * omega_c = 1`).
//! The composite basis is `|i>_q (x) |n>_c` with the qubit eigenstate index
//! as the slow index: `k = i * (fock_cutoff + 1) + n`.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Form of the qubit-cavity interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CouplingForm {
    /// `i g N_t (c^dag - c)` with every qubit matrix element kept.
    #[default]
    Full,
    /// Only the excitation-preserving part: `|j><j+1| c^dag` and `|j+1><j| c`.
    Rwa,
}

/// Physical and truncation parameters of one transmon-cavity instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub e_c: f64,
    pub e_j: f64,
    pub g: f64,
    #[serde(default)]
    pub n_g: f64,
    #[serde(default = "default_charge_cutoff")]
    pub charge_cutoff: usize,
    #[serde(default = "default_fock_cutoff")]
    pub fock_cutoff: usize,
    #[serde(default)]
    pub coupling_form: CouplingForm,
}

fn default_charge_cutoff() -> usize {
    10
}

fn default_fock_cutoff() -> usize {
    350
}

impl SystemSpec {
    pub fn new(e_c: f64, e_j: f64, g: f64, n_g: f64) -> Self {
        Self {
            e_c,
            e_j,
            g,
            n_g,
            charge_cutoff: default_charge_cutoff(),
            fock_cutoff: default_fock_cutoff(),
            coupling_form: CouplingForm::Full,
        }
    }

    pub fn with_cutoffs(mut self, charge_cutoff: usize, fock_cutoff: usize) -> Self {
        self.charge_cutoff = charge_cutoff;
        self.fock_cutoff = fock_cutoff;
        self
    }

    pub fn with_coupling(mut self, form: CouplingForm) -> Self {
        self.coupling_form = form;
        self
    }

    pub fn with_n_g(mut self, n_g: f64) -> Self {
        self.n_g = n_g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidSpec {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.e_c > 0.0) || !self.e_c.is_finite() {
            return bad("e_c", "must be finite and > 0");
        }
        if !(self.e_j > 0.0) || !self.e_j.is_finite() {
            return bad("e_j", "must be finite and > 0");
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return bad("g", "must be finite and >= 0");
        }
        if !self.n_g.is_finite() {
            return bad("n_g", "must be finite");
        }
        if self.charge_cutoff < 1 {
            return bad("charge_cutoff", "must be >= 1");
        }
        if self.fock_cutoff < 1 {
            return bad("fock_cutoff", "must be >= 1");
        }
        Ok(())
    }

    /// Number of charge states, which is also the number of qubit levels.
    pub fn charge_dim(&self) -> usize {
        2 * self.charge_cutoff + 1
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn composite_dim(&self) -> usize {
        self.charge_dim() * self.fock_dim()
    }

    pub fn layout(&self) -> CompositeLayout {
        CompositeLayout {
            levels: self.charge_dim(),
            fock_dim: self.fock_dim(),
        }
    }

    /// Charge value `n` of charge-basis index `k`.
    pub fn charge_of(&self, k: usize) -> i64 {
        k as i64 - self.charge_cutoff as i64
    }
}

/// Index arithmetic for the qubit-eigenbasis (x) Fock basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CompositeLayout {
    pub levels: usize,
    pub fock_dim: usize,
}

impl CompositeLayout {
    pub fn dim(&self) -> usize {
        self.levels * self.fock_dim
    }

    #[inline]
    pub fn index(&self, level: usize, photons: usize) -> usize {
        level * self.fock_dim + photons
    }

    #[inline]
    pub fn level_of(&self, k: usize) -> usize {
        k / self.fock_dim
    }

    #[inline]
    pub fn photons_of(&self, k: usize) -> usize {
        k % self.fock_dim
    }

    /// `(1 (x) c^dag) v`; the amplitude on the top Fock level is truncated away.
    pub fn apply_creation(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for i in 0..self.levels {
            for n in 1..self.fock_dim {
                out[self.index(i, n)] = v[self.index(i, n - 1)] * (n as f64).sqrt();
            }
        }
        out
    }
}

/// Which space an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Transmon,
    Cavity,
    Composite(CompositeLayout),
}

/// Dense complex operator with a basis tag.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    matrix: Mat<Complex64>,
    basis: Basis,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps an arbitrary matrix; Hermiticity is not assumed.
    pub fn from_raw(matrix: Mat<Complex64>, basis: Basis) -> Self {
        Self {
            matrix,
            basis,
            hermitian: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<Complex64> {
        self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn max_asymmetry(&self) -> f64 {
        linalg::max_asymmetry(&self.matrix)
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|k| self.matrix[(k, k)]).sum()
    }

    /// Element-wise sum; both operands must share a basis.
    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.basis, other.basis);
        OperatorMatrix {
            matrix: &self.matrix + &other.matrix,
            basis: self.basis,
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `max |[A, B]_ij|`, evaluated with dense products.
    pub fn commutator_max_abs(&self, other: &OperatorMatrix) -> f64 {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        linalg::max_abs(&(&ab - &ba))
    }
}

/// Non-zero entries of an operator; repeated positions add up.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    dim: usize,
    basis: Basis,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for &(i, j, z) in &self.entries {
            out[i] += z * v[j];
        }
        out
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        let mut matrix = Mat::zeros(self.dim, self.dim);
        for &(i, j, z) in &self.entries {
            matrix[(i, j)] += z;
        }
        OperatorMatrix {
            matrix,
            basis: self.basis,
            hermitian: true,
        }
    }
}

/// Anything that can multiply a vector.
pub trait LinearOperator {
    fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64>;
}

impl LinearOperator for OperatorMatrix {
    fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply(v)
    }
}

impl LinearOperator for SparseOperator {
    fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply(v)
    }
}

/// Collects diagonal entries and explicit `(z, conj z)` pairs of a Hermitian matrix.
struct HermitianBuilder {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl HermitianBuilder {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    fn add_diag(&mut self, k: usize, value: f64) {
        self.entries.push((k, k, Complex64::new(value, 0.0)));
    }

    /// Adds `z |i><j| + conj(z) |j><i|` for `i != j`.
    fn add_pair(&mut self, i: usize, j: usize, z: Complex64) {
        debug_assert_ne!(i, j);
        self.entries.push((i, j, z));
        self.entries.push((j, i, z.conj()));
    }

    fn finish_sparse(self, basis: Basis) -> SparseOperator {
        SparseOperator {
            dim: self.dim,
            basis,
            entries: self.entries,
        }
    }

    fn finish(self, basis: Basis) -> OperatorMatrix {
        self.finish_sparse(basis).to_dense()
    }
}

/// `4 E_C (n - N_g)^2 - (E_J / 2) sum (|n><n+1| + h.c.)` on the truncated charge basis.
pub fn build_transmon_hamiltonian(spec: &SystemSpec) -> OperatorMatrix {
    let dim = spec.charge_dim();
    let mut b = HermitianBuilder::new(dim);
    for k in 0..dim {
        let q = spec.charge_of(k) as f64 - spec.n_g;
        b.add_diag(k, 4.0 * spec.e_c * q * q);
    }
    for k in 0..dim - 1 {
        b.add_pair(k, k + 1, Complex64::new(-spec.e_j / 2.0, 0.0));
    }
    b.finish(Basis::Transmon)
}

/// `diag(n - N_g)` on the truncated charge basis.
pub fn build_charge_operator(spec: &SystemSpec) -> OperatorMatrix {
    let dim = spec.charge_dim();
    let mut b = HermitianBuilder::new(dim);
    for k in 0..dim {
        b.add_diag(k, spec.charge_of(k) as f64 - spec.n_g);
    }
    b.finish(Basis::Transmon)
}

/// Transmon eigenenergies and eigenstates in the charge basis.
#[derive(Clone, Debug)]
pub struct QubitEigensystem {
    /// `omega_i`, ascending.
    pub energies: Vec<f64>,
    /// Column `i` is `|i>_q` in the charge basis.
    pub states: Mat<Complex64>,
    /// Charge operator rotated into the qubit eigenbasis, `<i|N_t|j>`.
    pub charge: Mat<Complex64>,
}

impl QubitEigensystem {
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// `|<charge_index | level>|^2`.
    pub fn charge_population(&self, level: usize, charge_index: usize) -> f64 {
        self.states[(charge_index, level)].norm_sqr()
    }
}

pub fn build_qubit_eigensystem(spec: &SystemSpec) -> Result<QubitEigensystem> {
    spec.validate()?;
    let h = build_transmon_hamiltonian(spec);
    let dim = h.dim();
    let key: Vec<f64> = (0..dim).map(|k| k as f64).collect();
    let eig = linalg::hermitian_eigen(h.into_matrix(), &key)?;
    let states = Mat::from_fn(dim, dim, |r, c| eig.vectors.get(r, c));
    let nt = build_charge_operator(spec);
    let charge = {
        let tmp = states.adjoint() * nt.matrix();
        let mut m = &tmp * &states;
        // exact Hermitian symmetrization of rounding noise
        for i in 0..dim {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in 0..i {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    };
    Ok(QubitEigensystem {
        energies: eig.values,
        states,
        charge,
    })
}

/// Composite Hamiltonian from a precomputed qubit eigensystem.
pub fn composite_hamiltonian_from(spec: &SystemSpec, qubit: &QubitEigensystem) -> OperatorMatrix {
    composite_sparse_from(spec, qubit).to_dense()
}

/// Same operator as [`composite_hamiltonian_from`] without the dense storage.
pub fn composite_sparse_from(spec: &SystemSpec, qubit: &QubitEigensystem) -> SparseOperator {
    let layout = spec.layout();
    let levels = layout.levels;
    let mut b = HermitianBuilder::new(layout.dim());
    for i in 0..levels {
        for n in 0..layout.fock_dim {
            b.add_diag(layout.index(i, n), qubit.energies[i] + n as f64);
        }
    }
    let ig = Complex64::new(0.0, spec.g);
    if spec.g != 0.0 {
        for n in 0..layout.fock_dim - 1 {
            let amp = ((n + 1) as f64).sqrt();
            match spec.coupling_form {
                CouplingForm::Full => {
                    // i g N_ij |i,n+1><j,n|  and its conjugate -i g N_ji |j,n><i,n+1|
                    for i in 0..levels {
                        for j in 0..levels {
                            let z = ig * qubit.charge[(i, j)] * amp;
                            if z != Complex64::new(0.0, 0.0) {
                                b.add_pair(layout.index(i, n + 1), layout.index(j, n), z);
                            }
                        }
                    }
                }
                CouplingForm::Rwa => {
                    // i g N_{j,j+1} |j,n+1><j+1,n| plus conjugate
                    for j in 0..levels - 1 {
                        let z = ig * qubit.charge[(j, j + 1)] * amp;
                        b.add_pair(layout.index(j, n + 1), layout.index(j + 1, n), z);
                    }
                }
            }
        }
    }
    b.finish_sparse(Basis::Composite(layout))
}

pub fn build_composite_hamiltonian(spec: &SystemSpec) -> Result<OperatorMatrix> {
    let qubit = build_qubit_eigensystem(spec)?;
    Ok(composite_hamiltonian_from(spec, &qubit))
}

pub fn build_composite_sparse(spec: &SystemSpec) -> Result<SparseOperator> {
    let qubit = build_qubit_eigensystem(spec)?;
    Ok(composite_sparse_from(spec, &qubit))
}

fn composite_diagonal(spec: &SystemSpec, f: impl Fn(usize, usize) -> f64) -> OperatorMatrix {
    let layout = spec.layout();
    let mut b = HermitianBuilder::new(layout.dim());
    for i in 0..layout.levels {
        for n in 0..layout.fock_dim {
            b.add_diag(layout.index(i, n), f(i, n));
        }
    }
    b.finish(Basis::Composite(layout))
}

/// `N_q (x) 1` with `N_q = sum_i i |i><i|` in the qubit eigenbasis.
pub fn build_occupancy_operator(spec: &SystemSpec) -> OperatorMatrix {
    composite_diagonal(spec, |i, _| i as f64)
}

/// `1 (x) c^dag c`.
pub fn build_photon_number_operator(spec: &SystemSpec) -> OperatorMatrix {
    composite_diagonal(spec, |_, n| n as f64)
}

/// `N_q (x) 1 + 1 (x) c^dag c`.
pub fn build_total_excitation_operator(spec: &SystemSpec) -> OperatorMatrix {
    composite_diagonal(spec, |i, n| (i + n) as f64)
}

fn cavity_ladder_operator(spec: &SystemSpec, up: Complex64) -> OperatorMatrix {
    // up * c^dag + conj(up) * c
    let layout = spec.layout();
    let mut b = HermitianBuilder::new(layout.dim());
    for i in 0..layout.levels {
        for n in 0..layout.fock_dim - 1 {
            let amp = ((n + 1) as f64).sqrt();
            b.add_pair(layout.index(i, n + 1), layout.index(i, n), up * amp);
        }
    }
    b.finish(Basis::Composite(layout))
}

/// `1 (x) (c^dag + c)`.
pub fn build_cavity_position_operator(spec: &SystemSpec) -> OperatorMatrix {
    cavity_ladder_operator(spec, Complex64::new(1.0, 0.0))
}

/// `1 (x) i (c^dag - c)`.
pub fn build_cavity_momentum_operator(spec: &SystemSpec) -> OperatorMatrix {
    cavity_ladder_operator(spec, Complex64::new(0.0, 1.0))
}

/// Product state `|p>_q (x) |n>_c` as a composite-basis vector.
pub fn product_state(layout: &CompositeLayout, level: usize, photons: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); layout.dim()];
    v[layout.index(level, photons)] = Complex64::new(1.0, 0.0);
    v
}

/// Ordering key used to break exact degeneracies: photons first, then qubit level.
pub(crate) fn composite_tie_key(layout: &CompositeLayout) -> Vec<f64> {
    (0..layout.dim())
        .map(|k| (layout.photons_of(k) * layout.levels + layout.level_of(k)) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_spec() -> SystemSpec {
        SystemSpec::new(0.05, 1.6, 0.025, 0.0)
    }

    #[test]
    fn charge_operator_definition() {
        let spec = SystemSpec::new(0.05, 1.6, 0.0, 0.0).with_cutoffs(1, 1);
        let n = build_charge_operator(&spec);
        let d: Vec<f64> = (0..3).map(|k| n.get(k, k).re).collect();
        assert_eq!(d, vec![-1.0, 0.0, 1.0]);
        let spec = spec.with_n_g(0.5);
        let n = build_charge_operator(&spec);
        let d: Vec<f64> = (0..3).map(|k| n.get(k, k).re).collect();
        assert_eq!(d, vec![-1.5, -0.5, 0.5]);
    }

    #[test]
    fn charge_operator_trace() {
        for &(cut, ng) in &[(1usize, 0.3), (4, -0.7), (10, 0.1)] {
            let spec = SystemSpec::new(0.05, 1.6, 0.0, ng).with_cutoffs(cut, 1);
            let tr = build_charge_operator(&spec).trace().re;
            let expected = -((2 * cut + 1) as f64) * ng;
            assert!((tr - expected).abs() < 1e-12, "{tr} vs {expected}");
        }
    }

    #[test]
    fn transmon_without_josephson_is_diagonal() {
        // e_j must be positive for a valid spec, so build the matrix directly
        let mut spec = SystemSpec::new(0.05, 1.0, 0.0, 0.25).with_cutoffs(3, 1);
        spec.e_j = 0.0;
        let h = build_transmon_hamiltonian(&spec);
        for k in 0..7 {
            let n = k as f64 - 3.0;
            assert_eq!(h.get(k, k).re, 4.0 * 0.05 * (n - 0.25) * (n - 0.25));
            for l in 0..7 {
                if l != k {
                    assert_eq!(h.get(k, l), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn transmon_hopping_is_dropped_at_edges() {
        let spec = SystemSpec::new(0.05, 1.6, 0.0, 0.0).with_cutoffs(2, 1);
        let h = build_transmon_hamiltonian(&spec);
        assert_eq!(h.get(0, 1).re, -0.8);
        assert_eq!(h.get(3, 4).re, -0.8);
        assert_eq!(h.get(0, 4).re, 0.0);
        assert_eq!(h.max_asymmetry(), 0.0);
    }

    #[test]
    fn qubit_eigensystem_is_orthonormal_and_deterministic() {
        let spec = full_spec();
        let a = build_qubit_eigensystem(&spec).unwrap();
        let b = build_qubit_eigensystem(&spec).unwrap();
        assert_eq!(a.energies, b.energies);
        let dim = spec.charge_dim();
        for i in 0..dim {
            for j in 0..dim {
                assert_eq!(a.states[(i, j)], b.states[(i, j)]);
                let dot: Complex64 = (0..dim).map(|k| a.states[(k, i)].conj() * a.states[(k, j)]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).norm() < 1e-12);
            }
        }
        for w in a.energies.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn transmon_gaps_match_reference_diagonalization() {
        // frozen from an independent LAPACK diagonalization of the 21x21 matrix
        const GAP_01: f64 = 0.7462284865666304;
        const GAP_12: f64 = 0.685267117459657;
        let q = build_qubit_eigensystem(&full_spec()).unwrap();
        assert!((q.energies[1] - q.energies[0] - GAP_01).abs() < 1e-12);
        assert!((q.energies[2] - q.energies[1] - GAP_12).abs() < 1e-12);
    }

    #[test]
    fn qubit_eigenstates_are_charge_states_without_josephson_coupling() {
        let mut spec = SystemSpec::new(0.05, 1.0, 0.0, 0.2).with_cutoffs(3, 1);
        spec.e_j = 0.0;
        let h = build_transmon_hamiltonian(&spec);
        let eig = linalg::hermitian_eigen(h.into_matrix(), &[0., 1., 2., 3., 4., 5., 6.]).unwrap();
        let mut expected: Vec<f64> = (-3..=3).map(|n| 4.0 * 0.05 * (n as f64 - 0.2).powi(2)).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in eig.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        for j in 0..7 {
            let weights: Vec<f64> = (0..7).map(|k| eig.vectors.norm_sqr(k, j)).collect();
            assert!(weights.iter().any(|&w| (w - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn qubit_level_ten_barely_touches_the_charge_edges() {
        let spec = full_spec();
        let q = build_qubit_eigensystem(&spec).unwrap();
        let lo = q.charge_population(10, 0);
        let hi = q.charge_population(10, 20);
        // order 1e-10 per the reference calculation
        assert!(lo > 1e-12 && lo < 1e-8, "{lo:e}");
        assert!(hi > 1e-12 && hi < 1e-8, "{hi:e}");
    }

    #[test]
    fn composite_is_exactly_hermitian() {
        for form in [CouplingForm::Full, CouplingForm::Rwa] {
            let spec = SystemSpec::new(0.05, 1.6, 0.025, 0.2)
                .with_cutoffs(3, 6)
                .with_coupling(form);
            let h = build_composite_hamiltonian(&spec).unwrap();
            assert_eq!(h.max_asymmetry(), 0.0);
            assert!(h.is_hermitian());
        }
    }

    #[test]
    fn occupancy_and_photon_operators_on_product_states() {
        let spec = SystemSpec::new(0.05, 1.6, 0.025, 0.0).with_cutoffs(2, 4);
        let layout = spec.layout();
        let nq = build_occupancy_operator(&spec);
        let nc = build_photon_number_operator(&spec);
        let tot = build_total_excitation_operator(&spec);
        for p in 0..layout.levels {
            for n in 0..layout.fock_dim {
                let k = layout.index(p, n);
                assert_eq!(nq.get(k, k).re, p as f64);
                assert_eq!(nc.get(k, k).re, n as f64);
            }
        }
        let sum = nq.add(&nc);
        for i in 0..layout.dim() {
            for j in 0..layout.dim() {
                assert_eq!(sum.get(i, j), tot.get(i, j));
            }
        }
    }

    #[test]
    fn cavity_quadratures() {
        let spec = SystemSpec::new(0.05, 1.6, 0.0, 0.0).with_cutoffs(1, 3);
        let layout = spec.layout();
        let x = build_cavity_position_operator(&spec);
        let p = build_cavity_momentum_operator(&spec);
        let a = layout.index(1, 2);
        let b = layout.index(1, 1);
        assert_eq!(x.get(a, b).re, 2f64.sqrt());
        assert_eq!(p.get(a, b), Complex64::new(0.0, 2f64.sqrt()));
        assert_eq!(p.get(b, a), Complex64::new(0.0, -(2f64.sqrt())));
        assert_eq!(x.max_asymmetry(), 0.0);
        assert_eq!(p.max_asymmetry(), 0.0);
    }

    #[test]
    fn rwa_commutes_with_total_excitation_and_full_does_not() {
        let base = SystemSpec::new(0.05, 1.6, 0.025, 0.1).with_cutoffs(2, 5);
        let tot = build_total_excitation_operator(&base);
        let rwa = build_composite_hamiltonian(&base.clone().with_coupling(CouplingForm::Rwa)).unwrap();
        let full = build_composite_hamiltonian(&base).unwrap();
        let c_rwa = rwa.commutator_max_abs(&tot);
        let c_full = full.commutator_max_abs(&tot);
        assert!(c_rwa <= 1e-10 * rwa.max_abs(), "{c_rwa:e}");
        assert!(c_full > 1e-3, "{c_full:e}");
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = full_spec();
        s.e_c = 0.0;
        assert!(matches!(s.validate(), Err(Error::InvalidSpec { field: "e_c", .. })));
        let mut s = full_spec();
        s.g = -1.0;
        assert!(matches!(s.validate(), Err(Error::InvalidSpec { field: "g", .. })));
        let mut s = full_spec();
        s.fock_cutoff = 0;
        assert!(s.validate().is_err());
        assert_eq!(full_spec().composite_dim(), 21 * 351);
    }
}
