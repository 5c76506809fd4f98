//! Dense Hermitian eigensolver front-end.
//!
//! Many Hamiltonians in this crate are complex only through a diagonal
//! phase: `H = D R D^H` with `R` real symmetric and `D` unitary diagonal
//! (the capacitive coupling `i g N (c^dag - c)` is such a case). We detect
//! that gauge by walking the non-zero pattern and, when it exists, solve
//! the real problem instead, which is several times cheaper and halves the
//! memory needed for the eigenvectors.

use std::collections::VecDeque;

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvectors either stored as `gauge[k] * column_phase[j] * real[(k, j)]`
/// or as a plain complex matrix.
#[derive(Clone, Debug)]
pub enum EigenVectors {
    Gauged {
        gauge: Vec<Complex64>,
        column_phase: Vec<Complex64>,
        real: Mat<f64>,
    },
    Complex(Mat<Complex64>),
}

impl EigenVectors {
    pub fn dim(&self) -> usize {
        match self {
            EigenVectors::Gauged { real, .. } => real.nrows(),
            EigenVectors::Complex(m) => m.nrows(),
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match self {
            EigenVectors::Gauged {
                gauge,
                column_phase,
                real,
            } => gauge[row] * column_phase[col] * real[(row, col)],
            EigenVectors::Complex(m) => m[(row, col)],
        }
    }

    /// `|S[row, col]|^2` without forming the complex entry.
    #[inline]
    pub fn norm_sqr(&self, row: usize, col: usize) -> f64 {
        match self {
            EigenVectors::Gauged { real, .. } => {
                let x = real[(row, col)];
                x * x
            }
            EigenVectors::Complex(m) => m[(row, col)].norm_sqr(),
        }
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|k| self.get(k, col)).collect()
    }

    /// `S^H v` for all columns at once.
    pub fn adjoint_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        match self {
            EigenVectors::Gauged {
                gauge,
                column_phase,
                real,
            } => {
                // S^H v = conj(column_phase) * R^T (conj(gauge) v)
                let mut re = Mat::<f64>::zeros(n, 2);
                for k in 0..n {
                    let w = gauge[k].conj() * v[k];
                    re[(k, 0)] = w.re;
                    re[(k, 1)] = w.im;
                }
                let prod = real.transpose() * &re;
                (0..n)
                    .map(|j| column_phase[j].conj() * Complex64::new(prod[(j, 0)], prod[(j, 1)]))
                    .collect()
            }
            EigenVectors::Complex(m) => {
                let col = Mat::<Complex64>::from_fn(n, 1, |k, _| v[k]);
                let prod = m.adjoint() * &col;
                (0..n).map(|j| prod[(j, 0)]).collect()
            }
        }
    }

    /// `sum_k |S[k, col]|^2 weight[k]` for every column.
    pub fn diagonal_expectations(&self, weight: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| match self {
                EigenVectors::Gauged { real, .. } => {
                    let c = real.col(j);
                    (0..n).map(|k| c[k] * c[k] * weight[k]).sum()
                }
                EigenVectors::Complex(m) => {
                    let c = m.col(j);
                    (0..n).map(|k| c[k].norm_sqr() * weight[k]).sum()
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: EigenVectors,
}

pub fn max_abs(m: &Mat<Complex64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

pub fn max_asymmetry(m: &Mat<Complex64>) -> f64 {
    let n = m.nrows();
    let mut out = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            out = out.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    out
}

/// Diagonal unitary `d` with `conj(d_i) H_ij d_j` real for every entry, if one exists.
fn find_real_gauge(h: &Mat<Complex64>, tol: f64) -> Option<Vec<Complex64>> {
    let n = h.nrows();
    let mut gauge: Vec<Option<Complex64>> = vec![None; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if gauge[root].is_some() {
            continue;
        }
        gauge[root] = Some(Complex64::new(1.0, 0.0));
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            let di = gauge[i].unwrap();
            for j in 0..n {
                if gauge[j].is_some() {
                    continue;
                }
                let hij = h[(i, j)];
                let mag = hij.norm();
                if mag > tol {
                    gauge[j] = Some(di * hij.conj() / mag);
                    queue.push_back(j);
                }
            }
        }
    }
    let gauge: Vec<Complex64> = gauge.into_iter().map(Option::unwrap).collect();
    for j in 0..n {
        for i in 0..n {
            let z = gauge[i].conj() * h[(i, j)] * gauge[j];
            if z.im.abs() > tol {
                return None;
            }
        }
    }
    Some(gauge)
}

/// Index of the largest-magnitude entry, ties to the lowest index.
fn dominant_index(mags: impl Iterator<Item = f64>) -> usize {
    let mags: Vec<f64> = mags.collect();
    let max = mags.iter().cloned().fold(0.0f64, f64::max);
    mags.iter()
        .position(|&m| m >= max * (1.0 - 1e-12))
        .unwrap_or(0)
}

/// Groups of consecutive eigenvalues closer than `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            if k - start > 1 {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

/// Rotates each degenerate cluster so that it diagonalizes `diag(tie_key)`,
/// then orders the cluster by ascending key expectation.
fn refine_real_clusters(values: &mut [f64], vecs: &mut Mat<f64>, tie_key: &[f64], tol: f64) -> Result<()> {
    let n = vecs.nrows();
    for range in clusters(values, tol) {
        let k = range.len();
        let cols: Vec<usize> = range.clone().collect();
        let proj = Mat::<f64>::from_fn(k, k, |a, b| {
            (0..n)
                .map(|r| vecs[(r, cols[a])] * tie_key[r] * vecs[(r, cols[b])])
                .sum()
        });
        let evd = proj.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver {
            dim: k,
            reason: format!("{e:?}"),
        })?;
        let rot = evd.U();
        let block = Mat::<f64>::from_fn(n, k, |r, a| vecs[(r, cols[a])]);
        let rotated = &block * rot;
        for a in 0..k {
            for r in 0..n {
                vecs[(r, cols[a])] = rotated[(r, a)];
            }
        }
        let mut vals: Vec<f64> = cols.iter().map(|&c| values[c]).collect();
        vals.sort_by(f64::total_cmp);
        for (a, &c) in cols.iter().enumerate() {
            values[c] = vals[a];
        }
    }
    Ok(())
}

fn refine_complex_clusters(
    values: &mut [f64],
    vecs: &mut Mat<Complex64>,
    tie_key: &[f64],
    tol: f64,
) -> Result<()> {
    let n = vecs.nrows();
    for range in clusters(values, tol) {
        let k = range.len();
        let cols: Vec<usize> = range.clone().collect();
        let proj = Mat::<Complex64>::from_fn(k, k, |a, b| {
            (0..n)
                .map(|r| vecs[(r, cols[a])].conj() * tie_key[r] * vecs[(r, cols[b])])
                .sum()
        });
        let evd = proj.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigensolver {
            dim: k,
            reason: format!("{e:?}"),
        })?;
        let block = Mat::<Complex64>::from_fn(n, k, |r, a| vecs[(r, cols[a])]);
        let rotated = &block * evd.U();
        for a in 0..k {
            for r in 0..n {
                vecs[(r, cols[a])] = rotated[(r, a)];
            }
        }
        let mut vals: Vec<f64> = cols.iter().map(|&c| values[c]).collect();
        vals.sort_by(f64::total_cmp);
        for (a, &c) in cols.iter().enumerate() {
            values[c] = vals[a];
        }
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix, ascending eigenvalues.
///
/// Eigenvectors follow a fixed phase convention: the largest-magnitude
/// component of each column is real positive. Eigenvalues closer than
/// `1e-11 * max|H|` are treated as degenerate and their subspace is
/// rotated onto eigenvectors of `diag(tie_key)`.
pub fn hermitian_eigen(h: Mat<Complex64>, tie_key: &[f64]) -> Result<HermitianEigen> {
    let n = h.nrows();
    assert_eq!(n, h.ncols());
    assert_eq!(n, tie_key.len());
    let scale = max_abs(&h).max(1.0);
    let gauge_tol = 1e-13 * scale;
    let cluster_tol = 1e-11 * scale;
    let fail = |e: faer::linalg::evd::EvdError| Error::Eigensolver {
        dim: n,
        reason: format!("{e:?}"),
    };

    if let Some(gauge) = find_real_gauge(&h, gauge_tol) {
        let real = Mat::<f64>::from_fn(n, n, |i, j| (gauge[i].conj() * h[(i, j)] * gauge[j]).re);
        drop(h);
        let evd = real.self_adjoint_eigen(Side::Lower).map_err(fail)?;
        drop(real);
        let mut values: Vec<f64> = (0..n).map(|k| evd.S()[k]).collect();
        let mut vecs = evd.U().to_owned();
        drop(evd);
        refine_real_clusters(&mut values, &mut vecs, tie_key, cluster_tol)?;
        let column_phase = (0..n)
            .map(|j| {
                let k = dominant_index((0..n).map(|r| vecs[(r, j)].abs()));
                let z = gauge[k] * vecs[(k, j)];
                z.conj() / z.norm()
            })
            .collect();
        Ok(HermitianEigen {
            values,
            vectors: EigenVectors::Gauged {
                gauge,
                column_phase,
                real: vecs,
            },
        })
    } else {
        let evd = h.self_adjoint_eigen(Side::Lower).map_err(fail)?;
        drop(h);
        let mut values: Vec<f64> = (0..n).map(|k| evd.S()[k].re).collect();
        let mut vecs = evd.U().to_owned();
        drop(evd);
        refine_complex_clusters(&mut values, &mut vecs, tie_key, cluster_tol)?;
        for j in 0..n {
            let k = dominant_index((0..n).map(|r| vecs[(r, j)].norm()));
            let z = vecs[(k, j)];
            let phase = z.conj() / z.norm();
            for r in 0..n {
                vecs[(r, j)] *= phase;
            }
            vecs[(k, j)] = Complex64::new(vecs[(k, j)].re, 0.0);
        }
        Ok(HermitianEigen {
            values,
            vectors: EigenVectors::Complex(vecs),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_closed_form() {
        let x = 0.3;
        let h = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(0.0, 0.0),
            (1, 1) => c(1.0, 0.0),
            _ => c(x, 0.0),
        });
        let e = hermitian_eigen(h, &[0.0, 1.0]).unwrap();
        let r = (1.0 + 4.0 * x * x).sqrt();
        assert!((e.values[0] - (1.0 - r) / 2.0).abs() < 1e-14);
        assert!((e.values[1] - (1.0 + r) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn imaginary_hopping_is_gauged_real() {
        // tridiagonal with pure imaginary hopping
        let n = 5;
        let h = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c(i as f64, 0.0)
            } else if j == i + 1 {
                c(0.0, 0.2)
            } else if i == j + 1 {
                c(0.0, -0.2)
            } else {
                c(0.0, 0.0)
            }
        });
        let key: Vec<f64> = (0..n).map(|k| k as f64).collect();
        let e = hermitian_eigen(h.clone(), &key).unwrap();
        assert!(matches!(e.vectors, EigenVectors::Gauged { .. }));
        for j in 0..n {
            let v = e.vectors.column(j);
            for i in 0..n {
                let hv: Complex64 = (0..n).map(|k| h[(i, k)] * v[k]).sum();
                assert!((hv - e.values[j] * v[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn generic_complex_matrix_uses_complex_path() {
        // a triangle of complex hoppings with a non-trivial flux has no real gauge
        let w = c(0.0, 1.0);
        let h = Mat::from_fn(3, 3, |i, j| match (i, j) {
            (0, 1) | (1, 2) | (2, 0) => w * 0.1,
            (1, 0) | (2, 1) | (0, 2) => w.conj() * 0.1,
            (k, l) if k == l => c(k as f64, 0.0),
            _ => unreachable!(),
        });
        let e = hermitian_eigen(h.clone(), &[0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(e.vectors, EigenVectors::Complex(_)));
        for j in 0..3 {
            let v = e.vectors.column(j);
            for i in 0..3 {
                let hv: Complex64 = (0..3).map(|k| h[(i, k)] * v[k]).sum();
                assert!((hv - e.values[j] * v[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_cluster_aligns_with_key() {
        let h = Mat::from_fn(3, 3, |i, j| if i == j { c([1.0, 0.0, 1.0][i], 0.0) } else { c(0.0, 0.0) });
        let e = hermitian_eigen(h, &[2.0, 0.0, 1.0]).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 1.0]);
        // within the degenerate pair the lower key (basis 2) comes first
        assert!((e.vectors.norm_sqr(2, 1) - 1.0).abs() < 1e-14);
        assert!((e.vectors.norm_sqr(0, 2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_convention_dominant_component_positive() {
        let h = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(0.0, 0.0),
            (1, 1) => c(1.0, 0.0),
            (0, 1) => c(0.0, 0.2),
            _ => c(0.0, -0.2),
        });
        let e = hermitian_eigen(h, &[0.0, 1.0]).unwrap();
        for j in 0..2 {
            let v = e.vectors.column(j);
            let k = if v[0].norm() >= v[1].norm() { 0 } else { 1 };
            assert!(v[k].re > 0.0 && v[k].im.abs() < 1e-15);
        }
    }
}
