//! Dense complex linear algebra on small state spaces.
//!
//! Everything here is sized for dimensions of 16 or less per factor, so the
//! representations are plain row-major `Vec<Complex64>` with no sparsity or
//! blocking. Inner products are conjugate-linear in the first argument.

use std::collections::BTreeSet;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::BadShape { rows, cols, got: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::BadShape { rows: nrows, cols: ncols, got: r.len() });
            }
        }
        Ok(Self { rows: nrows, cols: ncols, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { left: self.cols, right: other.rows });
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(m)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { left: self.entries.len(), right: other.entries.len() });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let entries = self.entries.iter().map(|&a| a * z).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    /// Kronecker product; block (i,j) is `self[(i,j)] * other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Applies the matrix to a state, returning raw (not renormalized)
    /// amplitudes.
    pub fn apply(&self, v: &StateVector) -> Result<Vec<Complex64>> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch { left: self.cols, right: v.dim() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v.amplitudes[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Largest entry magnitude; zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, atol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > atol {
                    return false;
                }
            }
        }
        true
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes whose squared norm is within `tol::ATOL` of one.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol::ATOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to a unit vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= tol::PROB_FLOOR {
            return Err(Error::ZeroVector);
        }
        let inv = 1.0 / norm_sq.sqrt();
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z * inv).collect() })
    }

    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Fixes the global phase so the largest-magnitude amplitude is real and
    /// positive. Ties break toward the lowest index.
    pub fn phase_canonical(&self) -> Self {
        let mut best = 0;
        let mut best_mag = 0.0;
        for (i, z) in self.amplitudes.iter().enumerate() {
            let mag = z.norm();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag == 0.0 {
            return self.clone();
        }
        let phase = self.amplitudes[best] / best_mag;
        let rot = phase.conj();
        Self { amplitudes: self.amplitudes.iter().map(|&z| z * rot).collect() }
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }
}

/// Inner product, conjugate-linear in `u`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: v.dim() });
    }
    Ok(raw_inner(&u.amplitudes, &v.amplitudes))
}

fn raw_inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Outer product `|u><v|`; rectangular when dimensions differ.
pub fn outer(u: &StateVector, v: &StateVector) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(u.dim(), v.dim());
    for i in 0..u.dim() {
        for j in 0..v.dim() {
            m[(i, j)] = u.amplitudes[i] * v.amplitudes[j].conj();
        }
    }
    m
}

/// `ab - ba` for square matrices of equal dimension.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// True when the commutator vanishes within `tol::ATOL`.
pub fn commutes(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<bool> {
    Ok(commutator(a, b)?.max_abs() <= tol::ATOL)
}

/// Tensor product state; component `i * dim(v) + j` is `u_i * v_j`.
pub fn tensor_state(u: &StateVector, v: &StateVector) -> StateVector {
    let mut amplitudes = Vec::with_capacity(u.dim() * v.dim());
    for a in &u.amplitudes {
        for b in &v.amplitudes {
            amplitudes.push(a * b);
        }
    }
    StateVector { amplitudes }
}

/// Two-dimensional observable basis at the given analyzer angle:
/// eigenvector `(cos t, sin t)` with eigenvalue `+1` and `(-sin t, cos t)`
/// with eigenvalue `-1`.
pub fn qubit_basis(angle: f64) -> ObservableBasis {
    let (s, c) = angle.sin_cos();
    let plus = StateVector::from_raw(vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)]);
    let minus = StateVector::from_raw(vec![Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]);
    ObservableBasis::new(vec![plus, minus], vec![1.0, -1.0])
        .expect("rotation columns are orthonormal")
}

/// Modified Gram-Schmidt with a reorthogonalization pass. Rejects inputs
/// that are linearly dependent (residual norm below 1e-8).
pub fn gram_schmidt(vectors: &[Vec<Complex64>]) -> Result<Vec<StateVector>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if let Some(first) = vectors.first() {
            if v.len() != first.len() {
                return Err(Error::DimensionMismatch { left: first.len(), right: v.len() });
            }
        }
        let w = orthogonalize_against(v.clone(), &out);
        let norm_sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq.sqrt() < 1e-8 {
            return Err(Error::LinearlyDependent { index });
        }
        let inv = 1.0 / norm_sq.sqrt();
        out.push(w.into_iter().map(|z| z * inv).collect());
    }
    Ok(out.into_iter().map(StateVector::from_raw).collect())
}

/// Extends `seeds` to a full orthonormal set of size `dim` by feeding the
/// canonical basis vectors through Gram-Schmidt in index order and skipping
/// any that are nearly dependent on what came before. Deterministic.
pub fn orthonormal_completion(seeds: &[StateVector], dim: usize) -> Result<Vec<StateVector>> {
    for s in seeds {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: s.dim() });
        }
    }
    let mut out: Vec<Vec<Complex64>> =
        gram_schmidt(&seeds.iter().map(|s| s.amplitudes.clone()).collect::<Vec<_>>())?
            .into_iter()
            .map(|s| s.amplitudes)
            .collect();
    for i in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[i] = Complex64::new(1.0, 0.0);
        let w = orthogonalize_against(e, &out);
        let norm_sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq.sqrt() > 1e-6 {
            let inv = 1.0 / norm_sq.sqrt();
            out.push(w.into_iter().map(|z| z * inv).collect());
        }
    }
    if out.len() != dim {
        return Err(Error::LinearlyDependent { index: out.len() });
    }
    Ok(out.into_iter().map(StateVector::from_raw).collect())
}

fn orthogonalize_against(mut w: Vec<Complex64>, basis: &[Vec<Complex64>]) -> Vec<Complex64> {
    for _ in 0..2 {
        for q in basis {
            let c = raw_inner(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
    w
}

/// Maximal set of eigenvector indices sharing one eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspace {
    pub eigenvalue: f64,
    pub indices: BTreeSet<usize>,
}

/// Complete orthonormal eigenbasis with real, possibly repeated eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableBasis {
    eigenvectors: Vec<StateVector>,
    eigenvalues: Vec<f64>,
}

impl ObservableBasis {
    /// Requires one eigenvalue per eigenvector, a complete set (as many
    /// vectors as dimensions), pairwise orthonormality within `tol::ATOL`,
    /// and a Hermitian reconstruction.
    pub fn new(eigenvectors: Vec<StateVector>, eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvectors.len() != eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                left: eigenvectors.len(),
                right: eigenvalues.len(),
            });
        }
        let dim = eigenvectors.first().map_or(0, StateVector::dim);
        if eigenvectors.is_empty() || eigenvectors.len() != dim {
            return Err(Error::DimensionMismatch { left: eigenvectors.len(), right: dim });
        }
        for (i, v) in eigenvectors.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: v.dim() });
            }
            let norm_sq: f64 = v.amplitudes.iter().map(|z| z.norm_sqr()).sum();
            if (norm_sq - 1.0).abs() > tol::ATOL {
                return Err(Error::NotNormalized { norm_sq });
            }
            for (j, w) in eigenvectors.iter().enumerate().take(i) {
                let overlap = raw_inner(&v.amplitudes, &w.amplitudes).norm();
                if overlap > tol::ATOL {
                    return Err(Error::NotOrthonormal { i: j, j: i, overlap });
                }
            }
        }
        let basis = Self { eigenvectors, eigenvalues };
        debug_assert!(basis.observable().is_hermitian(tol::ATOL));
        Ok(basis)
    }

    /// Canonical basis with eigenvalues `0, 1, ..., dim - 1`.
    pub fn computational(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|i| i as f64).collect())
            .expect("canonical vectors are orthonormal")
    }

    /// Canonical basis vectors paired with the given eigenvalues.
    pub fn diagonal(eigenvalues: Vec<f64>) -> Result<Self> {
        let dim = eigenvalues.len();
        let eigenvectors = (0..dim)
            .map(|i| StateVector::basis_state(dim, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(eigenvectors, eigenvalues)
    }

    pub fn dim(&self) -> usize {
        self.eigenvectors.len()
    }

    pub fn eigenvector(&self, index: usize) -> &StateVector {
        &self.eigenvectors[index]
    }

    pub fn eigenvectors(&self) -> &[StateVector] {
        &self.eigenvectors
    }

    pub fn eigenvalue(&self, index: usize) -> f64 {
        self.eigenvalues[index]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Reconstructed observable `sum_l k_l |k_l><k_l|`.
    pub fn observable(&self) -> ComplexMatrix {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (v, &k) in self.eigenvectors.iter().zip(&self.eigenvalues) {
            let p = outer(v, v);
            m = m.add(&p.scale(Complex64::new(k, 0.0))).expect("square");
        }
        m
    }

    /// Projector onto the span of the chosen eigenvectors.
    pub fn projector<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<ComplexMatrix> {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for index in indices {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
            let v = &self.eigenvectors[index];
            m = m.add(&outer(v, v)).expect("square");
        }
        Ok(m)
    }

    /// Eigenspaces pooled by eigenvalue (matching within `tol::ATOL`), in
    /// order of first occurrence.
    pub fn eigenspaces(&self) -> Vec<Eigenspace> {
        let mut spaces: Vec<Eigenspace> = Vec::new();
        for (index, &k) in self.eigenvalues.iter().enumerate() {
            match spaces.iter_mut().find(|s| (s.eigenvalue - k).abs() <= tol::ATOL) {
                Some(space) => {
                    space.indices.insert(index);
                }
                None => {
                    spaces.push(Eigenspace { eigenvalue: k, indices: BTreeSet::from([index]) });
                }
            }
        }
        spaces
    }

    /// All indices whose eigenvalue matches `value` within `tol::ATOL`.
    pub fn indices_for_eigenvalue(&self, value: f64) -> Result<BTreeSet<usize>> {
        let indices: BTreeSet<usize> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &k)| (k - value).abs() <= tol::ATOL)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            return Err(Error::NoSuchEigenvalue { value });
        }
        Ok(indices)
    }
}
