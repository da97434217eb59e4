//! Density-operator algebra on dense complex matrices.
//!
//! A [`DensityMatrix`] carries a tensor-factor signature (`dims`) alongside its
//! entries so that partial traces can address factors by index. Entropies are
//! in bits. Eigenvalues at or below [`EIGEN_CLIP`] are treated as zero both in
//! `0 log 0` and in matrix square roots.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Spectral noise floor for entropies and square roots.
pub const EIGEN_CLIP: f64 = 1e-12;

/// Default tolerance used when validating a density matrix.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: CMatrix,
    tolerance: f64,
}

impl DensityMatrix {
    /// Builds and validates a density matrix.
    pub fn new(dims: Vec<usize>, entries: CMatrix, tolerance: f64) -> Result<Self> {
        let rho = Self::from_parts_unchecked(dims, entries, tolerance)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks shape only. Used where the construction itself guarantees a valid state.
    pub(crate) fn from_parts_unchecked(
        dims: Vec<usize>,
        entries: CMatrix,
        tolerance: f64,
    ) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::argument(format!(
                "invalid factor dimensions {dims:?}"
            )));
        }
        let total: usize = dims.iter().product();
        if entries.nrows() != total || entries.ncols() != total {
            return Err(Error::argument(format!(
                "matrix is {}x{} but dims {:?} need {total}x{total}",
                entries.nrows(),
                entries.ncols(),
                dims
            )));
        }
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(Error::argument(format!(
                "tolerance must be non-negative, got {tolerance}"
            )));
        }
        Ok(Self {
            dims,
            entries,
            tolerance,
        })
    }

    /// `|psi><psi|` for a state vector; the vector is normalized first.
    pub fn from_pure(dims: Vec<usize>, amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::argument(
                "cannot build a pure state from the zero vector",
            ));
        }
        let psi =
            nalgebra::DVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|a| a / norm));
        let entries = &psi * psi.adjoint();
        Self::new(dims, entries, DEFAULT_TOLERANCE)
    }

    /// The all-zero operator, produced when a level-restricted fragment has no weight.
    pub fn zero(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        Self {
            dims,
            entries: CMatrix::zeros(total, total),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        Self {
            dims,
            entries: CMatrix::identity(total, total) / Complex64::new(total as f64, 0.0),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == C0)
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        // tr[A A] = sum_ij A_ij A_ji = sum_ij |A_ij|^2 for Hermitian A.
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Tensor product, factors of `self` first.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            entries: self.entries.kronecker(&other.entries),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }

    /// `U rho U^dagger`, keeping the factor signature.
    pub fn conjugated(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::argument("unitary dimension does not match state"));
        }
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            entries: u * &self.entries * u.adjoint(),
            tolerance: self.tolerance,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let tol = self.tolerance;
        let herm = max_abs_diff(&self.entries, &self.entries.adjoint());
        if herm > tol {
            return Err(Error::validation(format!(
                "not Hermitian: max |A - A^dagger| = {herm:e} > {tol:e}"
            )));
        }
        if self.is_zero() {
            return Ok(());
        }
        let tr = self.entries.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::validation(format!("trace is {tr}, expected 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::validation(format!(
                "not positive semidefinite: min eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

/// Unit vector on the Bloch sphere labelling the measurement `r . sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub const X: BlochVector = BlochVector([1.0, 0.0, 0.0]);
    pub const Y: BlochVector = BlochVector([0.0, 1.0, 0.0]);
    pub const Z: BlochVector = BlochVector([0.0, 0.0, 1.0]);

    pub fn new(r: [f64; 3]) -> Result<Self> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::argument(format!(
                "Bloch vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self(r))
    }

    /// Normalizes `v`; `None` for a (near-)zero vector.
    pub fn normalized(v: [f64; 3]) -> Option<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm <= 1e-300 {
            return None;
        }
        Some(Self([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// The rank-one projectors `(1 + r.sigma)/2` and `(1 - r.sigma)/2` as 2x2 arrays.
    pub fn projectors(&self) -> [[[Complex64; 2]; 2]; 2] {
        let [x, y, z] = self.0;
        let plus = [
            [
                Complex64::new((1.0 + z) / 2.0, 0.0),
                Complex64::new(x / 2.0, -y / 2.0),
            ],
            [
                Complex64::new(x / 2.0, y / 2.0),
                Complex64::new((1.0 - z) / 2.0, 0.0),
            ],
        ];
        let minus = [
            [
                Complex64::new((1.0 - z) / 2.0, 0.0),
                Complex64::new(-x / 2.0, y / 2.0),
            ],
            [
                Complex64::new(-x / 2.0, -y / 2.0),
                Complex64::new((1.0 + z) / 2.0, 0.0),
            ],
        ];
        [plus, minus]
    }

    /// Orthonormal eigenvectors of `r . sigma` for eigenvalues +1 and -1.
    pub fn eigenbasis(&self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.0;
        // |+> = (cos(th/2), e^{i ph} sin(th/2)), |-> = (-e^{-i ph} sin(th/2), cos(th/2)) up to phase.
        let c = ((1.0 + z) / 2.0).max(0.0).sqrt();
        let s = ((1.0 - z) / 2.0).max(0.0).sqrt();
        let rho = (x * x + y * y).sqrt();
        let phase = if rho > 0.0 {
            Complex64::new(x / rho, y / rho)
        } else {
            C1
        };
        let plus = [Complex64::new(c, 0.0), phase * s];
        let minus = [-phase.conj() * s, Complex64::new(c, 0.0)];
        [plus, minus]
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C0, C1, C1, C0])
}

pub fn pauli_y() -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[C0, -i, i, C0])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C1, C0, C0, -C1])
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    let mut ev: Vec<f64> = hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `-sum p log2 p` over entries above [`EIGEN_CLIP`].
pub fn shannon_bits(probabilities: &[f64]) -> f64 {
    let h: f64 = probabilities
        .iter()
        .filter(|&&p| p > EIGEN_CLIP)
        .map(|&p| -p * p.log2())
        .sum();
    // Eigenvalues a few ulps above 1 would otherwise give a tiny negative value.
    h.max(0.0)
}

/// Entropy in bits of a Hermitian matrix's spectrum.
pub(crate) fn matrix_entropy(m: &CMatrix) -> f64 {
    shannon_bits(&hermitian_eigenvalues(m))
}

/// Von Neumann entropy in bits; 0 for the zero state.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    if rho.is_zero() {
        return 0.0;
    }
    matrix_entropy(rho.entries())
}

/// Standard partial trace keeping the listed factors, in their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::argument(format!(
            "duplicate factor index in {keep:?}"
        )));
    }
    if let Some(&bad) = keep_sorted.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::argument(format!(
            "factor index {bad} out of range for {} factors",
            dims.len()
        )));
    }
    if keep_sorted.is_empty() {
        return Err(Error::argument("must keep at least one factor"));
    }

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let total = rho.dim();
    let kept_total: usize = kept_dims.iter().product();

    // Split every full index into (kept index, traced index).
    let mut split = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut digits = vec![0usize; dims.len()];
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let (mut kept, mut traced) = (0usize, 0usize);
        for (f, &d) in digits.iter().enumerate() {
            if keep_sorted.binary_search(&f).is_ok() {
                kept = kept * dims[f] + d;
            } else {
                traced = traced * dims[f] + d;
            }
        }
        split.push((kept, traced));
    }

    let src = rho.entries();
    let mut out = CMatrix::zeros(kept_total, kept_total);
    for i in 0..total {
        let (ki, ti) = split[i];
        for j in 0..total {
            let (kj, tj) = split[j];
            if ti == tj {
                out[(ki, kj)] += src[(i, j)];
            }
        }
    }
    DensityMatrix::from_parts_unchecked(kept_dims, out, rho.tolerance())
}

/// Sum of singular values.
pub fn trace_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().iter().sum()
}

/// Principal square root of the Hermitian part of `m`, negative eigenvalues clipped.
pub fn hermitian_sqrt(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    if n == 1 {
        return CMatrix::from_element(1, 1, Complex64::new(m[(0, 0)].re.max(0.0).sqrt(), 0.0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut scaled = eig.eigenvectors.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let root = if lambda > EIGEN_CLIP {
            lambda.sqrt()
        } else {
            0.0
        };
        scaled.column_mut(k).scale_mut(root);
    }
    scaled * eig.eigenvectors.adjoint()
}

/// `||sqrt(a) sqrt(b)||_1` for positive semidefinite matrices.
pub(crate) fn fidelity_of_matrices(a: &CMatrix, b: &CMatrix) -> f64 {
    trace_norm(&(hermitian_sqrt(a) * hermitian_sqrt(b)))
}

/// Root fidelity `B(rho1, rho2) = ||sqrt(rho1) sqrt(rho2)||_1`.
pub fn fidelity_b(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dims() != rho2.dims() {
        return Err(Error::argument(format!(
            "dimension mismatch: {:?} vs {:?}",
            rho1.dims(),
            rho2.dims()
        )));
    }
    Ok(fidelity_of_matrices(rho1.entries(), rho2.entries()))
}
