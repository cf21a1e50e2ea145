//! Dense Hermitian linear algebra for small single-excitation Hamiltonians.
//!
//! Everything downstream evolves states with `e^{-iHt}` computed from one
//! spectral decomposition per Hamiltonian, so the decomposition is the only
//! expensive step and every time sample afterwards is a pair of mat-vecs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Asymmetry allowed when accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |H[i][j] - conj(H[j][i])| = {max_asymmetry:e} at ({row}, {col})")]
    NotHermitian {
        max_asymmetry: f64,
        row: usize,
        col: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("empty matrix")]
    Empty,
}

/// A finite complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(DVector<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self, LinalgError> {
        if let Some(i) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite(i));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::from_element(n, C64::new(0.0, 0.0)))
    }

    /// Unit vector `e_k` (0-based).
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        self.0.as_mut_slice()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_dvector(self) -> DVector<C64> {
        self.0
    }

    pub fn from_dvector(v: DVector<C64>) -> Self {
        Self(v)
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64, LinalgError> {
        if self.len() != other.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self.0.dotc(&other.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

/// A dense complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl HermitianMatrix {
    /// Accepts `m` if it is square, finite and Hermitian within [`HERMITIAN_TOL`].
    /// The stored matrix is symmetrized exactly.
    pub fn new(m: DMatrix<C64>) -> Result<Self, LinalgError> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(LinalgError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(LinalgError::Empty);
        }
        if let Some(i) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite(i));
        }
        let (mut worst, mut at) = (0.0, (0, 0));
        for i in 0..rows {
            for j in i..cols {
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                    at = (i, j);
                }
            }
        }
        if worst > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian {
                max_asymmetry: worst,
                row: at.0,
                col: at.1,
            });
        }
        let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Ok(Self(sym))
    }

    pub fn from_real_symmetric(m: &DMatrix<f64>) -> Result<Self, LinalgError> {
        Self::new(m.map(|x| C64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }
}

/// `H = V diag(λ) V†` with eigenvalues ascending.
///
/// Inside a degenerate cluster the individual columns are arbitrary; only the
/// spectral projector is meaningful.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*lambda);
        }
        scaled * v.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted ascending.
///
/// Real symmetric input (the clean and disordered network Hamiltonians) goes
/// through the real solver; genuinely complex input through the complex one.
pub fn eigh(h: &HermitianMatrix) -> SpectralDecomposition {
    let n = h.dim();
    let (values, vectors): (Vec<f64>, DMatrix<C64>) = if h.is_real() {
        let real = h.0.map(|z| z.re);
        let eig = nalgebra::SymmetricEigen::new(real);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let eig = nalgebra::SymmetricEigen::new(h.0.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// `e^{-iHt} psi0` with ħ = 1.
pub fn evolve(
    decomp: &SpectralDecomposition,
    psi0: &ComplexVector,
    t: f64,
) -> Result<ComplexVector, LinalgError> {
    if psi0.len() != decomp.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: decomp.dim(),
            got: psi0.len(),
        });
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let v = &decomp.eigenvectors;
    let mut coeffs = v.ad_mul(psi0.as_dvector());
    for (c, lambda) in coeffs.iter_mut().zip(&decomp.eigenvalues) {
        *c *= C64::from_polar(1.0, -lambda * t);
    }
    Ok(ComplexVector(v * coeffs))
}
