//! Dense complex linear algebra helpers.
//!
//! Matrices are stored as `nalgebra::DMatrix<Complex64>` throughout the
//! crate; eigendecompositions, singular values and large products are
//! delegated to `faer`.

use faer::{Mat, MatRef, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this dimension products stay in nalgebra.
const FAER_PRODUCT_THRESHOLD: usize = 96;

fn to_faer(m: &DMatrix<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn check_square(m: &DMatrix<Complex64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// `a · b`.
pub fn matmul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: a.ncols(),
            right: b.nrows(),
        });
    }
    if a.nrows().max(a.ncols()).max(b.ncols()) < FAER_PRODUCT_THRESHOLD {
        return Ok(a * b);
    }
    let p = to_faer(a) * to_faer(b);
    Ok(from_faer(p.as_ref()))
}

/// Eigendecomposition `A = V diag(λ) V†` of a Hermitian matrix, eigenvalues
/// ascending. Only the lower triangle of the input is read.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn new(m: &DMatrix<Complex64>) -> Result<Self> {
        let n = check_square(m)?;
        if n == 0 {
            return Ok(Self {
                eigenvalues: Vec::new(),
                eigenvectors: DMatrix::zeros(0, 0),
            });
        }
        let evd = to_faer(m)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::InvalidArgument(format!("eigendecomposition failed: {e:?}")))?;
        let s = evd.S();
        let eigenvalues = (0..n).map(|i| s[i].re).collect();
        Ok(Self {
            eigenvalues,
            eigenvectors: from_faer(evd.U()),
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, &lambda) in scaled.column_iter_mut().zip(&self.eigenvalues) {
            col *= f(lambda);
        }
        matmul(&scaled, &self.eigenvectors.adjoint()).expect("square factors")
    }

    /// `e^{itA}`.
    pub fn exp_i(&self, t: f64) -> DMatrix<Complex64> {
        self.map(|lambda| Complex64::from_polar(1.0, t * lambda))
    }
}

/// Largest singular value.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() || m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    let sv = to_faer(m)
        .singular_values()
        .expect("singular value decomposition of a finite matrix");
    sv.into_iter().fold(0.0, f64::max)
}

/// `sqrt(‖A‖₁ ‖A‖_∞)`, an upper bound for the operator norm that needs no
/// factorization.
pub fn operator_norm_bound(m: &DMatrix<Complex64>) -> f64 {
    let max_col = m
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let max_row = m
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    (max_col * max_row).sqrt()
}

/// `max |A - A†|` entrywise.
pub fn hermiticity_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max |A† A - 1|` entrywise.
pub fn unitarity_residual(m: &DMatrix<Complex64>) -> f64 {
    let g = matmul(&m.adjoint(), m).expect("conformant");
    max_abs(&(g - DMatrix::identity(m.ncols(), m.ncols())))
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
