//! Dense complex linear algebra used throughout the crate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest entrywise modulus of `a - a†`.
pub fn hermiticity_deviation(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are ascending.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(a.nrows(), a.ncols(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigvalsh(a: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(a)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    eigvalsh(a).first().copied().unwrap_or(0.0)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(a: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (values, vectors) = eigh(a);
    let n = a.nrows();
    let mut scaled = vectors.clone();
    for (col, &lambda) in values.iter().enumerate() {
        let factor = f(lambda);
        for r in 0..n {
            scaled[(r, col)] *= factor;
        }
    }
    scaled * vectors.adjoint()
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMat, t: f64) -> Result<CMat> {
    let dev = hermiticity_deviation(h);
    if dev > 1e-12 * (1.0 + h.norm()) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(hermitian_function(h, |lambda| C64::from_polar(1.0, -lambda * t)))
}

/// Principal square root of a positive semidefinite matrix; tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn sqrt_psd(a: &CMat) -> CMat {
    hermitian_function(a, |lambda| c(lambda.max(0.0).sqrt(), 0.0))
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().sum()
}

/// Trace distance `½‖a − b‖₁` between Hermitian matrices.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    0.5 * eigvalsh(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(a: &CMat) -> f64 {
    eigvalsh(a).iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Largest singular value.
pub fn operator_norm(a: &CMat) -> f64 {
    hermitian_norm(&(a.adjoint() * a)).sqrt()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
}

/// Sparse coordinate-format view of a dense operator, used in the
/// trajectory inner loop where operators are mostly zeros.
#[derive(Debug, Clone)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn from_dense(a: &CMat) -> Self {
        let mut entries = Vec::new();
        for col in 0..a.ncols() {
            for row in 0..a.nrows() {
                let v = a[(row, col)];
                if v != C64::new(0.0, 0.0) {
                    entries.push((row, col, v));
                }
            }
        }
        Self { dim: a.nrows(), entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = self * x`
    #[inline]
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for &(r, col, v) in &self.entries {
            out[r] += v * x[col];
        }
    }

    /// `⟨x|self|x⟩` for normalized `x`.
    #[inline]
    pub fn expectation(&self, x: &[C64]) -> C64 {
        self.entries
            .iter()
            .map(|&(r, col, v)| x[r].conj() * v * x[col])
            .sum()
    }
}
