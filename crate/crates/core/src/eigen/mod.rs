//! Extremal eigenpairs of symmetric-definite pencils `A x = λ B x`.
//!
//! Pencils up to [`EigenOptions::dense_threshold`] are reduced with the
//! Cholesky factor of `B` to a standard symmetric problem and solved in
//! full. Larger pencils use Lanczos iteration in an inner product that makes
//! the iteration operator self-adjoint: `B⁻¹A` for the top of the spectrum
//! and the shift-inverted `(A + sB)⁻¹B` for the bottom. The iterative path
//! works on the pencil permuted into approximate-minimum-degree order, which
//! keeps the sparse Cholesky factors small.

mod dense;
mod lanczos;


use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use thiserror::Error;

use crate::forms::NormGram;
use crate::scalar::{lit, to_f64, Real};

pub use dense::{dense_spectrum, generalized_eigenvalues};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("pencil matrices have shapes {a:?} and {b:?}")]
    Shape { a: (usize, usize), b: (usize, usize) },
    #[error("matrix {which} is not symmetric (relative asymmetry {asymmetry:e})")]
    Asymmetric { which: char, asymmetry: f64 },
    #[error("matrix {0} is not positive definite (Cholesky factorization failed)")]
    NotDefinite(char),
    #[error("no convergence after {iterations} iterations: best λ = {best:e}, residual {residual:e}")]
    NoConvergence {
        iterations: usize,
        best: f64,
        residual: f64,
    },
    #[error("empty pencil")]
    Empty,
}

/// Symmetric pencil `(A, B)` with `B` positive definite.
#[derive(Clone, Debug)]
pub struct Pencil<T: Real> {
    pub a: CsrMatrix<T>,
    pub b: CsrMatrix<T>,
}

/// Relative asymmetry tolerated on construction.
pub const SYMMETRY_TOL: f64 = 1e-12;

fn inf_norm<T: Real>(m: &CsrMatrix<T>) -> T {
    m.row_iter()
        .map(|row| row.values().iter().fold(T::zero(), |s, v| s + v.abs()))
        .fold(T::zero(), |a, b| a.max(b))
}

fn relative_asymmetry<T: Real>(m: &CsrMatrix<T>) -> f64 {
    let scale = m.values().iter().fold(0.0f64, |s, v| s.max(to_f64(*v).abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let t = m.transpose();
    let diff = m - &t;
    diff.values().iter().fold(0.0f64, |s, v| s.max(to_f64(*v).abs())) / scale
}

pub(crate) fn csr_from_dense<T: Real>(m: &DMatrix<T>) -> CsrMatrix<T> {
    let mut coo = CooMatrix::new(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != T::zero() {
                coo.push(i, j, v);
            }
        }
    }
    CsrMatrix::from(&coo)
}

impl<T: Real> Pencil<T> {
    /// Validates shapes and symmetry. Definiteness of `B` is certified when
    /// a solver factors it.
    pub fn new(a: CsrMatrix<T>, b: CsrMatrix<T>) -> Result<Self, EigenError> {
        let (sa, sb) = ((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
        if sa.0 != sa.1 || sa != sb {
            return Err(EigenError::Shape { a: sa, b: sb });
        }
        if sa.0 == 0 {
            return Err(EigenError::Empty);
        }
        for (which, m) in [('A', &a), ('B', &b)] {
            let asymmetry = relative_asymmetry(m);
            if asymmetry > SYMMETRY_TOL {
                return Err(EigenError::Asymmetric { which, asymmetry });
            }
        }
        Ok(Pencil { a, b })
    }

    pub fn from_dense(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<Self, EigenError> {
        Self::new(csr_from_dense(a), csr_from_dense(b))
    }

    pub fn from_grams(a: &NormGram<T>, b: &NormGram<T>) -> Result<Self, EigenError> {
        Self::new(a.matrix.clone(), b.matrix.clone())
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `xᵀAx / xᵀBx`.
    pub fn rayleigh(&self, x: &DVector<T>) -> T {
        let ax = &self.a * x;
        let bx = &self.b * x;
        x.dot(&ax) / x.dot(&bx)
    }

    /// `‖Ax − λBx‖ / ‖Ax‖`, zero when `Ax = 0`.
    pub fn residual(&self, lambda: T, x: &DVector<T>) -> T {
        let ax = &self.a * x;
        let bx = &self.b * x;
        let norm = ax.norm();
        if norm == T::zero() {
            return T::zero();
        }
        (&ax - &bx * lambda).norm() / norm
    }

    /// Normwise backward error `‖Ax − λBx‖ / ((‖A‖∞ + |λ|‖B‖∞)‖x‖)`. Unlike
    /// [`Pencil::residual`] it stays small for accurate kernel vectors.
    pub fn backward_error(&self, lambda: T, x: &DVector<T>) -> T {
        let r = &self.a * x - (&self.b * x) * lambda;
        let denom = (inf_norm(&self.a) + lambda.abs() * inf_norm(&self.b)) * x.norm();
        if denom == T::zero() {
            return T::zero();
        }
        r.norm() / denom
    }

    /// Pencil `(A + σB, B)`.
    pub fn shifted(&self, sigma: T) -> Self {
        Pencil {
            a: &self.a + &(&self.b * sigma),
            b: self.b.clone(),
        }
    }
}

/// Solver settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Relative eigenvalue tolerance of the iterative path. A result is
    /// accepted when its residual or its backward error is below it.
    pub tol: f64,
    /// Dimension up to which the dense path is used.
    pub dense_threshold: usize,
    /// Krylov basis size before a restart.
    pub krylov_dim: usize,
    /// Total Lanczos steps allowed.
    pub max_iterations: usize,
    /// Rayleigh quotients below `kernel_tol·max(1, λ_max)` count as zero.
    pub kernel_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-8,
            dense_threshold: 500,
            krylov_dim: 60,
            max_iterations: 3000,
            kernel_tol: 1e-12,
        }
    }
}

/// Extremal eigenpair.
#[derive(Clone, Debug)]
pub struct EigResult<T: Real> {
    pub value: T,
    /// `B`-normalized: `xᵀBx = 1`.
    pub vector: DVector<T>,
    /// `‖Ax − λBx‖ / ‖Ax‖`.
    pub residual: T,
    /// Lanczos steps taken; zero on the dense path.
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum End {
    Min,
    Max,
}

fn b_normalize<T: Real>(p: &Pencil<T>, x: &mut DVector<T>) {
    let bx = &p.b * &*x;
    let n = x.dot(&bx).sqrt();
    *x /= n;
    // fix the sign so the largest entry is positive, for reproducible output
    let imax = x.iamax();
    if x[imax] < T::zero() {
        x.neg_mut();
    }
}

fn solve<T: Real>(p: &Pencil<T>, opts: &EigenOptions, end: End) -> Result<EigResult<T>, EigenError> {
    let (value, mut vector, iterations) = if p.dim() <= opts.dense_threshold {
        let (value, vector) = dense::extremal(p, end)?;
        (value, vector, 0)
    } else {
        lanczos::extremal(p, opts, end)?
    };
    b_normalize(p, &mut vector);
    let value = if iterations == 0 { value } else { p.rayleigh(&vector) };
    let residual = p.residual(value, &vector);
    if to_f64(residual) > opts.tol && to_f64(p.backward_error(value, &vector)) > opts.tol {
        return Err(EigenError::NoConvergence {
            iterations,
            best: to_f64(value),
            residual: to_f64(residual),
        });
    }
    Ok(EigResult {
        value,
        vector,
        residual,
        iterations,
    })
}

/// Smallest eigenvalue of the pencil and its eigenvector.
pub fn min_eig<T: Real>(p: &Pencil<T>, opts: &EigenOptions) -> Result<EigResult<T>, EigenError> {
    solve(p, opts, End::Min)
}

/// Largest eigenvalue of the pencil and its eigenvector.
pub fn max_eig<T: Real>(p: &Pencil<T>, opts: &EigenOptions) -> Result<EigResult<T>, EigenError> {
    solve(p, opts, End::Max)
}

/// Korn-type constant `C = λ_min(E, H)^{-1/2}`.
#[derive(Clone, Debug)]
pub struct KornReport<T: Real> {
    /// `+∞` when `E` has a kernel.
    pub constant: T,
    pub lambda_min: T,
    /// Largest eigenvalue of the same pencil, the scale for kernel detection.
    pub lambda_max: T,
    /// Maximizing field (kernel vector when the constant is infinite),
    /// `H`-normalized.
    pub field: DVector<T>,
    pub residual: T,
    pub iterations: usize,
}

impl<T: Real> KornReport<T> {
    pub fn is_infinite(&self) -> bool {
        !self.constant.is_finite()
    }
}

/// `sup ‖x‖_H / ‖x‖_E` from the pencil `(E, H)`.
pub fn korn_constant<T: Real>(
    e: &NormGram<T>,
    h: &NormGram<T>,
    opts: &EigenOptions,
) -> Result<KornReport<T>, EigenError> {
    let p = Pencil::from_grams(e, h)?;
    korn_from_pencil(&p, opts)
}

pub fn korn_from_pencil<T: Real>(p: &Pencil<T>, opts: &EigenOptions) -> Result<KornReport<T>, EigenError> {
    // λ_max only sets the kernel scale, so an unconverged estimate will do
    let (lambda_max, top_iterations) = match max_eig(p, opts) {
        Ok(top) => (top.value, top.iterations),
        Err(EigenError::NoConvergence { iterations, best, residual }) => {
            log::warn!("largest eigenvalue unconverged (residual {residual:e}); using {best:e} as kernel scale");
            (lit::<T>(best), iterations)
        }
        Err(e) => return Err(e),
    };
    let scale = T::one().max(lambda_max.abs());
    let bottom = min_eig(p, opts)?;
    let kernel = bottom.value <= lit::<T>(opts.kernel_tol) * scale;
    if kernel {
        log::warn!(
            "energy pencil has a kernel (λ_min = {:e}): Korn constant is infinite",
            to_f64(bottom.value)
        );
    }
    Ok(KornReport {
        constant: if kernel {
            lit::<T>(f64::INFINITY)
        } else {
            T::one() / bottom.value.sqrt()
        },
        lambda_min: bottom.value,
        lambda_max,
        field: bottom.vector,
        residual: bottom.residual,
        iterations: bottom.iterations + top_iterations,
    })
}
