//! Restarted Lanczos with full reorthogonalization in the `M`-inner
//! product for operators `M⁻¹N` (`M` positive definite, `N` symmetric).

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};

use crate::scalar::{from_usize, lit, to_f64, Real};

use super::{inf_norm, EigenError, EigenOptions, End, Pencil};

struct Operator<T: Real> {
    factor: CscCholesky<T>,
    m: CsrMatrix<T>,
    n: CsrMatrix<T>,
}

impl<T: Real> Operator<T> {
    fn new(m: CsrMatrix<T>, n: CsrMatrix<T>, which: char) -> Result<Self, EigenError> {
        let factor = CscCholesky::factor(&CscMatrix::from(&m)).map_err(|_| EigenError::NotDefinite(which))?;
        Ok(Operator { factor, m, n })
    }

    /// `(N q, M⁻¹ N q)`.
    fn apply(&self, q: &DVector<T>) -> (DVector<T>, DVector<T>) {
        let nq = &self.n * q;
        let rhs = DMatrix::from_column_slice(nq.len(), 1, nq.as_slice());
        let sol = self.factor.solve(&rhs);
        (nq, DVector::from_column_slice(sol.as_slice()))
    }

    fn m_norm(&self, x: &DVector<T>) -> T {
        x.dot(&(&self.m * x)).sqrt()
    }
}

fn start_vector<T: Real>(n: usize) -> DVector<T> {
    DVector::from_fn(n, |i, _| {
        let t = from_usize::<T>(i) * lit::<T>(1.7);
        T::one() + lit::<T>(0.5) * t.sin()
    })
}

/// Largest eigenpair of `M⁻¹N`: `(θ, x, steps)`.
fn largest<T: Real>(op: &Operator<T>, opts: &EigenOptions) -> Result<(T, DVector<T>, usize), EigenError> {
    let dim = op.m.nrows();
    let m = opts.krylov_dim.max(2).min(dim);
    let inner_tol = lit::<T>(opts.tol * 1e-3);
    let mut q = start_vector::<T>(dim);
    q /= op.m_norm(&q);
    let mut steps = 0usize;
    let mut best = (T::zero(), q.clone(), T::max_value().unwrap_or(T::one()));
    loop {
        let mut basis: Vec<DVector<T>> = Vec::with_capacity(m);
        let mut m_basis: Vec<DVector<T>> = Vec::with_capacity(m);
        let mut alpha: Vec<T> = Vec::with_capacity(m);
        let mut beta: Vec<T> = Vec::with_capacity(m);
        let mut current = q.clone();
        for j in 0..m {
            let (nq, mut w) = op.apply(&current);
            let a = nq.dot(&current);
            m_basis.push(&op.m * &current);
            basis.push(current.clone());
            alpha.push(a);
            for _ in 0..2 {
                for (qi, mqi) in basis.iter().zip(&m_basis) {
                    let c = w.dot(mqi);
                    w.axpy(-c, qi, T::one());
                }
            }
            let b = op.m_norm(&w);
            beta.push(b);
            steps += 1;

            let k = j + 1;
            let t = DMatrix::from_fn(k, k, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    T::zero()
                }
            });
            let eig = t.symmetric_eigen();
            let top = eig.eigenvalues.imax();
            let theta = eig.eigenvalues[top];
            let estimate = (b * eig.eigenvectors[(k - 1, top)]).abs();
            let exhausted = b <= lit::<T>(1e-14) * theta.abs().max(T::one());
            if estimate < best.2 || exhausted {
                let mut x = DVector::zeros(dim);
                for (i, qi) in basis.iter().enumerate() {
                    x.axpy(eig.eigenvectors[(i, top)], qi, T::one());
                }
                best = (theta, x, estimate);
            }
            if estimate <= inner_tol * theta.abs() || exhausted || k == dim {
                return Ok((best.0, best.1, steps));
            }
            if steps >= opts.max_iterations {
                return Err(EigenError::NoConvergence {
                    iterations: steps,
                    best: to_f64(best.0),
                    residual: to_f64(best.2 / best.0.abs()),
                });
            }
            if j + 1 < m {
                current = w / b;
            }
        }
        // restart from the best Ritz vector
        q = best.1.clone();
        q /= op.m_norm(&q);
    }
}

/// Approximate-minimum-degree order of the pattern of `A + B`:
/// `order[k]` is the original index of the `k`-th unknown.
fn fill_reducing_order<T: Real>(p: &Pencil<T>) -> Option<Vec<usize>> {
    let pattern = CscMatrix::from(&(&p.a + &p.b));
    let (order, _, _) = amd::order(pattern.nrows(), pattern.col_offsets(), pattern.row_indices(), &amd::Control::default()).ok()?;
    Some(order)
}

/// `P M Pᵀ` with `(P M Pᵀ)[i][j] = M[order[i]][order[j]]`.
fn permute<T: Real>(m: &CsrMatrix<T>, inverse: &[usize]) -> CsrMatrix<T> {
    let mut coo = CooMatrix::new(m.nrows(), m.ncols());
    for (i, j, v) in m.triplet_iter() {
        coo.push(inverse[i], inverse[j], *v);
    }
    CsrMatrix::from(&coo)
}

/// Relative shift of the shift-invert iteration (raised to `100·ε_mach`
/// for single precision).
const SHIFT: f64 = 1e-10;

pub(crate) fn extremal<T: Real>(
    p: &Pencil<T>,
    opts: &EigenOptions,
    end: End,
) -> Result<(T, DVector<T>, usize), EigenError> {
    let Some(order) = fill_reducing_order(p) else {
        return extremal_in_place(p, opts, end);
    };
    let mut inverse = vec![0; order.len()];
    for (k, &i) in order.iter().enumerate() {
        inverse[i] = k;
    }
    let permuted = Pencil {
        a: permute(&p.a, &inverse),
        b: permute(&p.b, &inverse),
    };
    let (value, y, steps) = extremal_in_place(&permuted, opts, end)?;
    let x = DVector::from_fn(y.len(), |i, _| y[inverse[i]]);
    Ok((value, x, steps))
}

fn extremal_in_place<T: Real>(
    p: &Pencil<T>,
    opts: &EigenOptions,
    end: End,
) -> Result<(T, DVector<T>, usize), EigenError> {
    match end {
        End::Max => {
            let op = Operator::new(p.b.clone(), p.a.clone(), 'B')?;
            largest(&op, opts)
        }
        End::Min => {
            // validates B before shifting by it
            CscCholesky::factor(&CscMatrix::from(&p.b)).map_err(|_| EigenError::NotDefinite('B'))?;
            // A may be singular: a small positive shift keeps the factor
            // well defined and maps kernel vectors to μ = 1/s.
            let relative = lit::<T>(SHIFT).max(T::default_epsilon() * lit::<T>(100.0));
            let shift = inf_norm(&p.a) / inf_norm(&p.b) * relative;
            let op = Operator::new(&p.a + &(&p.b * shift), p.b.clone(), 'A')?;
            let (mu, x, steps) = largest(&op, opts)?;
            Ok((T::one() / mu - shift, x, steps))
        }
    }
}
