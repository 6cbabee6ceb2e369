use nalgebra::{DMatrix, DVector};

use crate::scalar::{lit, Real};

use super::{EigenError, End, Pencil};

/// `L⁻¹ A L⁻ᵀ` with `B = L Lᵀ`, and `L`.
fn reduce<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<(DMatrix<T>, DMatrix<T>), EigenError> {
    let l = b
        .clone()
        .cholesky()
        .ok_or(EigenError::NotDefinite('B'))?
        .unpack();
    let x = l.solve_lower_triangular(a).ok_or(EigenError::NotDefinite('B'))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(EigenError::NotDefinite('B'))?;
    let c = (&c + c.transpose()) * lit::<T>(0.5);
    Ok((c, l))
}

/// Full spectrum in ascending order with `B`-orthonormal eigenvectors.
pub fn dense_spectrum<T: Real>(p: &Pencil<T>) -> Result<(DVector<T>, DMatrix<T>), EigenError> {
    let a = DMatrix::from(&p.a);
    let b = DMatrix::from(&p.b);
    let (c, l) = reduce(&a, &b)?;
    let eig = c.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let y = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let x = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(EigenError::NotDefinite('B'))?;
    Ok((values, x))
}

/// Ascending eigenvalues of a small dense pencil.
pub fn generalized_eigenvalues<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<DVector<T>, EigenError> {
    if a.nrows() == 0 {
        return Err(EigenError::Empty);
    }
    let (c, _) = reduce(a, b)?;
    let mut values: Vec<T> = c.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(DVector::from_vec(values))
}

pub(crate) fn extremal<T: Real>(p: &Pencil<T>, end: End) -> Result<(T, DVector<T>), EigenError> {
    let (values, vectors) = dense_spectrum(p)?;
    let k = match end {
        End::Min => 0,
        End::Max => values.len() - 1,
    };
    Ok((values[k], vectors.column(k).into_owned()))
}
