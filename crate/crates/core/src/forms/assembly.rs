//! Element/edge-local Gram accumulation and deterministic global merge.

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rayon::prelude::*;

use crate::dg::DgSpace;
use crate::scalar::Real;

/// Dense local contribution with its global dof indices.
#[derive(Clone, Debug)]
pub struct Block<T: Real> {
    pub dofs: Vec<usize>,
    pub values: DMatrix<T>,
}

/// Accumulates `Σ weight · r rᵀ` over rows `r` of local coefficients.
pub struct LocalGram<T: Real> {
    pub values: DMatrix<T>,
    nonzero: Vec<usize>,
}

impl<T: Real> LocalGram<T> {
    pub fn new(n: usize) -> Self {
        LocalGram {
            values: DMatrix::zeros(n, n),
            nonzero: Vec::with_capacity(n),
        }
    }

    pub fn add_row(&mut self, weight: T, row: &[T]) {
        self.nonzero.clear();
        self.nonzero
            .extend(row.iter().enumerate().filter(|(_, v)| **v != T::zero()).map(|(i, _)| i));
        for &i in &self.nonzero {
            let wi = weight * row[i];
            for &j in &self.nonzero {
                self.values[(i, j)] += wi * row[j];
            }
        }
    }

    /// Adds `weight · r sᵀ` (not symmetrized).
    pub fn add_outer(&mut self, weight: T, r: &[T], s: &[T]) {
        for (i, &ri) in r.iter().enumerate() {
            if ri == T::zero() {
                continue;
            }
            let wi = weight * ri;
            for (j, &sj) in s.iter().enumerate() {
                self.values[(i, j)] += wi * sj;
            }
        }
    }

    pub fn into_block(self, dofs: Vec<usize>) -> Block<T> {
        Block {
            dofs,
            values: self.values,
        }
    }
}

/// Sums blocks into a CSR matrix of order `n`. Blocks are merged in the
/// order given, so the result does not depend on how they were computed.
pub fn merge<T: Real>(n: usize, blocks: &[Block<T>]) -> CsrMatrix<T> {
    let mut coo = CooMatrix::new(n, n);
    for block in blocks {
        for (li, &gi) in block.dofs.iter().enumerate() {
            for (lj, &gj) in block.dofs.iter().enumerate() {
                let v = block.values[(li, lj)];
                if v != T::zero() {
                    coo.push(gi, gj, v);
                }
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// Global dofs of `element`, field-major.
pub fn element_dofs<T: Real>(space: &DgSpace<T>, element: usize) -> Vec<usize> {
    let start = space.element_offset(element);
    (start..start + space.element_dofs()).collect()
}

/// Unit row helper: coefficient vector of length `n` with `f(i)` written
/// at the positions of `field` shifted by `offset`.
pub fn field_row<T: Real>(
    n: usize,
    nb: usize,
    offset: usize,
    field: usize,
    mut f: impl FnMut(usize) -> T,
) -> Vec<T> {
    let mut row = vec![T::zero(); n];
    for i in 0..nb {
        row[offset + field * nb + i] = f(i);
    }
    row
}

/// Parallel map over a range, collected in index order.
pub fn par_blocks<T, E, F>(count: usize, f: F) -> Result<Vec<Block<T>>, E>
where
    T: Real,
    E: Send,
    F: Fn(usize) -> Result<Option<Block<T>>, E> + Sync + Send,
{
    let blocks: Result<Vec<Option<Block<T>>>, E> = (0..count).into_par_iter().map(f).collect();
    Ok(blocks?.into_iter().flatten().collect())
}

/// Infallible variant of [`par_blocks`].
pub fn par_collect<T, F>(count: usize, f: F) -> Vec<Block<T>>
where
    T: Real,
    F: Fn(usize) -> Block<T> + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}
