//! Shell strains and Gram matrices of the discrete norms, energy norms,
//! boundary seminorms and the Naghdi model operator.

mod assembly;
mod dump;
mod energy;
mod model;
mod norms;
mod plane;
mod strains;

#[cfg(test)]
mod tests;

use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::scalar::Real;

pub use assembly::{merge, Block, LocalGram};
pub use dump::{read_matrix, write_matrix};
pub use energy::{
    assemble_energy_gram, assemble_f_seminorm, boundary_conormal, evaluate_energy, EnergyParts,
};
pub use model::{assemble_naghdi_model, LoadData, ModelParams, NaghdiSystem};
pub use norms::{
    assemble_mass_gram, assemble_norm_gram, assemble_strip_gram, assemble_trace_gram,
    edge_jump_gram,
};
pub use plane::assemble_plane_elasticity;
pub use strains::{koiter_bending, naghdi_strains, zero_shear_rotation, StrainState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{kind:?} is not defined for the {layout:?} field layout")]
    Layout {
        kind: GramKind,
        layout: crate::dg::FieldLayout,
    },
    #[error("invalid model parameter: {0}")]
    Parameter(String),
}

/// Discrete norm families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// `Σ ‖·‖²_{H¹_h}` over every field.
    H,
    /// `‖u‖²_{H¹_h} + ‖w‖²_{H²_h}`.
    HK,
    /// `‖u‖²_{H¹_h} + ‖w‖²_{H̄²_h}` with the `h⁻³` jump of `w`.
    HKBar,
}

/// Discrete energy norm families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnergyKind {
    /// `E_h`: bending, membrane, shear and `h⁻¹` jumps of `θ, u, w`.
    Naghdi,
    /// `E^K_h`: Koiter bending, membrane and `h⁻¹` jumps of `u, ∂_αw, w`.
    Koiter,
    /// Koiter energy with `h⁻¹⟦∂_nw⟧²` and `h⁻³⟦w⟧²`.
    KoiterBar,
    /// Plane elasticity `‖e(u)‖² + h⁻¹⟦u⟧²`.
    Plane,
    /// Plane elasticity with the `‖u‖²₀` term of the piecewise Korn
    /// inequality of Brenner.
    PlaneBrenner,
}

/// Boundary seminorm added to an energy Gram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FSpec {
    None,
    /// Unweighted edge integrals.
    Paper,
    /// Edge integrals weighted by `h_e⁻¹`.
    Nitsche,
}

/// Which example seminorm to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeminormModel {
    /// `θ` on clamped edges, `u, w` on clamped and supported edges.
    Naghdi,
    /// `u, w` on clamped and supported edges, `D_n w` on clamped edges.
    Koiter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GramKind {
    Norm(NormKind),
    Energy(EnergyKind),
    Seminorm(SeminormModel),
    Mass,
    Trace,
    Strip,
    Jump,
}

/// Assembled symmetric Gram matrix.
#[derive(Clone, Debug)]
pub struct NormGram<T: Real> {
    pub kind: GramKind,
    pub matrix: CsrMatrix<T>,
    /// Set when rigid motions are known to lie in the kernel.
    pub semidefinite: bool,
}

impl<T: Real> NormGram<T> {
    pub fn new(kind: GramKind, matrix: CsrMatrix<T>) -> Self {
        NormGram {
            kind,
            matrix,
            semidefinite: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `xᵀ G x`.
    pub fn quadratic(&self, x: &DVector<T>) -> T {
        let gx = &self.matrix * x;
        x.dot(&gx)
    }

    /// `xᵀ G y`.
    pub fn bilinear(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        let gy = &self.matrix * y;
        x.dot(&gy)
    }

    /// Sum of Grams of the same order.
    pub fn add(&self, other: &NormGram<T>) -> NormGram<T> {
        NormGram {
            kind: self.kind,
            matrix: &self.matrix + &other.matrix,
            semidefinite: self.semidefinite && other.semidefinite,
        }
    }

    pub fn scaled(&self, s: T) -> NormGram<T> {
        NormGram {
            kind: self.kind,
            matrix: &self.matrix * s,
            semidefinite: self.semidefinite,
        }
    }

    /// Largest relative asymmetry `max |G_ij − G_ji| / max |G_ij|`.
    pub fn asymmetry(&self) -> T {
        let dense = nalgebra::DMatrix::from(&self.matrix);
        let scale = dense.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let diff = (&dense - dense.transpose()).iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if scale > T::zero() {
            diff / scale
        } else {
            T::zero()
        }
    }
}
