//! Plane linear elasticity assembled from displacement gradients directly.

use crate::dg::{DgSpace, FieldLayout};
use crate::mesh::BoundaryPartition;
use crate::scalar::{lit, Real};

use super::assembly::{element_dofs, merge, par_collect, Block, LocalGram};
use super::{EnergyKind, FSpec, FormsError, GramKind, NormGram};

/// Gram of `‖e(u)‖² + Σ h⁻¹‖⟦u⟧‖²` on a [`FieldLayout::Plane`] space, plus
/// the boundary seminorm `f` and, when `brenner` is set, `‖u‖²₀`.
pub fn assemble_plane_elasticity<T: Real>(
    space: &DgSpace<T>,
    partition: &BoundaryPartition<T>,
    f: FSpec,
    brenner: bool,
) -> Result<NormGram<T>, FormsError> {
    let kind = if brenner {
        EnergyKind::PlaneBrenner
    } else {
        EnergyKind::Plane
    };
    if space.layout != FieldLayout::Plane {
        return Err(FormsError::Layout {
            kind: GramKind::Energy(kind),
            layout: space.layout,
        });
    }
    let mesh = &space.mesh;
    let nb = space.basis_len();
    let n = 2 * nb;
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);

    let mut blocks: Vec<Block<T>> = par_collect(mesh.num_triangles(), |t| {
        let table = space.element_table(t);
        let mut g = LocalGram::new(n);
        for q in 0..table.points.len() {
            let w = table.weights[q];
            let jets = table.basis.at(q);
            let mut e11 = vec![T::zero(); n];
            let mut e22 = vec![T::zero(); n];
            let mut e12 = vec![T::zero(); n];
            for i in 0..nb {
                let d = jets[i].grad;
                e11[i] = d[0];
                e22[nb + i] = d[1];
                e12[i] = half * d[1];
                e12[nb + i] = half * d[0];
            }
            g.add_row(w, &e11);
            g.add_row(w, &e22);
            g.add_row(w * two, &e12);
            if brenner {
                for c in 0..2 {
                    let mut row = vec![T::zero(); n];
                    for i in 0..nb {
                        row[c * nb + i] = jets[i].value;
                    }
                    g.add_row(w, &row);
                }
            }
        }
        g.into_block(element_dofs(space, t))
    });

    blocks.extend(par_collect(mesh.interior_edges.len(), |k| {
        let e = mesh.interior_edges[k];
        let table = space.edge_table(e);
        let hinv = T::one() / mesh.edges[e].length;
        let mut g = LocalGram::new(2 * n);
        for q in 0..table.points.len() {
            let a = table.sides[0].1.at(q);
            let b = table.sides[1].1.at(q);
            for c in 0..2 {
                let mut row = vec![T::zero(); 2 * n];
                for i in 0..nb {
                    row[c * nb + i] = a[i].value;
                    row[n + c * nb + i] = -b[i].value;
                }
                g.add_row(table.weights[q] * hinv, &row);
            }
        }
        let mut dofs = element_dofs(space, table.sides[0].0);
        dofs.extend(element_dofs(space, table.sides[1].0));
        g.into_block(dofs)
    }));

    if f != FSpec::None {
        let supported = partition.supported();
        blocks.extend(par_collect(supported.len(), |k| {
            let e = supported[k];
            let table = space.edge_table(e);
            let scale = if f == FSpec::Nitsche {
                T::one() / mesh.edges[e].length
            } else {
                T::one()
            };
            let (t, basis) = &table.sides[0];
            let mut g = LocalGram::new(n);
            for q in 0..table.points.len() {
                let jets = basis.at(q);
                for c in 0..2 {
                    let mut row = vec![T::zero(); n];
                    for i in 0..nb {
                        row[c * nb + i] = jets[i].value;
                    }
                    g.add_row(table.weights[q] * scale, &row);
                }
            }
            g.into_block(element_dofs(space, *t))
        }));
    }

    Ok(NormGram {
        kind: GramKind::Energy(kind),
        matrix: merge(space.dof_count(), &blocks),
        semidefinite: f == FSpec::None && !brenner,
    })
}
