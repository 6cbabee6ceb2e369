use crate::dg::{DgSpace, FieldLayout, Jet};
use crate::mesh::Strip;
use crate::scalar::{lit, Real};

use super::assembly::{element_dofs, field_row, merge, par_collect, Block, LocalGram};
use super::{GramKind, NormGram, NormKind};

/// Element part of a field's norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum FieldOrder {
    None,
    L2,
    H1,
    H2,
}

/// Interior-edge part of a field's norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum JumpSpec {
    /// `h⁻¹⟦v⟧²`.
    Value,
    /// `h⁻¹(⟦v⟧² + Σ_α⟦∂_αv⟧²)`.
    ValueGradient,
    /// `h⁻¹⟦∂_nv⟧² + h⁻³⟦v⟧²`.
    NormalCubic,
}

pub(crate) fn norm_specs(layout: FieldLayout, kind: NormKind) -> Vec<(FieldOrder, JumpSpec)> {
    let w = layout.w();
    (0..layout.num_fields())
        .map(|f| match kind {
            NormKind::H => (FieldOrder::H1, JumpSpec::Value),
            NormKind::HK if Some(f) == w => (FieldOrder::H2, JumpSpec::ValueGradient),
            NormKind::HKBar if Some(f) == w => (FieldOrder::H2, JumpSpec::NormalCubic),
            NormKind::HK | NormKind::HKBar => (FieldOrder::H1, JumpSpec::Value),
        })
        .collect()
}

/// Element blocks of `Σ_f ‖v_f‖²_{order_f, τ}` restricted to `elements`.
pub(crate) fn element_norm_blocks<T: Real>(
    space: &DgSpace<T>,
    orders: &[FieldOrder],
    elements: &[usize],
) -> Vec<Block<T>> {
    let n = space.element_dofs();
    let nb = space.basis_len();
    let two = lit::<T>(2.0);
    par_collect(elements.len(), |k| {
        let t = elements[k];
        let table = space.element_table(t);
        let mut g = LocalGram::new(n);
        for q in 0..table.points.len() {
            let jets = table.basis.at(q);
            let w = table.weights[q];
            for (f, order) in orders.iter().enumerate() {
                let mut rows: Vec<(T, fn(&Jet<T>) -> T)> = Vec::new();
                if *order != FieldOrder::None {
                    rows.push((T::one(), |j| j.value));
                }
                if matches!(order, FieldOrder::H1 | FieldOrder::H2) {
                    rows.push((T::one(), |j| j.grad[0]));
                    rows.push((T::one(), |j| j.grad[1]));
                }
                if *order == FieldOrder::H2 {
                    rows.push((T::one(), |j| j.hess[0]));
                    rows.push((two, |j| j.hess[1]));
                    rows.push((T::one(), |j| j.hess[2]));
                }
                for (weight, get) in rows {
                    g.add_row(w * weight, &field_row(n, nb, 0, f, |i| get(&jets[i])));
                }
            }
        }
        g.into_block(element_dofs(space, t))
    })
}

/// Interior-edge jump blocks.
pub(crate) fn jump_blocks<T: Real>(space: &DgSpace<T>, specs: &[JumpSpec]) -> Vec<Block<T>> {
    let mesh = &space.mesh;
    let n = space.element_dofs();
    let nb = space.basis_len();
    let edges = &mesh.interior_edges;
    par_collect(edges.len(), |k| {
        let e = edges[k];
        let edge = &mesh.edges[e];
        let table = space.edge_table(e);
        let h = edge.length;
        let hinv = T::one() / h;
        let hinv3 = hinv * hinv * hinv;
        let normal = edge.normal;
        let mut g = LocalGram::new(2 * n);
        for q in 0..table.points.len() {
            let w = table.weights[q];
            let j1 = table.sides[0].1.at(q);
            let j2 = table.sides[1].1.at(q);
            let two_sided = |f: usize, get: &dyn Fn(&Jet<T>) -> T| {
                let mut row = field_row(2 * n, nb, 0, f, |i| get(&j1[i]));
                for i in 0..nb {
                    row[n + f * nb + i] = -get(&j2[i]);
                }
                row
            };
            for (f, spec) in specs.iter().enumerate() {
                match spec {
                    JumpSpec::Value => g.add_row(w * hinv, &two_sided(f, &|j| j.value)),
                    JumpSpec::ValueGradient => {
                        g.add_row(w * hinv, &two_sided(f, &|j| j.value));
                        g.add_row(w * hinv, &two_sided(f, &|j| j.grad[0]));
                        g.add_row(w * hinv, &two_sided(f, &|j| j.grad[1]));
                    }
                    JumpSpec::NormalCubic => {
                        g.add_row(
                            w * hinv,
                            &two_sided(f, &|j| j.grad[0] * normal.x + j.grad[1] * normal.y),
                        );
                        g.add_row(w * hinv3, &two_sided(f, &|j| j.value));
                    }
                }
            }
        }
        let mut dofs = element_dofs(space, table.sides[0].0);
        dofs.extend(element_dofs(space, table.sides[1].0));
        g.into_block(dofs)
    })
}

/// Gram of the interior-edge jump terms alone.
pub fn edge_jump_gram<T: Real>(space: &DgSpace<T>, kind: NormKind) -> NormGram<T> {
    let jumps: Vec<JumpSpec> = norm_specs(space.layout, kind).into_iter().map(|s| s.1).collect();
    NormGram::new(GramKind::Jump, merge(space.dof_count(), &jump_blocks(space, &jumps)))
}

pub fn assemble_norm_gram<T: Real>(space: &DgSpace<T>, kind: NormKind) -> NormGram<T> {
    let specs = norm_specs(space.layout, kind);
    let orders: Vec<FieldOrder> = specs.iter().map(|s| s.0).collect();
    let jumps: Vec<JumpSpec> = specs.iter().map(|s| s.1).collect();
    let all: Vec<usize> = (0..space.mesh.num_triangles()).collect();
    let mut blocks = element_norm_blocks(space, &orders, &all);
    blocks.extend(jump_blocks(space, &jumps));
    NormGram::new(GramKind::Norm(kind), merge(space.dof_count(), &blocks))
}

/// `Σ_f ‖v_f‖²_{0,Ω}`.
pub fn assemble_mass_gram<T: Real>(space: &DgSpace<T>) -> NormGram<T> {
    let orders = vec![FieldOrder::L2; space.num_fields()];
    let all: Vec<usize> = (0..space.mesh.num_triangles()).collect();
    let blocks = element_norm_blocks(space, &orders, &all);
    NormGram::new(GramKind::Mass, merge(space.dof_count(), &blocks))
}

/// `Σ_f ‖v_f‖²_{0,Ω_δ}` over the strip elements.
pub fn assemble_strip_gram<T: Real>(space: &DgSpace<T>, strip: &Strip<T>) -> NormGram<T> {
    let orders = vec![FieldOrder::L2; space.num_fields()];
    let blocks = element_norm_blocks(space, &orders, &strip.elements);
    NormGram::new(GramKind::Strip, merge(space.dof_count(), &blocks))
}

/// `Σ_f ‖v_f‖²_{0,∂Ω}` in parameter arc length.
pub fn assemble_trace_gram<T: Real>(space: &DgSpace<T>) -> NormGram<T> {
    let n = space.element_dofs();
    let nb = space.basis_len();
    let edges = &space.mesh.boundary_edges;
    let blocks = par_collect(edges.len(), |k| {
        let table = space.edge_table(edges[k]);
        let (t, jets) = &table.sides[0];
        let mut g = LocalGram::new(n);
        for q in 0..table.points.len() {
            let j = jets.at(q);
            for f in 0..space.num_fields() {
                g.add_row(table.weights[q], &field_row(n, nb, 0, f, |i| j[i].value));
            }
        }
        g.into_block(element_dofs(space, *t))
    });
    NormGram::new(
        GramKind::Trace,
        merge(space.dof_count(), &blocks),
    )
}
