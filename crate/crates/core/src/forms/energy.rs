use nalgebra::Vector2;

use crate::dg::{DgSpace, FieldLayout, FieldSample, Jet};
use crate::geometry::{Chart, GeometryError, GeometryPoint};
use crate::mesh::BoundaryPartition;
use crate::scalar::{lit, Real};

use super::assembly::{element_dofs, field_row, merge, par_blocks, Block, LocalGram};
use super::norms::{element_norm_blocks, jump_blocks, FieldOrder, JumpSpec};
use super::strains::StrainState;
use super::{EnergyKind, FSpec, FormsError, GramKind, NormGram, SeminormModel};

/// Contravariant components `ñ^α` of the unit outward conormal of the
/// physical boundary, from the parameter-plane outward normal `ν`.
pub fn boundary_conormal<T: Real>(gp: &GeometryPoint<T>, nu: &Vector2<T>) -> [T; 2] {
    let up = gp.a_upper * nu;
    let norm = nu.dot(&up).sqrt();
    [up.x / norm, up.y / norm]
}

fn required_layout(kind: EnergyKind) -> FieldLayout {
    match kind {
        EnergyKind::Naghdi => FieldLayout::Naghdi,
        EnergyKind::Koiter | EnergyKind::KoiterBar => FieldLayout::Koiter,
        EnergyKind::Plane | EnergyKind::PlaneBrenner => FieldLayout::Plane,
    }
}

/// Strain components `(row weight, extractor)` entering the energy.
fn strain_rows<T: Real>(kind: EnergyKind) -> Vec<(T, fn(&StrainState<T>) -> T)> {
    let one = T::one();
    let two = lit::<T>(2.0);
    let mut rows: Vec<(T, fn(&StrainState<T>) -> T)> = Vec::new();
    match kind {
        EnergyKind::Naghdi => {
            rows.push((one, |s| s.rho[(0, 0)]));
            rows.push((one, |s| s.rho[(1, 1)]));
            rows.push((two, |s| s.rho[(0, 1)]));
        }
        EnergyKind::Koiter | EnergyKind::KoiterBar => {
            rows.push((one, |s| s.rho_k[(0, 0)]));
            rows.push((one, |s| s.rho_k[(1, 1)]));
            rows.push((two, |s| s.rho_k[(0, 1)]));
        }
        EnergyKind::Plane | EnergyKind::PlaneBrenner => {}
    }
    rows.push((one, |s| s.gamma_m[(0, 0)]));
    rows.push((one, |s| s.gamma_m[(1, 1)]));
    rows.push((two, |s| s.gamma_m[(0, 1)]));
    if kind == EnergyKind::Naghdi {
        rows.push((one, |s| s.tau.x));
        rows.push((one, |s| s.tau.y));
    }
    rows
}

/// Strains of every local basis dof at an element quadrature point.
pub(crate) fn dof_strains<T: Real>(
    space: &DgSpace<T>,
    gp: &GeometryPoint<T>,
    jets: &[Jet<T>],
) -> Vec<StrainState<T>> {
    let nb = space.basis_len();
    (0..space.num_fields())
        .flat_map(|f| {
            (0..nb).map(move |i| {
                StrainState::evaluate(gp, &FieldSample::single(space.layout, f, jets[i]))
            })
        })
        .collect()
}

fn strain_blocks<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    kind: EnergyKind,
) -> Result<Vec<Block<T>>, GeometryError> {
    let rows = strain_rows::<T>(kind);
    let n = space.element_dofs();
    par_blocks(space.mesh.num_triangles(), |t| {
        let table = space.element_table(t);
        let mut g = LocalGram::new(n);
        for (q, x) in table.points.iter().enumerate() {
            let gp = GeometryPoint::new(chart, x)?;
            let strains = dof_strains(space, &gp, table.basis.at(q));
            for (weight, get) in &rows {
                let row: Vec<T> = strains.iter().map(get).collect();
                g.add_row(table.weights[q] * *weight, &row);
            }
        }
        Ok(Some(g.into_block(element_dofs(space, t))))
    })
}

/// Discrete energy Gram, optionally with a boundary seminorm.
pub fn assemble_energy_gram<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    kind: EnergyKind,
    partition: &BoundaryPartition<T>,
    f: FSpec,
) -> Result<NormGram<T>, FormsError> {
    if space.layout != required_layout(kind) {
        return Err(FormsError::Layout {
            kind: GramKind::Energy(kind),
            layout: space.layout,
        });
    }
    let mut blocks = strain_blocks(space, chart, kind)?;
    let nf = space.num_fields();
    let jumps: Vec<JumpSpec> = (0..nf)
        .map(|field| match kind {
            EnergyKind::Koiter if Some(field) == space.layout.w() => JumpSpec::ValueGradient,
            EnergyKind::KoiterBar if Some(field) == space.layout.w() => JumpSpec::NormalCubic,
            _ => JumpSpec::Value,
        })
        .collect();
    blocks.extend(jump_blocks(space, &jumps));
    if kind == EnergyKind::PlaneBrenner {
        let all: Vec<usize> = (0..space.mesh.num_triangles()).collect();
        blocks.extend(element_norm_blocks(space, &vec![FieldOrder::L2; nf], &all));
    }
    let semidefinite = match f {
        FSpec::None => {
            if kind != EnergyKind::PlaneBrenner {
                log::warn!("energy Gram without boundary seminorm: rigid motions lie in its kernel");
            }
            kind != EnergyKind::PlaneBrenner
        }
        FSpec::Paper | FSpec::Nitsche => {
            let model = match kind {
                EnergyKind::Koiter | EnergyKind::KoiterBar => SeminormModel::Koiter,
                _ => SeminormModel::Naghdi,
            };
            blocks.extend(seminorm_blocks(space, chart, partition, model, f == FSpec::Nitsche)?);
            false
        }
    };
    Ok(NormGram {
        kind: GramKind::Energy(kind),
        matrix: merge(space.dof_count(), &blocks),
        semidefinite,
    })
}

pub(crate) fn seminorm_blocks<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    partition: &BoundaryPartition<T>,
    model: SeminormModel,
    nitsche: bool,
) -> Result<Vec<Block<T>>, GeometryError> {
    let mesh = &space.mesh;
    let layout = space.layout;
    let n = space.element_dofs();
    let nb = space.basis_len();
    let supported = partition.supported();
    par_blocks(supported.len(), |k| {
        let e = supported[k];
        let edge = &mesh.edges[e];
        let clamped = partition.marker(e) == Some(crate::mesh::Marker::Dirichlet);
        let scale = if nitsche { T::one() / edge.length } else { T::one() };
        let table = space.edge_table(e);
        let (t, basis) = &table.sides[0];
        let mut g = LocalGram::new(n);
        for q in 0..table.points.len() {
            let w = table.weights[q] * scale;
            let jets = basis.at(q);
            let value_row = |f: usize| field_row(n, nb, 0, f, |i| jets[i].value);
            if clamped && model == SeminormModel::Naghdi {
                for f in layout.theta().into_iter().flatten() {
                    g.add_row(w, &value_row(f));
                }
            }
            for f in layout.u().into_iter().flatten().chain(layout.w()) {
                g.add_row(w, &value_row(f));
            }
            if clamped && model == SeminormModel::Koiter {
                if let Some(f) = layout.w() {
                    let gp = GeometryPoint::new(chart, &table.points[q])?;
                    let nt = boundary_conormal(&gp, &edge.normal);
                    g.add_row(
                        w,
                        &field_row(n, nb, 0, f, |i| nt[0] * jets[i].grad[0] + nt[1] * jets[i].grad[1]),
                    );
                }
            }
        }
        Ok(Some(g.into_block(element_dofs(space, *t))))
    })
}

/// Gram of `f²` for the example seminorms.
pub fn assemble_f_seminorm<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    partition: &BoundaryPartition<T>,
    model: SeminormModel,
    nitsche: bool,
) -> Result<NormGram<T>, FormsError> {
    let blocks = seminorm_blocks(space, chart, partition, model, nitsche)?;
    Ok(NormGram::new(
        GramKind::Seminorm(model),
        merge(space.dof_count(), &blocks),
    ))
}

/// Squared energy contributions of one discrete function, summed directly
/// from pointwise strains and traces.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyParts<T> {
    /// `‖ρ‖²` (Naghdi) or `‖ρ^K‖²` (Koiter).
    pub bending: T,
    pub membrane: T,
    pub shear: T,
    /// Interior jump terms with the kind's edge weights.
    pub jumps: T,
}

impl<T: Real> EnergyParts<T> {
    pub fn total(&self) -> T {
        self.bending + self.membrane + self.shear + self.jumps
    }

    /// `(‖ρ‖² + ‖γ‖² + ‖τ‖²)^{1/2}` without the jump terms.
    pub fn strain_norm(&self) -> T {
        (self.bending + self.membrane + self.shear).sqrt()
    }
}

/// Matrix-free evaluation of the energy quadratic form at `coeffs`,
/// excluding the boundary seminorm and the `L²` term of
/// [`EnergyKind::PlaneBrenner`]. Summing squares avoids the cancellation
/// that limits `xᵀGx` to roughly `ε_mach·‖G‖·‖x‖²`.
pub fn evaluate_energy<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    kind: EnergyKind,
    coeffs: &nalgebra::DVector<T>,
) -> Result<EnergyParts<T>, FormsError> {
    if space.layout != required_layout(kind) {
        return Err(FormsError::Layout {
            kind: GramKind::Energy(kind),
            layout: space.layout,
        });
    }
    let two = lit::<T>(2.0);
    let sq = |m: &nalgebra::Matrix2<T>| m[(0, 0)].powi(2) + m[(1, 1)].powi(2) + two * m[(0, 1)].powi(2);
    let mut parts = EnergyParts {
        bending: T::zero(),
        membrane: T::zero(),
        shear: T::zero(),
        jumps: T::zero(),
    };
    for t in 0..space.mesh.num_triangles() {
        let table = space.element_table(t);
        for (q, x) in table.points.iter().enumerate() {
            let gp = GeometryPoint::new(chart, x)?;
            let s = space.sample_from_jets(coeffs, t, table.basis.at(q));
            let st = StrainState::evaluate(&gp, &s);
            let w = table.weights[q];
            match kind {
                EnergyKind::Naghdi => {
                    parts.bending += w * sq(&st.rho);
                    parts.shear += w * st.tau.norm_squared();
                }
                EnergyKind::Koiter | EnergyKind::KoiterBar => parts.bending += w * sq(&st.rho_k),
                EnergyKind::Plane | EnergyKind::PlaneBrenner => {}
            }
            parts.membrane += w * sq(&st.gamma_m);
        }
    }
    let w_field = space.layout.w();
    for &e in &space.mesh.interior_edges {
        let edge = &space.mesh.edges[e];
        let table = space.edge_table(e);
        let hinv = T::one() / edge.length;
        let (t1, b1) = &table.sides[0];
        let (t2, b2) = &table.sides[1];
        for q in 0..table.points.len() {
            let s1 = space.sample_from_jets(coeffs, *t1, b1.at(q));
            let s2 = space.sample_from_jets(coeffs, *t2, b2.at(q));
            let w = table.weights[q];
            for f in 0..space.num_fields() {
                let (a, b) = (&s1.jets[f], &s2.jets[f]);
                let dv = a.value - b.value;
                let dg = [a.grad[0] - b.grad[0], a.grad[1] - b.grad[1]];
                let term = match kind {
                    EnergyKind::Koiter if Some(f) == w_field => {
                        hinv * (dv * dv + dg[0] * dg[0] + dg[1] * dg[1])
                    }
                    EnergyKind::KoiterBar if Some(f) == w_field => {
                        let dn = dg[0] * edge.normal.x + dg[1] * edge.normal.y;
                        hinv * dn * dn + hinv * hinv * hinv * dv * dv
                    }
                    _ => hinv * dv * dv,
                };
                parts.jumps += w * term;
            }
        }
    }
    Ok(parts)
}
