use std::time::Instant;

use nalgebra::DMatrix;

use crate::dg::{DgSpace, FieldLayout};
use crate::eigen::{max_eig, Pencil};
use crate::forms::{assemble_norm_gram, assemble_strip_gram, assemble_trace_gram, NormKind};
use crate::mesh::{Line, Mesh};
use crate::scalar::{lit, to_f64, Real};

use super::korn::mesh_stats;
use super::report::{StudyRow, StudyTable};
use super::{ExperimentError, StudySpec};

fn base_row<T: Real>(mesh: &Mesh<T>, level: usize, dofs: usize) -> Result<StudyRow, ExperimentError> {
    let (max_h, kappa, quasi_uniformity) = mesh_stats(mesh)?;
    Ok(StudyRow {
        level,
        param: None,
        dofs,
        max_h,
        kappa,
        quasi_uniformity,
        value: f64::NAN,
        aux: None,
        flag: String::new(),
        wall_time: 0.0,
    })
}

fn validate(spec: &StudySpec) -> Result<(), ExperimentError> {
    if spec.levels == 0 {
        return Err(ExperimentError::Invalid("levels must be at least 1".into()));
    }
    if !(1..=6).contains(&spec.degree) {
        return Err(ExperimentError::Invalid(format!("degree {} outside 1..=6", spec.degree)));
    }
    Ok(())
}

/// Global trace constant `C_tr = λ_max(‖·‖²_{0,∂Ω}, ‖·‖²_{H¹_h})^{1/2}` of
/// the scalar space per level. `aux` holds the ratio `‖1‖_{0,∂Ω}/‖1‖_{H¹_h}`.
pub fn trace_constant_study(spec: &StudySpec) -> Result<StudyTable, ExperimentError> {
    validate(spec)?;
    let mut table = StudyTable::new(
        &format!("trace constant: k={}", spec.degree),
        "trace_constant",
        "param",
        "constant_function_ratio",
    );
    for level in 1..=spec.levels {
        let start = Instant::now();
        let mesh = spec.family.mesh::<f64>(level)?;
        let space = DgSpace::new(mesh, spec.degree, FieldLayout::Scalar);
        let mut row = base_row(&space.mesh, level, space.dof_count())?;
        let trace = assemble_trace_gram(&space);
        let h = assemble_norm_gram(&space, NormKind::H);
        let ones = space.interpolate(|_| vec![1.0]);
        row.aux = Some((trace.quadratic(&ones) / h.quadratic(&ones)).sqrt());
        match Pencil::from_grams(&trace, &h).and_then(|p| max_eig(&p, &spec.eigen)) {
            Ok(r) => row.value = r.value.sqrt(),
            Err(e) => row.flag = format!("error: {e}"),
        }
        row.wall_time = start.elapsed().as_secs_f64();
        table.rows.push(row);
    }
    Ok(table)
}

/// Strip ratio `R(δ) = λ_max(‖·‖²_{0,Ω_δ}, ‖·‖²_{H¹_h})` for every level and
/// width. `value` is `R(δ)/δ`, `aux` is `R(δ)`; rows with `δ` below the
/// shortest edge are flagged.
pub fn strip_constant_study(spec: &StudySpec, deltas: &[f64]) -> Result<StudyTable, ExperimentError> {
    validate(spec)?;
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0)) {
        return Err(ExperimentError::Invalid(format!("strip width {d} must be positive")));
    }
    let mut table = StudyTable::new(
        &format!("strip constant: k={}", spec.degree),
        "strip_ratio_over_delta",
        "delta",
        "strip_ratio",
    );
    for level in 1..=spec.levels {
        let mesh = spec.family.mesh::<f64>(level)?;
        let space = DgSpace::new(mesh, spec.degree, FieldLayout::Scalar);
        let h = assemble_norm_gram(&space, NormKind::H);
        let shortest = space.mesh.min_edge_length();
        for &delta in deltas {
            let start = Instant::now();
            let mut row = base_row(&space.mesh, level, space.dof_count())?;
            row.param = Some(delta);
            let strip = space.mesh.boundary_strip_elements(delta);
            if delta < shortest * (1.0 - 1e-12) {
                row.flag = "strip thinner than one element layer".into();
            } else if strip.covers_domain {
                row.flag = "strip covers the domain".into();
            }
            let g = assemble_strip_gram(&space, &strip);
            match Pencil::from_grams(&g, &h).and_then(|p| max_eig(&p, &spec.eigen)) {
                Ok(r) => {
                    row.aux = Some(r.value);
                    row.value = r.value / delta;
                }
                Err(e) => row.flag = format!("error: {e}"),
            }
            row.wall_time = start.elapsed().as_secs_f64();
            table.rows.push(row);
        }
    }
    Ok(table)
}

/// `(A, B)` with `xᵀAx = ∫_e⟦∂_s w⟧²` and `xᵀBx = ∫_e⟦w⟧²` over the
/// basis coefficients of one field on both adjacent elements (side 1 first).
pub fn edge_inverse_pencil<T: Real>(space: &DgSpace<T>, edge: usize) -> Result<(DMatrix<T>, DMatrix<T>), ExperimentError> {
    let e = &space.mesh.edges[edge];
    if e.is_boundary() {
        return Err(ExperimentError::Invalid(format!("edge {edge} is a boundary edge")));
    }
    let nb = space.basis_len();
    let table = space.edge_table(edge);
    let mut a = DMatrix::zeros(2 * nb, 2 * nb);
    let mut b = DMatrix::zeros(2 * nb, 2 * nb);
    let (t1, t2) = (&table.sides[0].1, &table.sides[1].1);
    for q in 0..table.points.len() {
        let wq = table.weights[q];
        let mut value = vec![T::zero(); 2 * nb];
        let mut ds = vec![T::zero(); 2 * nb];
        for i in 0..nb {
            let (j1, j2) = (&t1.at(q)[i], &t2.at(q)[i]);
            value[i] = j1.value;
            value[nb + i] = -j2.value;
            ds[i] = j1.grad[0] * e.tangent.x + j1.grad[1] * e.tangent.y;
            ds[nb + i] = -(j2.grad[0] * e.tangent.x + j2.grad[1] * e.tangent.y);
        }
        for i in 0..2 * nb {
            for j in 0..2 * nb {
                a[(i, j)] += wq * ds[i] * ds[j];
                b[(i, j)] += wq * value[i] * value[j];
            }
        }
    }
    Ok((a, b))
}

/// Largest `∫_e⟦∂_s w⟧² / ∫_e⟦w⟧²` over jumps that do not vanish. Functions
/// with `⟦w⟧ = 0` on `e` also have `⟦∂_s w⟧ = 0`, so the pencil is solved
/// on the range of `B`.
pub fn edge_inverse_ratio<T: Real>(space: &DgSpace<T>, edge: usize) -> Result<T, ExperimentError> {
    let (a, b) = edge_inverse_pencil(space, edge)?;
    let eig = b.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(T::zero(), |m, v| m.max(*v));
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > lit::<T>(1e-12) * top)
        .collect();
    if keep.is_empty() {
        return Ok(T::zero());
    }
    let v = DMatrix::from_fn(a.nrows(), keep.len(), |r, c| {
        eig.eigenvectors[(r, keep[c])] / eig.eigenvalues[keep[c]].sqrt()
    });
    let reduced = v.transpose() * a * &v;
    let reduced = (&reduced + reduced.transpose()) * lit::<T>(0.5);
    Ok(reduced.symmetric_eigenvalues().iter().fold(T::zero(), |m, x| m.max(*x)))
}

/// Per level, the largest and smallest `r_e·h_e²` over interior edges,
/// where `r_e` is [`edge_inverse_ratio`]. `value` is the maximum, `aux` the
/// minimum and `param` the degree.
pub fn inverse_inequality_study(spec: &StudySpec) -> Result<StudyTable, ExperimentError> {
    validate(spec)?;
    if spec.degree > 4 {
        return Err(ExperimentError::Invalid(format!(
            "inverse inequality study supports degrees up to 4, got {}",
            spec.degree
        )));
    }
    let mut table = StudyTable::new(
        &format!("inverse inequality: k={}", spec.degree),
        "max_ratio_h2",
        "degree",
        "min_ratio_h2",
    );
    for level in 1..=spec.levels {
        let start = Instant::now();
        let mesh = spec.family.mesh::<f64>(level)?;
        let space = DgSpace::new(mesh, spec.degree, FieldLayout::Scalar);
        let mut row = base_row(&space.mesh, level, space.dof_count())?;
        row.param = Some(spec.degree as f64);
        let mut scaled = Vec::with_capacity(space.mesh.interior_edges.len());
        for &e in &space.mesh.interior_edges {
            let h = space.mesh.edges[e].length;
            scaled.push(edge_inverse_ratio(&space, e)? * h * h);
        }
        if scaled.is_empty() {
            row.flag = "no interior edges".into();
        } else {
            row.value = scaled.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
            row.aux = Some(scaled.iter().fold(f64::INFINITY, |m, v| m.min(*v)));
        }
        row.wall_time = start.elapsed().as_secs_f64();
        table.rows.push(row);
    }
    Ok(table)
}

/// Sum of the lengths of edges cut by the horizontal line `y = 1/2`.
pub fn line_cut_study(spec: &StudySpec) -> Result<StudyTable, ExperimentError> {
    validate(spec)?;
    let mut table = StudyTable::new("line cut y=1/2", "cut_edge_length_sum", "param", "aux");
    let line = Line::horizontal(0.5);
    for level in 1..=spec.levels {
        let start = Instant::now();
        let mesh = spec.family.mesh::<f64>(level)?;
        let mut row = base_row(&mesh, level, 0)?;
        row.value = to_f64(mesh.line_cut_edge_sum(&line));
        row.wall_time = start.elapsed().as_secs_f64();
        table.rows.push(row);
    }
    Ok(table)
}
