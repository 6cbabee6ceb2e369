use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CscMatrix, CsrMatrix};

use crate::dg::DgSpace;
use crate::eigen::{korn_from_pencil, Pencil};
use crate::forms::{assemble_naghdi_model, assemble_norm_gram, LoadData, NormKind};
use crate::mesh::BoundaryPartition;

use super::{ExperimentError, ModelKind, StudySpec};

/// Outcome of a Naghdi model solve on the finest level of a study.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub level: usize,
    pub dofs: usize,
    pub solution: DVector<f64>,
    /// `xᵀKx`.
    pub energy: f64,
    pub h_norm: f64,
    /// `‖Kx − b‖ / ‖b‖` (absolute when `b = 0`).
    pub residual: f64,
    /// `‖x(2b) − 2x(b)‖ / ‖2x(b)‖` (absolute when `x = 0`).
    pub linearity_error: f64,
    /// Smallest eigenvalue of the model matrix against the `H_h` Gram.
    pub lambda_min: f64,
    /// `‖b‖_{H*} = (bᵀH⁻¹b)^{1/2}`.
    pub data_norm: f64,
    /// `‖b‖_{H*} / λ_min`, which bounds `‖x‖_{H_h}` because
    /// `λ_min‖x‖²_H ≤ xᵀKx = bᵀx ≤ ‖b‖_{H*}‖x‖_H`.
    pub stability_bound: f64,
}

impl SolveReport {
    pub fn stable(&self) -> bool {
        self.h_norm <= self.stability_bound * (1.0 + 1e-10) + 1e-300
    }
}

fn factor(m: &CsrMatrix<f64>) -> Option<CscCholesky<f64>> {
    CscCholesky::factor(&CscMatrix::from(m)).ok()
}

fn solve_with(f: &CscCholesky<f64>, b: &DVector<f64>) -> DVector<f64> {
    let x = f.solve(&DMatrix::from_column_slice(b.len(), 1, b.as_slice()));
    DVector::from_column_slice(x.as_slice())
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Assembles and solves the Naghdi model on level `spec.levels`.
pub fn solve_naghdi(spec: &StudySpec, loads: &LoadData<f64>) -> Result<SolveReport, ExperimentError> {
    spec.validate()?;
    if spec.model != ModelKind::Naghdi {
        return Err(ExperimentError::Invalid(format!("solve needs the naghdi model, got {}", spec.model)));
    }
    let level = spec.levels;
    let mesh = spec.family.mesh::<f64>(level)?;
    let chart = spec.chart.build::<f64>();
    let partition = BoundaryPartition::new(&mesh, &spec.boundary);
    let space = DgSpace::new(mesh, spec.degree, spec.model.layout());
    let system = assemble_naghdi_model(&space, &*chart, &spec.params, &partition, loads)?;
    let h = assemble_norm_gram(&space, NormKind::H);

    let korn = korn_from_pencil(&Pencil::new(system.matrix.clone(), h.matrix.clone())?, &spec.eigen)?;
    let lambda_min = korn.lambda_min;
    if korn.is_infinite() {
        return Err(ExperimentError::Singular { min_eig: lambda_min });
    }
    let k = factor(&system.matrix).ok_or(ExperimentError::Singular { min_eig: lambda_min })?;
    let x = solve_with(&k, &system.rhs);
    let b_norm = system.rhs.norm();
    let residual = relative((&system.matrix * &x - &system.rhs).norm(), b_norm);
    if !residual.is_finite() {
        return Err(ExperimentError::Singular { min_eig: lambda_min });
    }

    let doubled = assemble_naghdi_model(&space, &*chart, &spec.params, &partition, &loads.scaled(2.0))?;
    let x2 = solve_with(&k, &doubled.rhs);
    let linearity_error = relative((&x2 - &x * 2.0).norm(), 2.0 * x.norm());

    let hf = factor(&h.matrix).ok_or(ExperimentError::Eigen(crate::eigen::EigenError::NotDefinite('H')))?;
    let data_norm = system.rhs.dot(&solve_with(&hf, &system.rhs)).max(0.0).sqrt();
    let energy = x.dot(&(&system.matrix * &x));
    let h_norm = h.quadratic(&x).max(0.0).sqrt();
    Ok(SolveReport {
        level,
        dofs: space.dof_count(),
        solution: x,
        energy,
        h_norm,
        residual,
        linearity_error,
        lambda_min,
        data_norm,
        stability_bound: data_norm / lambda_min,
    })
}
