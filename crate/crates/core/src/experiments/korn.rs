use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use crate::dg::DgSpace;
use crate::eigen::{korn_constant, KornReport};
use crate::forms::{assemble_energy_gram, assemble_norm_gram, evaluate_energy, write_matrix, NormGram};
use crate::mesh::{BoundaryPartition, Mesh, SplitPattern};
use crate::scalar::{to_f64, Real};

use super::report::{StudyRow, StudyTable};
use super::{ExperimentError, StudySpec};

/// Korn constant on one mesh.
#[derive(Clone, Debug)]
pub struct KornLevel<T: Real> {
    pub report: KornReport<T>,
    /// `(‖ρ‖² + ‖γ‖² + ‖τ‖²)^{1/2}` of the `H`-normalized extremal field,
    /// evaluated matrix-free. For a kernel this certifies a discrete rigid
    /// motion.
    pub field_strain: T,
    pub space: DgSpace<T>,
}

pub(crate) fn mesh_stats<T: Real>(mesh: &Mesh<T>) -> Result<(f64, f64, f64), ExperimentError> {
    let reg = mesh.shape_regularity()?;
    Ok((to_f64(mesh.max_h()), to_f64(reg.kappa), to_f64(reg.quasi_uniformity)))
}

fn dump_pencil<T: Real>(dir: &Path, stem: &str, e: &NormGram<T>, h: &NormGram<T>) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    for (suffix, g) in [("energy", e), ("norm", h)] {
        let mut out = BufWriter::new(File::create(dir.join(format!("{stem}_{suffix}.txt")))?);
        write_matrix(&mut out, &g.matrix)?;
    }
    Ok(())
}

/// Assembles the energy and norm Grams of `spec` on `mesh` and computes the
/// Korn constant. `dump` names the matrix files when
/// [`StudySpec::dump_matrices`] is set.
pub fn korn_level<T: Real>(spec: &StudySpec, mesh: Mesh<T>, dump: Option<&str>) -> Result<KornLevel<T>, ExperimentError> {
    let chart = spec.chart.build::<T>();
    let partition = BoundaryPartition::new(&mesh, &spec.boundary);
    let space = DgSpace::new(mesh, spec.degree, spec.model.layout());
    let e = assemble_energy_gram(&space, &*chart, spec.model.energy(), &partition, spec.f)?;
    let h = assemble_norm_gram(&space, spec.model.norm());
    if let (Some(dir), Some(stem)) = (&spec.dump_matrices, dump) {
        dump_pencil(dir, stem, &e, &h)?;
    }
    let report = korn_constant(&e, &h, &spec.eigen)?;
    let field_strain = evaluate_energy(&space, &*chart, spec.model.energy(), &report.field)?.strain_norm();
    Ok(KornLevel {
        report,
        field_strain,
        space,
    })
}

fn korn_row<T: Real>(
    spec: &StudySpec,
    mesh: Mesh<T>,
    level: usize,
    param: Option<f64>,
    dump: &str,
) -> Result<StudyRow, ExperimentError> {
    let start = Instant::now();
    let (max_h, kappa, quasi_uniformity) = mesh_stats(&mesh)?;
    let mut row = StudyRow {
        level,
        param,
        dofs: mesh.num_triangles() * spec.model.layout().num_fields() * (spec.degree + 1) * (spec.degree + 2) / 2,
        max_h,
        kappa,
        quasi_uniformity,
        value: f64::NAN,
        aux: None,
        flag: String::new(),
        wall_time: 0.0,
    };
    match korn_level(spec, mesh, Some(dump)) {
        Ok(k) => {
            row.value = to_f64(k.report.constant);
            row.aux = Some(to_f64(k.field_strain));
            if k.report.is_infinite() {
                row.flag = format!("kernel lambda_min={:e}", to_f64(k.report.lambda_min));
            }
        }
        Err(e) if e.is_numerical() => row.flag = format!("error: {e}"),
        Err(e) => return Err(e),
    }
    row.wall_time = start.elapsed().as_secs_f64();
    log::info!("level {level}: C = {} ({:.2}s)", row.value, row.wall_time);
    Ok(row)
}

fn korn_table(spec: &StudySpec, name: &str, param_label: &str) -> StudyTable {
    StudyTable::new(
        &format!("{name}: {} {} k={}", spec.chart.name(), spec.model, spec.degree),
        "korn_constant",
        param_label,
        "field_strain",
    )
}

/// Korn constant per refinement level. Numerical failures flag their row
/// and the sweep continues; invalid input aborts.
pub fn korn_study(spec: &StudySpec) -> Result<StudyTable, ExperimentError> {
    spec.validate()?;
    let mut table = korn_table(spec, "korn", "param");
    for level in 1..=spec.levels {
        let mesh = spec.family.mesh::<f64>(level)?;
        table.rows.push(korn_row(spec, mesh, level, None, &format!("korn_level{level}"))?);
    }
    Ok(table)
}

/// Korn constant on the criss-cross `n × round(n·s)` grid for each stretch
/// factor `s`. Cells of aspect ratio `s` make `𝒦` grow linearly in `s`.
pub fn regularity_degradation_study(spec: &StudySpec, n: usize, stretches: &[f64]) -> Result<StudyTable, ExperimentError> {
    spec.validate()?;
    if n == 0 {
        return Err(ExperimentError::Invalid("base subdivision must be positive".into()));
    }
    let mut table = korn_table(spec, "regularity", "stretch");
    for (i, &s) in stretches.iter().enumerate() {
        if !(s >= 1.0) {
            return Err(ExperimentError::Invalid(format!("stretch factor {s} below 1")));
        }
        let mesh = Mesh::<f64>::stretched(n, s, SplitPattern::CrissCross)?;
        table.rows.push(korn_row(spec, mesh, i + 1, Some(s), &format!("regularity_{}", i + 1))?);
    }
    Ok(table)
}
