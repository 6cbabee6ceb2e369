//! Studies built on the assembled Grams: Korn-constant sweeps, the
//! auxiliary trace/strip/inverse/line-cut constants, rigid-motion checks
//! and the Naghdi model solve.

mod auxiliary;
mod geometry_check;
mod korn;
mod report;
mod rigid;
mod solve;


use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::dg::FieldLayout;
use crate::eigen::{EigenError, EigenOptions};
use crate::forms::{EnergyKind, FSpec, FormsError, ModelParams, NormKind};
use crate::geometry::{ChartSpec, GeometryError};
use crate::mesh::{read_mesh_files, BoundarySpec, Domain, Grading, Mesh, MeshError};
use crate::scalar::Real;

pub use auxiliary::{
    edge_inverse_pencil, edge_inverse_ratio, inverse_inequality_study, line_cut_study,
    strip_constant_study, trace_constant_study,
};
pub use geometry_check::{geometry_check, GeometryCheck, GeometryCheckRow};
pub use korn::{korn_level, korn_study, regularity_degradation_study, KornLevel};
pub use report::{format_value, line_plot_svg, StudyRow, StudyTable};
pub use rigid::{
    rigid_motion_check, rigid_motion_max_strain, rigid_motion_sample, rigid_motion_seminorm, RigidMotionReport,
};
pub use solve::{solve_naghdi, SolveReport};

/// Default seed of every randomized study.
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Invalid(String),
    #[error("model matrix is singular (minimal eigenvalue {min_eig:e}); add clamped edges")]
    Singular { min_eig: f64 },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// Numerical failure as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ExperimentError::Eigen(EigenError::NoConvergence { .. } | EigenError::NotDefinite(_))
                | ExperimentError::Singular { .. }
        )
    }
}

/// Shell model variant of a Korn study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Naghdi,
    Koiter,
    /// Koiter with the `h⁻³` jump of `w`.
    KoiterH3,
    PlaneElasticity,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Naghdi,
        ModelKind::Koiter,
        ModelKind::KoiterH3,
        ModelKind::PlaneElasticity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Naghdi => "naghdi",
            ModelKind::Koiter => "koiter",
            ModelKind::KoiterH3 => "koiter-h3",
            ModelKind::PlaneElasticity => "plane",
        }
    }

    pub fn layout(self) -> FieldLayout {
        match self {
            ModelKind::Naghdi => FieldLayout::Naghdi,
            ModelKind::Koiter | ModelKind::KoiterH3 => FieldLayout::Koiter,
            ModelKind::PlaneElasticity => FieldLayout::Plane,
        }
    }

    pub fn energy(self) -> EnergyKind {
        match self {
            ModelKind::Naghdi => EnergyKind::Naghdi,
            ModelKind::Koiter => EnergyKind::Koiter,
            ModelKind::KoiterH3 => EnergyKind::KoiterBar,
            ModelKind::PlaneElasticity => EnergyKind::Plane,
        }
    }

    pub fn norm(self) -> NormKind {
        match self {
            ModelKind::Naghdi | ModelKind::PlaneElasticity => NormKind::H,
            ModelKind::Koiter => NormKind::HK,
            ModelKind::KoiterH3 => NormKind::HKBar,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| ExperimentError::Invalid(format!("unknown model `{s}` (naghdi|koiter|koiter-h3|plane)")))
    }
}

pub fn parse_fspec(s: &str) -> Result<FSpec, ExperimentError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "paper" => Ok(FSpec::Paper),
        "nitsche" => Ok(FSpec::Nitsche),
        "none" => Ok(FSpec::None),
        other => Err(ExperimentError::Invalid(format!("unknown f-seminorm `{other}` (paper|nitsche|none)"))),
    }
}

pub fn fspec_name(f: FSpec) -> &'static str {
    match f {
        FSpec::Paper => "paper",
        FSpec::Nitsche => "nitsche",
        FSpec::None => "none",
    }
}

/// Sequence of meshes indexed by level `1, 2, …`.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshFamily {
    /// `base·2^{ℓ−1}` cells per unit length, optionally graded towards the
    /// origin. Without grading, level `ℓ+1` is the red refinement of level `ℓ`.
    Structured {
        domain: Domain,
        base: usize,
        grading: Grading,
    },
    /// Triangle-format files `<stem>.node/.ele[/.edge]`, red-refined per level.
    File(PathBuf),
}

impl MeshFamily {
    pub fn mesh<T: Real>(&self, level: usize) -> Result<Mesh<T>, ExperimentError> {
        if level == 0 {
            return Err(ExperimentError::Invalid("levels are numbered from 1".into()));
        }
        match self {
            MeshFamily::Structured { domain, base, grading } => {
                if *base == 0 {
                    return Err(ExperimentError::Invalid("base subdivision must be positive".into()));
                }
                Ok(Mesh::structured(base << (level - 1), *domain, *grading))
            }
            MeshFamily::File(stem) => {
                let mut mesh = read_mesh_files(stem)?;
                for _ in 1..level {
                    mesh = mesh.refine_red();
                }
                Ok(mesh)
            }
        }
    }
}

/// Everything that determines a study.
#[derive(Clone, Debug)]
pub struct StudySpec {
    pub chart: ChartSpec,
    pub model: ModelKind,
    pub family: MeshFamily,
    pub levels: usize,
    pub degree: usize,
    pub boundary: BoundarySpec,
    pub f: FSpec,
    pub params: ModelParams,
    pub seed: u64,
    pub eigen: EigenOptions,
    /// Directory receiving the pencil matrices of every level.
    pub dump_matrices: Option<PathBuf>,
}

impl Default for StudySpec {
    fn default() -> Self {
        StudySpec {
            chart: ChartSpec::Flat,
            model: ModelKind::Naghdi,
            family: MeshFamily::Structured {
                domain: Domain::UnitSquare,
                base: 1,
                grading: Grading::None,
            },
            levels: 4,
            degree: 1,
            boundary: BoundarySpec::Uniform(crate::mesh::Marker::Dirichlet),
            f: FSpec::Nitsche,
            params: ModelParams::default(),
            seed: DEFAULT_SEED,
            eigen: EigenOptions::default(),
            dump_matrices: None,
        }
    }
}

impl StudySpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.levels == 0 {
            return Err(ExperimentError::Invalid("levels must be at least 1".into()));
        }
        if !(1..=6).contains(&self.degree) {
            return Err(ExperimentError::Invalid(format!("degree {} outside 1..=6", self.degree)));
        }
        self.params.validate()?;
        Ok(())
    }
}
