//! Front end of the `shellkorn` binary: argument and config handling,
//! study dispatch and report output.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::Vector2;
use shellkorn::dg::DgSpace;
use shellkorn::eigen::EigenOptions;
use shellkorn::experiments::{self, format_value, line_plot_svg, ExperimentError, MeshFamily, StudySpec, StudyTable};
use shellkorn::forms::{LoadData, ModelParams};
use shellkorn::geometry::ChartSpec;
use shellkorn::mesh::{BoundarySpec, Domain, Grading};
use thiserror::Error;

pub use config::Config;

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("validation: {0}")]
    Validation(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        let msg = e.to_string().replace('\n', " ");
        match e {
            ExperimentError::Io(_) => CliError::Io(msg),
            e if e.is_numerical() => CliError::Numerical(msg),
            _ => CliError::Validation(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "shellkorn", version, about = "Discrete Korn constants of DG shell models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate fundamental forms on a grid and check the tensor identities.
    GeometryCheck(Opts),
    /// Korn constant per refinement level (or per stretch factor with --stretches).
    Korn(Opts),
    /// Global trace constant of the broken H1 norm per level.
    Trace(Opts),
    /// Boundary-strip constant R(delta) per level and strip width.
    Strip(Opts),
    /// Edge inverse-inequality ratio times h_e^2 per level.
    Inverse(Opts),
    /// Total length of edges cut by the line x2 = 1/2 per level.
    Linecut(Opts),
    /// Strains of random rigid motions on the chart.
    RigidMotion(Opts),
    /// Naghdi model solve on the finest level under a uniform pressure.
    Solve(Opts),
    /// Size and shape-regularity statistics of every level.
    MeshInfo(Opts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GeometryCheck(_) => "geometry-check",
            Command::Korn(_) => "korn",
            Command::Trace(_) => "trace",
            Command::Strip(_) => "strip",
            Command::Inverse(_) => "inverse",
            Command::Linecut(_) => "linecut",
            Command::RigidMotion(_) => "rigid-motion",
            Command::Solve(_) => "solve",
            Command::MeshInfo(_) => "mesh-info",
        }
    }

    pub fn opts(&self) -> &Opts {
        match self {
            Command::GeometryCheck(o)
            | Command::Korn(o)
            | Command::Trace(o)
            | Command::Strip(o)
            | Command::Inverse(o)
            | Command::Linecut(o)
            | Command::RigidMotion(o)
            | Command::Solve(o)
            | Command::MeshInfo(o) => o,
        }
    }
}

/// Flags shared by every command. Lengths are in units of the parameter
/// domain `[0,1]²`; stresses in any consistent unit.
#[derive(Debug, Default, Args)]
pub struct Opts {
    /// Config file of `key = value` lines with optional [section] headers; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Surface chart: flat | cylinder | sphere | paraboloid.
    #[arg(long)]
    pub chart: Option<String>,
    /// Chart parameter, repeatable: radius=<length> (cylinder, sphere) or scale=<1/length> (paraboloid).
    #[arg(long = "chart-param", value_name = "K=V")]
    pub chart_param: Vec<String>,
    /// Triangle-format mesh stem (<stem>.node, .ele, optional .edge), red-refined per level.
    #[arg(long = "mesh-file", value_name = "STEM")]
    pub mesh_file: Option<PathBuf>,
    /// Structured domain: unit-square | l-shape [default: unit-square].
    #[arg(long)]
    pub domain: Option<String>,
    /// Cells per unit length on level 1 of the structured family [count, default: 1].
    #[arg(long)]
    pub base: Option<usize>,
    /// Geometric grading ratio q in (0,1) towards the origin, or `none` [dimensionless, default: none].
    #[arg(long)]
    pub grading: Option<String>,
    /// Number of refinement levels [count, default: 4].
    #[arg(long)]
    pub levels: Option<usize>,
    /// Polynomial degree k of the DG space [1..=6, default: 1].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Shell model: naghdi | koiter | koiter-h3 | plane [default: naghdi].
    #[arg(long)]
    pub model: Option<String>,
    /// Boundary markers: D | S | F for all sides, or west=D,east=F,south=S,north=F, or file [default: D].
    #[arg(long, value_name = "MARKERS")]
    pub bc: Option<String>,
    /// Boundary seminorm: paper | nitsche | none [default: nitsche].
    #[arg(long)]
    pub f: Option<String>,
    /// Half-thickness epsilon [dimensionless, relative to the unit domain, default: 0.01].
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Shear correction factor kappa [dimensionless, default: 5/6].
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Lame parameter lambda [stress, default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Lame parameter mu [stress, default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Jump and boundary penalty weight eta [dimensionless, default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub penalty: Option<f64>,
    /// Seed of randomized checks [integer, default: 24301].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [count, default: $SHELLKORN_THREADS or 1].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory for <command>.csv and <command>.svg [path, default: out].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write every pencil as `row col value` text under <out>/matrices.
    #[arg(long = "dump-matrices")]
    pub dump_matrices: bool,
    /// Relative eigenvalue tolerance of the iterative solver [dimensionless, default: 1e-8].
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Strip widths for `strip`, comma separated [length, default: 0.25,0.125,0.0625].
    #[arg(long, value_name = "LIST")]
    pub deltas: Option<String>,
    /// Stretch factors for `korn`, comma separated; switches to the anisotropic family [dimensionless].
    #[arg(long, value_name = "LIST")]
    pub stretches: Option<String>,
    /// Cells per unit length of the stretched meshes [count, default: 4].
    #[arg(long = "stretch-base")]
    pub stretch_base: Option<usize>,
    /// Grid points per direction for `geometry-check` [count, default: 5].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Random rigid motions per chart for `rigid-motion` [count, default: 10].
    #[arg(long)]
    pub motions: Option<usize>,
    /// Sample points per motion for `rigid-motion` [count, default: 20].
    #[arg(long)]
    pub points: Option<usize>,
    /// Uniform transverse load p3 for `solve` [force per unit area, default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub pressure: Option<f64>,
}

impl Opts {
    /// Config file contents overridden by the flags given.
    pub fn config(&self) -> Result<Config, CliError> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", p.display())))?;
                Config::parse(&text)?
            }
            None => Config::default(),
        };
        macro_rules! over {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.set(stringify!($field), v)?;
                }
            )*};
        }
        over!(chart, domain, base, grading, levels, degree, model, bc, f, eps, kappa, lambda, mu, penalty, seed);
        over!(threads, tol, deltas, stretches, stretch_base, grid, motions, points, pressure);
        if let Some(p) = &self.mesh_file {
            cfg.set("mesh_file", p.display())?;
        }
        if let Some(p) = &self.out {
            cfg.set("out", p.display())?;
        }
        if self.dump_matrices {
            cfg.set("dump_matrices", true)?;
        }
        for kv in &self.chart_param {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("--chart-param expects key=value, got `{kv}`")))?;
            let k = k.trim();
            if !matches!(k, "radius" | "scale") {
                return Err(CliError::Validation(format!("unknown chart parameter `{k}` (radius|scale)")));
            }
            cfg.set(k, v.trim())?;
        }
        Ok(cfg)
    }
}

/// Worker threads from the config, then `SHELLKORN_THREADS`, then 1.
pub fn thread_count(cfg: &Config) -> Result<usize, CliError> {
    let n = match cfg.get::<usize>("threads")? {
        Some(n) => n,
        None => match std::env::var("SHELLKORN_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|e| CliError::Validation(format!("invalid SHELLKORN_THREADS `{v}`: {e}")))?,
            Err(_) => 1,
        },
    };
    if n == 0 {
        return Err(CliError::Validation("`threads` must be at least 1".into()));
    }
    Ok(n)
}

fn chart_spec(cfg: &Config, required: bool) -> Result<ChartSpec, CliError> {
    let name = if required {
        cfg.require("chart")?
    } else {
        cfg.raw("chart").unwrap_or("flat")
    };
    let mut params = Vec::new();
    for key in ["radius", "scale"] {
        if let Some(v) = cfg.get::<f64>(key)? {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Validation(format!("`{key}` must be positive, got {v}")));
            }
            params.push((key.to_string(), v));
        }
    }
    ChartSpec::parse(&name.to_ascii_lowercase(), &params).map_err(|e| CliError::Validation(e.to_string()))
}

fn positive(cfg: &Config, key: &str) -> Result<Option<f64>, CliError> {
    match cfg.get::<f64>(key)? {
        Some(v) if !(v > 0.0) || !v.is_finite() => Err(CliError::Validation(format!("`{key}` must be positive, got {v}"))),
        other => Ok(other),
    }
}

/// Builds the study specification from a merged config.
pub fn study_spec(cfg: &Config, chart_required: bool) -> Result<StudySpec, CliError> {
    let mut spec = StudySpec::default();
    spec.chart = chart_spec(cfg, chart_required)?;
    if let Some(m) = cfg.raw("model") {
        spec.model = m.parse()?;
    }
    if let Some(f) = cfg.raw("f") {
        spec.f = experiments::parse_fspec(f)?;
    }
    spec.levels = cfg.get_or("levels", spec.levels)?;
    spec.degree = cfg.get_or("degree", spec.degree)?;
    spec.seed = cfg.get_or("seed", spec.seed)?;
    if let Some(bc) = cfg.raw("bc") {
        spec.boundary = bc
            .parse::<BoundarySpec>()
            .map_err(|e| CliError::Validation(format!("invalid `bc`: {e}")))?;
    }

    spec.family = match cfg.raw("mesh_file") {
        Some(stem) => {
            for key in ["domain", "base", "grading"] {
                if cfg.raw(key).is_some() {
                    return Err(CliError::Validation(format!("`{key}` conflicts with `mesh_file`")));
                }
            }
            MeshFamily::File(PathBuf::from(stem))
        }
        None => {
            let domain = match cfg.raw("domain").unwrap_or("unit-square") {
                "unit-square" | "square" => Domain::UnitSquare,
                "l-shape" | "lshape" => Domain::LShape,
                other => return Err(CliError::Validation(format!("unknown domain `{other}` (unit-square|l-shape)"))),
            };
            let base: usize = cfg.get_or("base", 1)?;
            if base == 0 {
                return Err(CliError::Validation("`base` must be at least 1".into()));
            }
            let grading = match cfg.raw("grading").unwrap_or("none") {
                "none" => Grading::None,
                q => {
                    let q: f64 = q
                        .parse()
                        .map_err(|e| CliError::Validation(format!("invalid value `{q}` for `grading`: {e}")))?;
                    if !(q > 0.0 && q < 1.0) {
                        return Err(CliError::Validation(format!("`grading` must lie in (0,1), got {q}")));
                    }
                    Grading::Geometric(q)
                }
            };
            MeshFamily::Structured { domain, base, grading }
        }
    };

    let mut params = ModelParams::default();
    for (key, slot) in [
        ("eps", &mut params.eps),
        ("kappa", &mut params.kappa),
        ("mu", &mut params.mu),
        ("penalty", &mut params.penalty),
    ] {
        if let Some(v) = positive(cfg, key)? {
            *slot = v;
        }
    }
    if let Some(l) = cfg.get::<f64>("lambda")? {
        params.lambda = l;
    }
    spec.params = params;

    let mut eigen = EigenOptions::default();
    if let Some(t) = positive(cfg, "tol")? {
        eigen.tol = t;
    }
    if let Some(t) = positive(cfg, "kernel_tol")? {
        eigen.kernel_tol = t;
    }
    eigen.dense_threshold = cfg.get_or("dense_threshold", eigen.dense_threshold)?;
    eigen.krylov_dim = cfg.get_or("krylov_dim", eigen.krylov_dim)?;
    eigen.max_iterations = cfg.get_or("max_iterations", eigen.max_iterations)?;
    spec.eigen = eigen;

    if cfg.get_or("dump_matrices", false)? {
        spec.dump_matrices = Some(out_dir(cfg).join("matrices"));
    }
    spec.validate()?;
    Ok(spec)
}

pub fn out_dir(cfg: &Config) -> PathBuf {
    PathBuf::from(cfg.raw("out").unwrap_or("out"))
}

/// Paths of the written artifacts and an optional numerical failure that
/// is reported after the artifacts exist.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failure: Option<CliError>,
}

fn write_pair(dir: &Path, stem: &str, csv: &str, svg: &str) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let c = dir.join(format!("{stem}.csv"));
    let s = dir.join(format!("{stem}.svg"));
    fs::write(&c, csv)?;
    fs::write(&s, svg)?;
    Ok(vec![c, s])
}

fn table_failure(table: &StudyTable) -> Option<CliError> {
    table.rows.iter().find(|r| r.flag.starts_with("kernel") || r.flag.starts_with("error")).map(|r| {
        if r.flag.starts_with("kernel") {
            CliError::Numerical(format!(
                "infinite Korn constant at level {}: pencil kernel found ({})",
                r.level, r.flag
            ))
        } else {
            CliError::Numerical(format!("level {}: {}", r.level, r.flag.trim_start_matches("error: ")))
        }
    })
}

fn table_outcome(table: &StudyTable, dir: &Path, stem: &str) -> Result<Outcome, CliError> {
    let files = write_pair(dir, stem, &table.to_csv(), &table.to_svg())?;
    Ok(Outcome {
        files,
        failure: table_failure(table),
    })
}

fn needs_chart(command: &Command) -> bool {
    matches!(
        command,
        Command::GeometryCheck(_) | Command::Korn(_) | Command::RigidMotion(_) | Command::Solve(_)
    )
}

/// Runs one command with an already merged config.
pub fn execute(command: &Command, cfg: &Config) -> Result<Outcome, CliError> {
    let spec = study_spec(cfg, needs_chart(command))?;
    let dir = out_dir(cfg);
    let stem = command.name();
    match command {
        Command::Korn(_) => {
            let table = match cfg.list("stretches")? {
                Some(stretches) => {
                    let n = cfg.get_or("stretch_base", 4usize)?;
                    experiments::regularity_degradation_study(&spec, n, &stretches)?
                }
                None => experiments::korn_study(&spec)?,
            };
            table_outcome(&table, &dir, stem)
        }
        Command::Trace(_) => table_outcome(&experiments::trace_constant_study(&spec)?, &dir, stem),
        Command::Strip(_) => {
            let deltas = cfg.list("deltas")?.unwrap_or_else(|| vec![0.25, 0.125, 0.0625]);
            table_outcome(&experiments::strip_constant_study(&spec, &deltas)?, &dir, stem)
        }
        Command::Inverse(_) => table_outcome(&experiments::inverse_inequality_study(&spec)?, &dir, stem),
        Command::Linecut(_) => table_outcome(&experiments::line_cut_study(&spec)?, &dir, stem),
        Command::MeshInfo(_) => table_outcome(&mesh_info(&spec)?, &dir, stem),
        Command::GeometryCheck(_) => {
            let grid = cfg.get_or("grid", 5usize)?;
            let check = experiments::geometry_check(&spec.chart, grid)?;
            let points: Vec<(f64, f64)> = check
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| (i as f64, r.worst().max(1e-300).log10()))
                .collect();
            let svg = line_plot_svg(
                &format!("geometry check: {}", check.chart),
                "grid point",
                "log10(max relative residual)",
                &points,
            );
            let files = write_pair(&dir, stem, &check.to_csv(), &svg)?;
            let failure = (!check.passed()).then(|| {
                let (i, r) = check
                    .rows
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.worst().total_cmp(&b.1.worst()))
                    .expect("nonempty grid");
                CliError::Numerical(format!(
                    "geometry invariant violated at point {i} ({}, {}): residual {:e} > {:e}",
                    r.x[0],
                    r.x[1],
                    r.worst(),
                    check.tolerance
                ))
            });
            Ok(Outcome { files, failure })
        }
        Command::RigidMotion(_) => {
            let motions = cfg.get_or("motions", 10usize)?;
            let points = cfg.get_or("points", 20usize)?;
            if motions == 0 || points == 0 {
                return Err(CliError::Validation("`motions` and `points` must be at least 1".into()));
            }
            let report = experiments::rigid_motion_check(&spec.chart, motions, points, spec.seed)?;
            let tol = 1e-9;
            let mut csv = String::from(
                "chart,motions,points,seed,max_scaled_strain,max_strain,min_relative_seminorm,zero_motion_max,passed\n",
            );
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                report.chart,
                report.motions,
                report.points_per_motion,
                spec.seed,
                format_value(report.max_scaled_strain),
                format_value(report.max_strain),
                format_value(report.min_relative_seminorm),
                format_value(report.zero_motion_max),
                report.passes(tol)
            );
            let svg = line_plot_svg(
                &format!("rigid motions: {}", report.chart),
                "quantity (0 = scaled strain, 1 = zero motion)",
                "log10(value)",
                &[
                    (0.0, report.max_scaled_strain.max(1e-300).log10()),
                    (1.0, report.zero_motion_max.max(1e-300).log10()),
                ],
            );
            let files = write_pair(&dir, stem, &csv, &svg)?;
            let failure = (!report.passes(tol)).then(|| {
                CliError::Numerical(format!(
                    "rigid motions not in the strain kernel: scaled strain {:e} (tolerance {tol:e}), seminorm ratio {:e}",
                    report.max_scaled_strain, report.min_relative_seminorm
                ))
            });
            Ok(Outcome { files, failure })
        }
        Command::Solve(_) => {
            let pressure = cfg.get_or("pressure", 1.0f64)?;
            let r = experiments::solve_naghdi(&spec, &LoadData::pressure(pressure))?;
            let mut csv = String::from(
                "level,dofs,pressure,energy,h_norm,residual,linearity_error,lambda_min,data_norm,stability_bound,stable\n",
            );
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.level,
                r.dofs,
                format_value(pressure),
                format_value(r.energy),
                format_value(r.h_norm),
                format_value(r.residual),
                format_value(r.linearity_error),
                format_value(r.lambda_min),
                format_value(r.data_norm),
                format_value(r.stability_bound),
                r.stable()
            );
            let mesh = spec.family.mesh::<f64>(spec.levels)?;
            let space = DgSpace::new(mesh, spec.degree, spec.model.layout());
            let profile: Vec<(f64, f64)> = (0..=40)
                .filter_map(|i| {
                    let x = Vector2::new((i as f64 + 0.5) / 41.0, 0.5 + 1e-7);
                    space.evaluate_at(&r.solution, &x).map(|s| (x.x, s.w().value))
                })
                .collect();
            let svg = line_plot_svg(
                &format!("naghdi solve: {} level {}", spec.chart.name(), r.level),
                "x1 at x2 = 1/2",
                "transverse displacement w",
                &profile,
            );
            let files = write_pair(&dir, stem, &csv, &svg)?;
            let failure = (!r.stable()).then(|| {
                CliError::Numerical(format!(
                    "solution norm {:e} exceeds the stability bound {:e}",
                    r.h_norm, r.stability_bound
                ))
            });
            Ok(Outcome { files, failure })
        }
    }
}

fn mesh_info(spec: &StudySpec) -> Result<StudyTable, CliError> {
    let mut table = StudyTable::new("mesh info", "min_angle_deg", "param", "triangles");
    let (degree, layout) = (spec.degree, spec.model.layout());
    for level in 1..=spec.levels {
        let mesh = spec.family.mesh::<f64>(level)?;
        let reg = mesh
            .shape_regularity()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let basis = (degree + 1) * (degree + 2) / 2;
        table.rows.push(experiments::StudyRow {
            level,
            param: None,
            dofs: mesh.num_triangles() * basis * layout.num_fields(),
            max_h: mesh.max_h(),
            kappa: reg.kappa,
            quasi_uniformity: reg.quasi_uniformity,
            value: reg.min_angle.to_degrees(),
            aux: Some(mesh.num_triangles() as f64),
            flag: String::new(),
            wall_time: 0.0,
        });
    }
    Ok(table)
}

/// Merges the config of `command`, installs the thread
/// pool and runs it. Returns the process exit code after printing the
/// artifact paths to stdout and any failure as one stderr line.
pub fn run(command: &Command) -> i32 {
    let result = command.opts().config().and_then(|cfg| {
        let threads = thread_count(&cfg)?;
        if rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_err() {
            log::debug!("thread pool already initialised");
        }
        execute(command, &cfg)
    });
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            match outcome.failure {
                Some(e) => report(command, &e),
                None => 0,
            }
        }
        Err(e) => report(command, &e),
    }
}

fn report(command: &Command, e: &CliError) -> i32 {
    eprintln!("error: {}: {e}", command.name());
    e.exit_code()
}
