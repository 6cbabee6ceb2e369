use std::sync::Arc;

use nalgebra::{DVector, Vector2};
use nalgebra_sparse::CsrMatrix;

use crate::dg::{DgSpace, FieldLayout};
use crate::geometry::{Chart, ElasticTensor, GeometryError, GeometryPoint};
use crate::mesh::{BoundaryPartition, Marker};
use crate::scalar::{lit, to_f64, Real};

use super::assembly::{element_dofs, merge, par_blocks, Block, LocalGram};
use super::energy::{dof_strains, seminorm_blocks};
use super::norms::{jump_blocks, JumpSpec};
use super::{FormsError, GramKind, SeminormModel};

/// Physical and penalty parameters of the Naghdi model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Dimensionless half-thickness ε.
    pub eps: f64,
    /// Shear correction factor κ.
    pub kappa: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Weight η of the jump and boundary penalties.
    pub penalty: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            eps: 0.01,
            kappa: 5.0 / 6.0,
            lambda: 1.0,
            mu: 1.0,
            penalty: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), FormsError> {
        let check = |ok: bool, what: &str, v: f64| {
            if ok {
                Ok(())
            } else {
                Err(FormsError::Parameter(format!("{what} = {v}")))
            }
        };
        check(self.eps > 0.0, "eps", self.eps)?;
        check(self.kappa > 0.0, "kappa", self.kappa)?;
        check(self.mu > 0.0, "mu", self.mu)?;
        check(self.lambda >= 0.0, "lambda", self.lambda)?;
        check(self.penalty > 0.0, "penalty", self.penalty)
    }
}

pub type LoadFn<T, const N: usize> = Arc<dyn Fn(&Vector2<T>) -> [T; N] + Send + Sync>;

/// Surface and edge loads.
#[derive(Clone)]
pub struct LoadData<T: Real> {
    /// `(p¹, p², p³)` per unit area.
    pub surface: Option<LoadFn<T, 3>>,
    /// `(q¹, q², q³)` on free edges.
    pub edge_force: Option<LoadFn<T, 3>>,
    /// `(r¹, r²)` on supported and free edges.
    pub edge_moment: Option<LoadFn<T, 2>>,
}

impl<T: Real> Default for LoadData<T> {
    fn default() -> Self {
        LoadData {
            surface: None,
            edge_force: None,
            edge_moment: None,
        }
    }
}

impl<T: Real> std::fmt::Debug for LoadData<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoadData")
            .field("surface", &self.surface.is_some())
            .field("edge_force", &self.edge_force.is_some())
            .field("edge_moment", &self.edge_moment.is_some())
            .finish()
    }
}

impl<T: Real> LoadData<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Uniform transverse load `p³`.
    pub fn pressure(p3: T) -> Self {
        LoadData {
            surface: Some(Arc::new(move |_| [T::zero(), T::zero(), p3])),
            ..Self::default()
        }
    }

    /// Every load multiplied by `s`.
    pub fn scaled(&self, s: T) -> Self {
        fn scale<T: Real, const N: usize>(f: &Option<LoadFn<T, N>>, s: T) -> Option<LoadFn<T, N>> {
            f.clone().map(|f| -> LoadFn<T, N> { Arc::new(move |x| f(x).map(|v| v * s)) })
        }
        LoadData {
            surface: scale(&self.surface, s),
            edge_force: scale(&self.edge_force, s),
            edge_moment: scale(&self.edge_moment, s),
        }
    }
}

/// Assembled Naghdi system `K x = b`.
#[derive(Clone, Debug)]
pub struct NaghdiSystem<T: Real> {
    pub matrix: CsrMatrix<T>,
    pub rhs: DVector<T>,
}

fn bulk_blocks<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    params: &ModelParams,
) -> Result<Vec<Block<T>>, GeometryError> {
    let n = space.element_dofs();
    let third = lit::<T>(1.0 / 3.0);
    let eps2 = lit::<T>(1.0 / (params.eps * params.eps));
    let shear = eps2 * lit::<T>(params.kappa * params.mu);
    let (lambda, mu) = (lit::<T>(params.lambda), lit::<T>(params.mu));
    par_blocks(space.mesh.num_triangles(), |t| {
        let table = space.element_table(t);
        let mut g = LocalGram::new(n);
        for (q, x) in table.points.iter().enumerate() {
            let gp = GeometryPoint::new(chart, x)?;
            let voigt = ElasticTensor::new(&gp, lambda, mu)?.voigt();
            let w = table.weights[q] * gp.sqrt_a();
            let strains = dof_strains(space, &gp, table.basis.at(q));
            let row = |get: &dyn Fn(usize) -> T| -> Vec<T> { (0..n).map(get).collect() };
            let voigt_rows = |m: &dyn Fn(usize) -> nalgebra::Matrix2<T>| -> [Vec<T>; 3] {
                [
                    row(&|j| m(j)[(0, 0)]),
                    row(&|j| m(j)[(1, 1)]),
                    row(&|j| m(j)[(0, 1)]),
                ]
            };
            let rho = voigt_rows(&|j| strains[j].rho);
            let gam = voigt_rows(&|j| strains[j].gamma_m);
            let tau = [row(&|j| strains[j].tau.x), row(&|j| strains[j].tau.y)];
            for p in 0..3 {
                for r in 0..3 {
                    let v = voigt[(p, r)];
                    g.add_outer(w * third * v, &rho[p], &rho[r]);
                    g.add_outer(w * eps2 * v, &gam[p], &gam[r]);
                }
            }
            for a in 0..2 {
                for b in 0..2 {
                    g.add_outer(w * shear * gp.a_upper[(a, b)], &tau[a], &tau[b]);
                }
            }
        }
        Ok(Some(g.into_block(element_dofs(space, t))))
    })
}

fn physical_arc_factor<T: Real>(gp: &GeometryPoint<T>, tangent: &Vector2<T>) -> T {
    (gp.a_cov[0] * tangent.x + gp.a_cov[1] * tangent.y).norm()
}

fn load_vector<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    partition: &BoundaryPartition<T>,
    loads: &LoadData<T>,
) -> Result<DVector<T>, GeometryError> {
    let layout = FieldLayout::Naghdi;
    let [t1, t2] = layout.theta().expect("Naghdi layout");
    let [u1, u2] = layout.u().expect("Naghdi layout");
    let w3 = layout.w().expect("Naghdi layout");
    let nb = space.basis_len();
    let mut b = DVector::zeros(space.dof_count());
    if let Some(p) = &loads.surface {
        for t in 0..space.mesh.num_triangles() {
            let table = space.element_table(t);
            for (q, x) in table.points.iter().enumerate() {
                let gp = GeometryPoint::new(chart, x)?;
                let w = table.weights[q] * gp.sqrt_a();
                let load = p(x);
                for (i, jet) in table.basis.at(q).iter().enumerate() {
                    for (field, value) in [(u1, load[0]), (u2, load[1]), (w3, load[2])] {
                        b[space.dof(t, field, i)] += w * value * jet.value;
                    }
                }
            }
        }
    }
    if loads.edge_force.is_none() && loads.edge_moment.is_none() {
        return Ok(b);
    }
    for &e in &space.mesh.boundary_edges {
        let marker = partition.marker(e);
        if marker == Some(Marker::Dirichlet) {
            continue;
        }
        let edge = &space.mesh.edges[e];
        let table = space.edge_table(e);
        let (t, basis) = &table.sides[0];
        for (q, x) in table.points.iter().enumerate() {
            let gp = GeometryPoint::new(chart, x)?;
            let w = table.weights[q] * physical_arc_factor(&gp, &edge.tangent);
            let mut contributions: Vec<(usize, T)> = Vec::new();
            if let Some(r) = &loads.edge_moment {
                let r = r(x);
                contributions.push((t1, r[0]));
                contributions.push((t2, r[1]));
            }
            if marker == Some(Marker::Free) {
                if let Some(force) = &loads.edge_force {
                    let force = force(x);
                    contributions.push((u1, force[0]));
                    contributions.push((u2, force[1]));
                    contributions.push((w3, force[2]));
                }
            }
            for (i, jet) in basis.at(q).iter().enumerate().take(nb) {
                for &(field, value) in &contributions {
                    b[space.dof(*t, field, i)] += w * value * jet.value;
                }
            }
        }
    }
    Ok(b)
}

/// Assembles the penalized Naghdi operator and load vector.
///
/// The operator is `⅓·bending + ε⁻²(membrane + κμ·shear)` with elastic
/// tensor and `√a` weights, plus `η` times the interior jump terms and the
/// `h⁻¹`-weighted boundary seminorm.
pub fn assemble_naghdi_model<T: Real, C: Chart<T> + ?Sized>(
    space: &DgSpace<T>,
    chart: &C,
    params: &ModelParams,
    partition: &BoundaryPartition<T>,
    loads: &LoadData<T>,
) -> Result<NaghdiSystem<T>, FormsError> {
    params.validate()?;
    if space.layout != FieldLayout::Naghdi {
        return Err(FormsError::Layout {
            kind: GramKind::Energy(super::EnergyKind::Naghdi),
            layout: space.layout,
        });
    }
    if !partition.has_dirichlet() {
        log::warn!(
            "model without clamped edges (D-measure {}): the operator may be singular",
            to_f64(partition.dirichlet_measure)
        );
    }
    let eta = lit::<T>(params.penalty);
    let mut blocks = bulk_blocks(space, chart, params)?;
    let mut penalty = jump_blocks(space, &[JumpSpec::Value; 5]);
    penalty.extend(seminorm_blocks(space, chart, partition, SeminormModel::Naghdi, true)?);
    for block in &mut penalty {
        block.values *= eta;
    }
    blocks.extend(penalty);
    Ok(NaghdiSystem {
        matrix: merge(space.dof_count(), &blocks),
        rhs: load_vector(space, chart, partition, loads)?,
    })
}
