use std::io::BufReader;

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector, Matrix2, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::dg::{DgSpace, FieldLayout, FieldSample, Jet};
use crate::geometry::{Chart, ChartSpec, Cylinder, FlatPlate, GeometryPoint, HyperbolicParaboloid, SpherePatch};
use crate::mesh::{BoundaryPartition, BoundarySpec, Marker, Mesh};

fn v(x: f64, y: f64) -> Vector2<f64> {
    Vector2::new(x, y)
}

fn dense(g: &NormGram<f64>) -> DMatrix<f64> {
    DMatrix::from(&g.matrix)
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Smallest `λ` with `A x = λ B x`, `B` positive definite.
fn min_generalized(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let l = b.clone().cholesky().expect("positive definite").l();
    let linv = l.clone().try_inverse().unwrap();
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    c.symmetric_eigen().eigenvalues.min()
}

fn random_jet(rng: &mut ChaCha8Rng) -> Jet<f64> {
    let mut r = || rng.random_range(-1.0..1.0);
    Jet {
        value: r(),
        grad: [r(), r()],
        hess: [r(), r(), r()],
    }
}

fn curved_charts() -> Vec<Box<dyn Chart<f64>>> {
    vec![
        Box::new(Cylinder { radius: 1.3 }),
        Box::new(SpherePatch { radius: 2.0 }),
        Box::new(HyperbolicParaboloid { scale: 0.7 }),
    ]
}

fn matrix_max(m: &Matrix2<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

#[test]
fn flat_transverse_constant_is_strain_free() {
    let gp = GeometryPoint::new(&FlatPlate, &v(0.2, 0.4)).unwrap();
    let s = FieldSample::single(FieldLayout::Naghdi, 4, Jet { value: 1.0, ..Jet::default() });
    assert_eq!(StrainState::evaluate(&gp, &s).max_abs(), 0.0);
}

#[test]
fn cylinder_axial_rotation_is_strain_free() {
    let chart = Cylinder { radius: 1.0 };
    let unit = Jet { value: 1.0, ..Jet::default() };
    let mut s = FieldSample::zero(FieldLayout::Naghdi);
    s.jets[0] = unit;
    s.jets[2] = unit;
    for &x1 in &[0.0, 0.7, 2.1] {
        let gp = GeometryPoint::new(&chart, &v(x1, 0.3)).unwrap();
        let st = StrainState::evaluate(&gp, &s);
        assert!(matrix_max(&st.rho) < 1e-14);
        assert!(matrix_max(&st.gamma_m) < 1e-14);
        assert!(st.tau.norm() < 1e-14, "tau = {}", st.tau);
    }
}

#[test]
fn flat_in_plane_rotation_is_strain_free() {
    let gp = GeometryPoint::new(&FlatPlate, &v(0.3, -0.2)).unwrap();
    let mut s = FieldSample::zero(FieldLayout::Naghdi);
    s.jets[2] = Jet { value: 0.2, grad: [0.0, -1.0], hess: [0.0; 3] };
    s.jets[3] = Jet { value: 0.3, grad: [1.0, 0.0], hess: [0.0; 3] };
    assert_eq!(StrainState::evaluate(&gp, &s).max_abs(), 0.0);
}

#[test]
fn flat_plate_bending() {
    let gp = GeometryPoint::new(&FlatPlate, &v(0.5, 0.5)).unwrap();
    let w = Jet { value: 0.25, grad: [1.0, 0.0], hess: [2.0, 0.0, 0.0] };
    let s = FieldSample::single(FieldLayout::Koiter, 2, w);
    assert_abs_diff_eq!(koiter_bending(&gp, &s), Matrix2::new(2.0, 0.0, 0.0, 0.0), epsilon = 1e-15);
}

#[test]
fn cylinder_translation_has_no_curvature_change() {
    let chart = Cylinder { radius: 1.0 };
    let s = FieldSample::single(FieldLayout::Koiter, 1, Jet { value: 1.0, ..Jet::default() });
    let gp = GeometryPoint::new(&chart, &v(0.9, 0.1)).unwrap();
    assert!(matrix_max(&koiter_bending(&gp, &s)) < 1e-14);
}

/// Naghdi sample carrying `(u, w)` and the zero-shear `θ`.
fn with_zero_shear(gp: &GeometryPoint<f64>, u: [Jet<f64>; 2], w: Jet<f64>) -> FieldSample<f64> {
    let mut koiter = FieldSample::zero(FieldLayout::Koiter);
    koiter.jets[0] = u[0];
    koiter.jets[1] = u[1];
    koiter.jets[2] = w;
    let theta = zero_shear_rotation(gp, &koiter);
    let mut s = FieldSample::zero(FieldLayout::Naghdi);
    s.jets[0] = theta[0];
    s.jets[1] = theta[1];
    s.jets[2] = u[0];
    s.jets[3] = u[1];
    s.jets[4] = w;
    s
}

#[test]
fn koiter_naghdi_reduction_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut charts = curved_charts();
    charts.push(Box::new(FlatPlate));
    for chart in &charts {
        for _ in 0..50 {
            let x = v(rng.random_range(0.1..0.9), rng.random_range(0.1..0.9));
            let gp = GeometryPoint::new(chart, &x).unwrap();
            let u = [random_jet(&mut rng), random_jet(&mut rng)];
            let w = random_jet(&mut rng);
            let s = with_zero_shear(&gp, u, w);
            let (rho, _, tau) = naghdi_strains(&gp, &s);
            let rho_k = koiter_bending(&gp, &s);
            assert!(matrix_max(&(rho + rho_k)) < 1e-10, "{}: {}", chart.name(), rho + rho_k);
            assert!(tau.norm() < 1e-12);
        }
    }
}

/// Exact jets of the rigid displacement `c + d × Φ` at `x`.
fn rigid_sample<C: Chart<f64> + ?Sized>(
    chart: &C,
    x: &Vector2<f64>,
    c: &Vector3<f64>,
    d: &Vector3<f64>,
) -> FieldSample<f64> {
    // exact first derivatives; second derivatives of w by central differences
    let first = |x: &Vector2<f64>| {
        let gp = GeometryPoint::new(chart, x).unwrap();
        let second = chart.second_partials(x);
        let disp = c + d.cross(&gp.position);
        let a = &gp.a_cov;
        let mut u = [Jet::default(); 2];
        for al in 0..2 {
            u[al].value = disp.dot(&a[al]);
            for be in 0..2 {
                u[al].grad[be] = d.cross(&a[be]).dot(&a[al]) + disp.dot(&second[al][be]);
            }
        }
        let mut w = Jet { value: disp.dot(&a[2]), ..Jet::default() };
        for be in 0..2 {
            let mut dw = d.cross(&a[be]).dot(&a[2]);
            for g in 0..2 {
                dw -= gp.b_mixed[(g, be)] * u[g].value;
            }
            w.grad[be] = dw;
        }
        (u, w)
    };
    let (u, mut w) = first(x);
    let h = 1e-5;
    let mut hess = [[0.0; 2]; 2];
    for be in 0..2 {
        let mut xp = *x;
        let mut xm = *x;
        xp[be] += h;
        xm[be] -= h;
        let (_, wp) = first(&xp);
        let (_, wm) = first(&xm);
        for al in 0..2 {
            hess[al][be] = (wp.grad[al] - wm.grad[al]) / (2.0 * h);
        }
    }
    w.hess = [hess[0][0], 0.5 * (hess[0][1] + hess[1][0]), hess[1][1]];
    let gp = GeometryPoint::new(chart, x).unwrap();
    with_zero_shear(&gp, u, w)
}

#[test]
fn rigid_motions_are_strain_free_on_curved_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for chart in &curved_charts() {
        for _ in 0..10 {
            let c = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let d = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let tol = 1e-9 * (1.0 + c.norm() + d.norm());
            for _ in 0..20 {
                let x = v(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95));
                let gp = GeometryPoint::new(chart, &x).unwrap();
                let st = StrainState::evaluate(&gp, &rigid_sample(chart, &x, &c, &d));
                assert!(st.max_abs() <= tol, "{} at {x}: {st:?}", chart.name());
            }
        }
    }
}

#[test]
fn h_norm_of_constant_and_unit_jump() {
    let mesh = Mesh::<f64>::unit_square(1);
    let space = DgSpace::new(mesh, 1, FieldLayout::Scalar);
    let g = assemble_norm_gram(&space, NormKind::H);
    let one = space.interpolate(|_| vec![1.0]);
    assert_abs_diff_eq!(g.quadratic(&one), 1.0, epsilon = 1e-12);

    let mut step = one.clone();
    for i in 0..space.basis_len() {
        step[space.dof(1, 0, i)] = 0.0;
    }
    assert_abs_diff_eq!(g.quadratic(&step), 1.5, epsilon = 1e-12);
    let jumps = edge_jump_gram(&space, NormKind::H);
    assert_abs_diff_eq!(jumps.quadratic(&step), 1.0, epsilon = 1e-12);
}

#[test]
fn h2_variants_agree_on_continuous_quadratics() {
    let mesh = Mesh::<f64>::unit_square(3);
    let space = DgSpace::new(mesh, 2, FieldLayout::Koiter);
    let x = space.interpolate(|p| vec![p.x * p.y, 1.0 - p.x, p.x * p.x + 0.5 * p.x * p.y - p.y]);
    let hk = assemble_norm_gram(&space, NormKind::HK).quadratic(&x);
    let hkbar = assemble_norm_gram(&space, NormKind::HKBar).quadratic(&x);
    assert_abs_diff_eq!(hk, hkbar, epsilon = 1e-10 * hk);

    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let ek = assemble_energy_gram(&space, &FlatPlate, EnergyKind::Koiter, &part, FSpec::Paper).unwrap();
    let ekb = assemble_energy_gram(&space, &FlatPlate, EnergyKind::KoiterBar, &part, FSpec::Paper).unwrap();
    let (a, b) = (ek.quadratic(&x), ekb.quadratic(&x));
    assert_abs_diff_eq!(a, b, epsilon = 1e-10 * a);
}

#[test]
fn naghdi_seminorm_perimeter() {
    let mesh = Mesh::<f64>::unit_square(1);
    let space = DgSpace::new(mesh, 1, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let x = space.interpolate(|_| vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    let f = assemble_f_seminorm(&space, &FlatPlate, &part, SeminormModel::Naghdi, false).unwrap();
    assert_abs_diff_eq!(f.quadratic(&x), 4.0, epsilon = 1e-12);

    let fine = DgSpace::new(Mesh::<f64>::unit_square(2), 1, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&fine.mesh, Marker::Dirichlet);
    let x = fine.interpolate(|_| vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    let nitsche = assemble_f_seminorm(&fine, &FlatPlate, &part, SeminormModel::Naghdi, true).unwrap();
    assert_abs_diff_eq!(nitsche.quadratic(&x), 8.0, epsilon = 1e-12);
}

#[test]
fn seminorm_vanishes_for_fields_zero_on_boundary() {
    let space = DgSpace::new(Mesh::<f64>::unit_square(2), 2, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let bubble = |p: &Vector2<f64>| p.x * (1.0 - p.x) * p.y * (1.0 - p.y);
    let x = space.interpolate(|p| vec![0.0, 0.0, 0.0, 0.0, bubble(p)]);
    let f = assemble_f_seminorm(&space, &FlatPlate, &part, SeminormModel::Naghdi, false).unwrap();
    // degree-4 bubble projected onto quadratics is only approximately zero on ∂Ω
    assert!(f.quadratic(&x) < 1e-4);

    let x = space.interpolate(|p| vec![p.x * (1.0 - p.x), 0.0, 0.0, p.y * (1.0 - p.y), 0.0]);
    let supported = BoundaryPartition::uniform(&space.mesh, Marker::Simple);
    let f = assemble_f_seminorm(&space, &FlatPlate, &supported, SeminormModel::Naghdi, false).unwrap();
    assert!(f.quadratic(&x) > 0.0);
    let x = space.interpolate(|_| vec![1.0, 1.0, 0.0, 0.0, 0.0]);
    assert_eq!(f.quadratic(&x), 0.0);
}

#[test]
fn koiter_seminorm_normal_derivative() {
    let space = DgSpace::new(Mesh::<f64>::unit_square(2), 1, FieldLayout::Koiter);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let x = space.interpolate(|p| vec![0.0, 0.0, p.x]);
    let f = assemble_f_seminorm(&space, &FlatPlate, &part, SeminormModel::Koiter, false).unwrap();
    assert_abs_diff_eq!(f.quadratic(&x), 2.0 + 5.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn physical_conormal_is_unit() {
    let chart = HyperbolicParaboloid { scale: 1.0 };
    let gp = GeometryPoint::new(&chart, &v(0.6, 0.3)).unwrap();
    let n = boundary_conormal(&gp, &v(1.0, 0.0));
    let phys = gp.a_cov[0] * n[0] + gp.a_cov[1] * n[1];
    assert_abs_diff_eq!(phys.norm(), 1.0, epsilon = 1e-14);
    // orthogonal to the physical edge tangent a_2
    assert_abs_diff_eq!(phys.dot(&gp.a_cov[1]), 0.0, epsilon = 1e-14);
}

#[test]
fn flat_rigid_rotation_has_only_boundary_energy() {
    let space = DgSpace::new(Mesh::<f64>::unit_square(3), 1, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let x = space.interpolate(|p| vec![0.0, 0.0, -p.y, p.x, 0.0]);
    let free = assemble_energy_gram(&space, &FlatPlate, EnergyKind::Naghdi, &part, FSpec::None).unwrap();
    assert!(free.semidefinite);
    let direct = evaluate_energy(&space, &FlatPlate, EnergyKind::Naghdi, &x).unwrap();
    assert!(direct.total() <= 1e-20 * x.norm_squared(), "{direct:?}");
    // the assembled form agrees up to the rounding of xᵀGx
    let gram_scale = dense(&free).amax() * x.norm_squared();
    assert!(free.quadratic(&x).abs() <= 1e-14 * gram_scale);
    let with_f = assemble_energy_gram(&space, &FlatPlate, EnergyKind::Naghdi, &part, FSpec::Paper).unwrap();
    let f = assemble_f_seminorm(&space, &FlatPlate, &part, SeminormModel::Naghdi, false).unwrap();
    assert_abs_diff_eq!(with_f.quadratic(&x), f.quadratic(&x), epsilon = 1e-12);
}

fn all_energy_grams(chart: &dyn Chart<f64>, mesh: &Mesh<f64>) -> Vec<(NormGram<f64>, usize)> {
    let part = BoundaryPartition::new(mesh, &"west=D,south=S,east=F,north=F".parse::<BoundarySpec>().unwrap());
    let mut out = Vec::new();
    for (kind, layout, k) in [
        (EnergyKind::Naghdi, FieldLayout::Naghdi, 1),
        (EnergyKind::Koiter, FieldLayout::Koiter, 2),
        (EnergyKind::KoiterBar, FieldLayout::Koiter, 2),
        (EnergyKind::Plane, FieldLayout::Plane, 1),
        (EnergyKind::PlaneBrenner, FieldLayout::Plane, 1),
    ] {
        let space = DgSpace::new(mesh.clone(), k, layout);
        for f in [FSpec::None, FSpec::Paper, FSpec::Nitsche] {
            let g = assemble_energy_gram(&space, chart, kind, &part, f).unwrap();
            out.push((g, space.dof_count()));
        }
    }
    out
}

#[test]
fn energy_grams_are_symmetric_semidefinite_and_quadratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mesh = Mesh::<f64>::unit_square(2);
    for chart in &curved_charts() {
        for (g, n) in all_energy_grams(chart.as_ref(), &mesh) {
            assert!(g.asymmetry() <= 1e-12, "{:?}", g.kind);
            for _ in 0..5 {
                let x = random_vector(n, &mut rng);
                let q = g.quadratic(&x);
                assert!(q >= 0.0);
                let q2 = g.quadratic(&(&x * 2.0));
                assert_abs_diff_eq!(q2, 4.0 * q, epsilon = 1e-12 * q2.abs());
            }
        }
    }
}

#[test]
fn norm_and_constrained_energy_grams_are_definite() {
    let mesh = Mesh::<f64>::unit_square(2);
    let chart = Cylinder { radius: 1.0 };
    for (layout, k) in [(FieldLayout::Naghdi, 1), (FieldLayout::Koiter, 2)] {
        let space = DgSpace::new(mesh.clone(), k, layout);
        for kind in [NormKind::H, NormKind::HK, NormKind::HKBar] {
            let g = dense(&assemble_norm_gram(&space, kind));
            assert!(g.symmetric_eigen().eigenvalues.min() > 0.0);
        }
    }
    let part = BoundaryPartition::uniform(&mesh, Marker::Dirichlet);
    for (kind, layout, k) in [
        (EnergyKind::Naghdi, FieldLayout::Naghdi, 1),
        (EnergyKind::Koiter, FieldLayout::Koiter, 2),
    ] {
        let space = DgSpace::new(mesh.clone(), k, layout);
        let g = dense(&assemble_energy_gram(&space, &chart, kind, &part, FSpec::Paper).unwrap());
        let h = dense(&assemble_norm_gram(&space, NormKind::H));
        assert!(min_generalized(&g, &h) > 1e-8, "{kind:?}");
    }
}

#[test]
fn layout_mismatch_is_an_error() {
    let space = DgSpace::new(Mesh::<f64>::unit_square(1), 1, FieldLayout::Plane);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let err = assemble_energy_gram(&space, &FlatPlate, EnergyKind::Naghdi, &part, FSpec::None);
    assert!(matches!(err, Err(FormsError::Layout { .. })));
}

#[test]
fn flat_membrane_gram_matches_plane_elasticity() {
    let mesh = Mesh::<f64>::unit_square(3);
    let part = BoundaryPartition::uniform(&mesh, Marker::Dirichlet);
    let plane = DgSpace::new(mesh.clone(), 2, FieldLayout::Plane);
    for (f, brenner) in [(FSpec::None, false), (FSpec::Nitsche, false), (FSpec::None, true)] {
        let kind = if brenner { EnergyKind::PlaneBrenner } else { EnergyKind::Plane };
        let shell = dense(&assemble_energy_gram(&plane, &FlatPlate, kind, &part, f).unwrap());
        let direct = dense(&assemble_plane_elasticity(&plane, &part, f, brenner).unwrap());
        assert!((&shell - &direct).amax() <= 1e-12 * direct.amax());
    }

    // u-u block of the flat Naghdi energy
    let naghdi = DgSpace::new(mesh, 2, FieldLayout::Naghdi);
    let e = dense(&assemble_energy_gram(&naghdi, &FlatPlate, EnergyKind::Naghdi, &part, FSpec::None).unwrap());
    let direct = dense(&assemble_plane_elasticity(&plane, &part, FSpec::None, false).unwrap());
    let nb = plane.basis_len();
    let map = |i: usize| {
        let (t, rest) = (i / (2 * nb), i % (2 * nb));
        naghdi.dof(t, 2 + rest / nb, rest % nb)
    };
    let mut diff = 0.0f64;
    for i in 0..plane.dof_count() {
        for j in 0..plane.dof_count() {
            diff = diff.max((e[(map(i), map(j))] - direct[(i, j)]).abs());
        }
    }
    assert!(diff <= 1e-12 * direct.amax(), "diff = {diff}");
}

/// Per-element `L²` projection of the zero-shear rotation.
fn lift_to_naghdi<C: Chart<f64>>(
    koiter: &DgSpace<f64>,
    naghdi: &DgSpace<f64>,
    chart: &C,
    x: &DVector<f64>,
) -> DVector<f64> {
    let nb = koiter.basis_len();
    let mut out = DVector::zeros(naghdi.dof_count());
    for t in 0..koiter.mesh.num_triangles() {
        for (kf, nf) in [(0, 2), (1, 3), (2, 4)] {
            for i in 0..nb {
                out[naghdi.dof(t, nf, i)] = x[koiter.dof(t, kf, i)];
            }
        }
        let table = koiter.element_table(t);
        for (q, p) in table.points.iter().enumerate() {
            let gp = GeometryPoint::new(chart, p).unwrap();
            let s = koiter.sample_from_jets(x, t, table.basis.at(q));
            let theta = zero_shear_rotation(&gp, &s);
            for a in 0..2 {
                for (i, jet) in table.basis.at(q).iter().enumerate() {
                    out[naghdi.dof(t, a, i)] += table.weights[q] * theta[a].value * jet.value;
                }
            }
        }
    }
    out
}

#[test]
fn koiter_and_naghdi_energies_are_equivalent_on_the_cylinder() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let chart = Cylinder { radius: 1.0 };
    let mesh = Mesh::<f64>::unit_square(2);
    let part = BoundaryPartition::uniform(&mesh, Marker::Dirichlet);
    let koiter = DgSpace::new(mesh.clone(), 2, FieldLayout::Koiter);
    let naghdi = DgSpace::new(mesh, 2, FieldLayout::Naghdi);
    let gk = assemble_energy_gram(&koiter, &chart, EnergyKind::Koiter, &part, FSpec::None).unwrap();
    let gn = assemble_energy_gram(&naghdi, &chart, EnergyKind::Naghdi, &part, FSpec::None).unwrap();
    let tau_gram = |y: &DVector<f64>| {
        let mut total = 0.0;
        for t in 0..naghdi.mesh.num_triangles() {
            let table = naghdi.element_table(t);
            for (q, p) in table.points.iter().enumerate() {
                let gp = GeometryPoint::new(&chart, p).unwrap();
                let s = naghdi.sample_from_jets(y, t, table.basis.at(q));
                total += table.weights[q] * naghdi_strains(&gp, &s).2.norm_squared();
            }
        }
        total
    };
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..100 {
        let x = random_vector(koiter.dof_count(), &mut rng);
        let y = lift_to_naghdi(&koiter, &naghdi, &chart, &x);
        assert!(tau_gram(&y) <= 1e-20 * y.norm_squared());
        let ratio = gn.quadratic(&y) / gk.quadratic(&x);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    assert!(lo > 0.05 && hi < 20.0, "ratio spread [{lo}, {hi}]");
}

#[test]
fn flat_model_decouples_membrane_from_plate() {
    let space = DgSpace::new(Mesh::<f64>::unit_square(2), 1, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let params = ModelParams { eps: 1.0, kappa: 1.0, lambda: 0.0, mu: 1.0, penalty: 1.0 };
    let sys = assemble_naghdi_model(&space, &FlatPlate, &params, &part, &LoadData::zero()).unwrap();
    let k = DMatrix::from(&sys.matrix);
    let nb = space.basis_len();
    let is_u = |i: usize| matches!((i % space.element_dofs()) / nb, 2 | 3);
    let mut coupling = 0.0f64;
    for i in 0..k.nrows() {
        for j in 0..k.ncols() {
            if is_u(i) != is_u(j) {
                coupling = coupling.max(k[(i, j)].abs());
            }
        }
    }
    assert!(coupling <= 1e-12, "coupling = {coupling}");
    assert_eq!(sys.rhs.amax(), 0.0);
}

#[test]
fn model_is_symmetric_and_coercive() {
    let mesh = Mesh::<f64>::unit_square(2);
    let space = DgSpace::new(mesh, 1, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let params = ModelParams { eps: 0.5, lambda: 0.0, ..ModelParams::default() };
    let sys = assemble_naghdi_model(&space, &FlatPlate, &params, &part, &LoadData::zero()).unwrap();
    let k = DMatrix::from(&sys.matrix);
    assert!((&k - k.transpose()).amax() <= 1e-12 * k.amax());
    let h = dense(&assemble_norm_gram(&space, NormKind::H));
    let e = dense(&assemble_energy_gram(&space, &FlatPlate, EnergyKind::Naghdi, &part, FSpec::Nitsche).unwrap());
    let scale = (1.0f64 / 3.0)
        .min(params.kappa * params.mu / (params.eps * params.eps))
        .min(params.penalty);
    let lk = min_generalized(&k, &h);
    let le = min_generalized(&e, &h);
    assert!(lk > 0.0);
    assert!(lk >= 0.999 * scale * le, "{lk} vs {scale}·{le}");
}

#[test]
fn model_rejects_bad_parameters() {
    let space = DgSpace::new(Mesh::<f64>::unit_square(1), 1, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    for params in [
        ModelParams { eps: 0.0, ..ModelParams::default() },
        ModelParams { kappa: -1.0, ..ModelParams::default() },
        ModelParams { penalty: 0.0, ..ModelParams::default() },
    ] {
        let r = assemble_naghdi_model(&space, &FlatPlate, &params, &part, &LoadData::zero());
        assert!(matches!(r, Err(FormsError::Parameter(_))));
    }
}

#[test]
fn load_vector_uses_physical_measures() {
    let radius = 2.0;
    let chart = Cylinder { radius };
    let space = DgSpace::new(Mesh::<f64>::unit_square(2), 1, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Free);
    let params = ModelParams::default();
    let sys = assemble_naghdi_model(&space, &chart, &params, &part, &LoadData::pressure(1.0)).unwrap();
    let w_one = space.interpolate(|_| vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    assert_abs_diff_eq!(sys.rhs.dot(&w_one), radius, epsilon = 1e-12);

    let moment = LoadData {
        edge_moment: Some(std::sync::Arc::new(|_: &Vector2<f64>| [1.0, 0.0])),
        ..LoadData::zero()
    };
    let sys = assemble_naghdi_model(&space, &chart, &params, &part, &moment.scaled(3.0)).unwrap();
    let theta_one = space.interpolate(|_| vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    assert_abs_diff_eq!(sys.rhs.dot(&theta_one), 3.0 * (2.0 * radius + 2.0), epsilon = 1e-12);
}

#[test]
fn assembly_is_bitwise_reproducible_across_thread_counts() {
    let mesh = Mesh::<f64>::unit_square(3);
    let space = DgSpace::new(mesh, 2, FieldLayout::Naghdi);
    let part = BoundaryPartition::uniform(&space.mesh, Marker::Dirichlet);
    let chart = ChartSpec::Paraboloid { scale: 1.0 }.build::<f64>();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                assemble_energy_gram(&space, &chart, EnergyKind::Naghdi, &part, FSpec::Nitsche)
                    .unwrap()
                    .matrix
            })
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.row_offsets(), b.row_offsets());
    assert_eq!(a.col_indices(), b.col_indices());
    assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn matrix_dump_round_trip() {
    let space = DgSpace::new(Mesh::<f64>::unit_square(1), 1, FieldLayout::Koiter);
    let g = assemble_norm_gram(&space, NormKind::HK);
    let mut buf = Vec::new();
    write_matrix(&mut buf, &g.matrix).unwrap();
    let back: nalgebra_sparse::CsrMatrix<f64> = read_matrix(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back, g.matrix);
    assert!(read_matrix::<f64, _>(BufReader::new(&b"0 0 x\n"[..])).is_err());
}

#[test]
fn single_precision_assembly() {
    let space = DgSpace::new(Mesh::<f32>::unit_square(1), 1, FieldLayout::Scalar);
    let g = assemble_norm_gram(&space, NormKind::H);
    let one = space.interpolate(|_| vec![1.0f32]);
    assert!((g.quadratic(&one) - 1.0).abs() < 1e-5);
}

#[test]
fn matrix_free_energy_matches_gram() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mesh = Mesh::<f64>::unit_square(2);
    let part = BoundaryPartition::uniform(&mesh, Marker::Dirichlet);
    let chart = SpherePatch { radius: 1.5 };
    for (kind, layout, k) in [
        (EnergyKind::Naghdi, FieldLayout::Naghdi, 1),
        (EnergyKind::Koiter, FieldLayout::Koiter, 2),
        (EnergyKind::KoiterBar, FieldLayout::Koiter, 2),
        (EnergyKind::Plane, FieldLayout::Plane, 1),
    ] {
        let space = DgSpace::new(mesh.clone(), k, layout);
        let g = assemble_energy_gram(&space, &chart, kind, &part, FSpec::None).unwrap();
        let x = random_vector(space.dof_count(), &mut rng);
        let direct = evaluate_energy(&space, &chart, kind, &x).unwrap().total();
        assert_abs_diff_eq!(direct, g.quadratic(&x), epsilon = 1e-11 * direct);
    }
}
