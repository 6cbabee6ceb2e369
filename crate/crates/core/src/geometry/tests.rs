use approx::assert_abs_diff_eq;
use nalgebra::{Matrix2, Rotation3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn v(x1: f64, x2: f64) -> Vector2<f64> {
    Vector2::new(x1, x2)
}

fn max_abs3(t: &Tensor3<f64>) -> f64 {
    t.iter().flatten().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn flat_frames_are_identity() {
    let gp = GeometryPoint::new(&FlatPlate, &v(0.3, -0.7)).unwrap();
    assert_abs_diff_eq!(gp.a_lower, Matrix2::identity(), epsilon = 1e-15);
    assert_abs_diff_eq!(gp.det_a, 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(gp.a_cov[2], Vector3::z(), epsilon = 1e-15);
    assert_eq!(gp.b_lower, Matrix2::zeros());
    assert_eq!(gp.c_lower, Matrix2::zeros());
    assert_eq!(max_abs3(&gp.gamma), 0.0);
    assert_eq!(max_abs3(&gp.db_mixed), 0.0);
}

#[test]
fn cylinder_hand_values() {
    let chart = Cylinder { radius: 1.0 };
    for &x1 in &[0.0, 0.4, 1.3, 2.9] {
        let gp = GeometryPoint::new(&chart, &v(x1, 0.25)).unwrap();
        assert_abs_diff_eq!(gp.a_lower, Matrix2::identity(), epsilon = 1e-14);
        assert_abs_diff_eq!(gp.a_cov[2], Vector3::new(x1.cos(), x1.sin(), 0.0), epsilon = 1e-14);
        assert_abs_diff_eq!(gp.b_lower, Matrix2::new(-1.0, 0.0, 0.0, 0.0), epsilon = 1e-14);
        assert_abs_diff_eq!(gp.c_lower, Matrix2::new(1.0, 0.0, 0.0, 0.0), epsilon = 1e-14);
        assert!(max_abs3(&gp.gamma) < 1e-15);
        assert!(max_abs3(&gp.db_mixed) < 1e-14);
    }
}

#[test]
fn paraboloid_hand_values() {
    let chart = HyperbolicParaboloid { scale: 1.0 };
    let gp = GeometryPoint::new(&chart, &v(1.0, 0.0)).unwrap();
    assert_abs_diff_eq!(gp.a_lower, Matrix2::new(1.0, 0.0, 0.0, 2.0), epsilon = 1e-14);
    assert_abs_diff_eq!(gp.det_a, 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(gp.a_upper, Matrix2::new(1.0, 0.0, 0.0, 0.5), epsilon = 1e-14);
    assert_abs_diff_eq!(gp.gamma[1][0][1], 0.5, epsilon = 1e-14);
    assert_abs_diff_eq!(gp.gamma[0][0][1], 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(gp.a_con[1], Vector3::new(0.0, 0.5, 0.5), epsilon = 1e-14);

    let origin = GeometryPoint::new(&chart, &v(0.0, 0.0)).unwrap();
    assert_abs_diff_eq!(origin.b_lower, Matrix2::new(0.0, 1.0, 1.0, 0.0), epsilon = 1e-14);
}

#[test]
fn sphere_is_umbilic_with_parallel_curvature() {
    let r = 2.5;
    let chart = SpherePatch { radius: r };
    for &(x1, x2) in &[(0.1, 0.2), (1.0, -0.6), (2.0, 0.9)] {
        let gp = GeometryPoint::new(&chart, &v(x1, x2)).unwrap();
        assert_abs_diff_eq!(gp.b_mixed, Matrix2::identity() * (-1.0 / r), epsilon = 1e-13);
        assert!(max_abs3(&gp.db_mixed) < 1e-13, "{:?}", gp.db_mixed);
        assert_abs_diff_eq!(gp.a_cov[2], gp.position / r, epsilon = 1e-13);
    }
}

fn check_invariants(gp: &GeometryPoint<f64>, tol: f64) {
    let id = gp.a_upper * gp.a_lower;
    assert!((id - Matrix2::identity()).abs().max() <= tol);
    assert!((gp.c_lower - gp.b_mixed.transpose() * gp.b_lower).abs().max() <= tol);
    assert!((gp.b_lower - gp.b_lower.transpose()).abs().max() <= tol);
    assert!((gp.c_lower - gp.c_lower.transpose()).abs().max() <= tol);
    for g in 0..2 {
        assert!((gp.gamma[g][0][1] - gp.gamma[g][1][0]).abs() <= tol);
        for a in 0..2 {
            let d = if g == a { 1.0 } else { 0.0 };
            assert!((gp.a_con[g].dot(&gp.a_cov[a]) - d).abs() <= tol);
        }
    }
    assert!((gp.a_con[2] - gp.a_cov[2]).norm() <= tol);
    assert!((gp.a_cov[2].norm() - 1.0).abs() <= tol);
}

#[test]
fn invariants_hold_on_every_builtin_chart() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for spec in ChartSpec::all_builtin() {
        let chart = spec.build::<f64>();
        for _ in 0..50 {
            let x = v(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let gp = GeometryPoint::new(chart.as_ref(), &x).unwrap();
            check_invariants(&gp, 1e-12);
        }
    }
}

#[test]
fn codazzi_symmetry_of_curvature_derivative() {
    // b^γ_{α|β} = b^γ_{β|α} on any smooth surface.
    let chart = HyperbolicParaboloid { scale: 1.3 };
    for &(x1, x2) in &[(0.2, 0.7), (-0.4, 0.1), (0.9, 0.9)] {
        let gp = GeometryPoint::new(&chart, &v(x1, x2)).unwrap();
        for g in 0..2 {
            assert_abs_diff_eq!(gp.db_mixed[g][0][1], gp.db_mixed[g][1][0], epsilon = 1e-13);
        }
    }
}

#[test]
fn curvature_derivative_matches_difference_quotient() {
    // independent check of ∂_β b^γ_α by differencing b^γ_α between points
    let chart = HyperbolicParaboloid { scale: 0.8 };
    let x = v(0.3, 0.55);
    let gp = GeometryPoint::new(&chart, &x).unwrap();
    let h = 1e-3;
    for b in 0..2 {
        let mut e = v(0.0, 0.0);
        e[b] = h;
        let bm = |s: f64| GeometryPoint::new(&chart, &(x + e * s)).unwrap().b_mixed;
        let d = (bm(-2.0) - bm(-1.0) * 8.0 + bm(1.0) * 8.0 - bm(2.0)) / (12.0 * h);
        for g in 0..2 {
            for a in 0..2 {
                assert_abs_diff_eq!(gp.db_partial[g][a][b], d[(g, a)], epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn finite_difference_fallback_accuracy() {
    let exact = SpherePatch { radius: 1.0 };
    let fd = NumericThird(SpherePatch { radius: 1.0 });
    let x = v(0.4, 0.3);
    let a = GeometryPoint::new(&exact, &x).unwrap();
    let b = GeometryPoint::new(&fd, &x).unwrap();
    assert!(b.numeric_third && !a.numeric_third);
    for g in 0..2 {
        for al in 0..2 {
            for be in 0..2 {
                assert!((a.db_partial[g][al][be] - b.db_partial[g][al][be]).abs() < 1e-8);
            }
        }
    }
    let p = PositionOnly(HyperbolicParaboloid { scale: 1.0 });
    let gp = GeometryPoint::new(&p, &v(1.0, 0.0)).unwrap();
    assert_abs_diff_eq!(gp.a_lower, Matrix2::new(1.0, 0.0, 0.0, 2.0), epsilon = 1e-9);
}

#[test]
fn rigid_isometry_invariance() {
    let rot = Rotation3::from_euler_angles(0.3, -1.1, 2.0);
    for spec in ChartSpec::all_builtin() {
        let base = spec.build::<f64>();
        let moved = RigidlyMoved {
            inner: spec.build::<f64>(),
            rotation: rot,
            translation: Vector3::new(1.0, -2.0, 0.5),
        };
        for &(x1, x2) in &[(0.2, 0.3), (0.8, 0.6)] {
            let a = GeometryPoint::new(base.as_ref(), &v(x1, x2)).unwrap();
            let b = GeometryPoint::new(&moved, &v(x1, x2)).unwrap();
            assert!((a.a_lower - b.a_lower).abs().max() < 1e-10);
            // orientation follows the rotated tangents, so b keeps its sign here
            assert!((a.b_lower - b.b_lower).abs().max() < 1e-10);
            assert!((a.c_lower - b.c_lower).abs().max() < 1e-10);
            for g in 0..2 {
                for al in 0..2 {
                    for be in 0..2 {
                        assert!((a.gamma[g][al][be] - b.gamma[g][al][be]).abs() < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn degenerate_immersion_is_reported() {
    struct Folded;
    impl Chart<f64> for Folded {
        fn name(&self) -> &str {
            "folded"
        }
        fn position(&self, x: &Vector2<f64>) -> Vector3<f64> {
            Vector3::new(x[0] + x[1], 2.0 * (x[0] + x[1]), 0.0)
        }
    }
    let err = GeometryPoint::new(&Folded, &v(0.1, 0.2)).unwrap_err();
    assert!(matches!(err, GeometryError::DegenerateImmersion { .. }));
}

#[test]
fn elastic_tensor_flat_values_and_symmetry() {
    let gp = GeometryPoint::new(&FlatPlate, &v(0.0, 0.0)).unwrap();
    let e = ElasticTensor::new(&gp, 1.0, 1.0).unwrap();
    let c = &e.components;
    assert_abs_diff_eq!(c[0][0][0][0], 8.0 / 3.0, epsilon = 1e-14);
    assert_abs_diff_eq!(c[0][0][1][1], 2.0 / 3.0, epsilon = 1e-14);
    assert_abs_diff_eq!(c[0][1][0][1], 1.0, epsilon = 1e-14);

    let chart = HyperbolicParaboloid { scale: 1.0 };
    let gp = GeometryPoint::new(&chart, &v(0.4, 0.9)).unwrap();
    let e = ElasticTensor::new(&gp, 0.7, 1.3).unwrap();
    let c = &e.components;
    for a in 0..2 {
        for b in 0..2 {
            for g in 0..2 {
                for d in 0..2 {
                    let x = c[a][b][g][d];
                    assert_abs_diff_eq!(x, c[b][a][g][d], epsilon = 1e-14);
                    assert_abs_diff_eq!(x, c[a][b][d][g], epsilon = 1e-14);
                    assert_abs_diff_eq!(x, c[g][d][a][b], epsilon = 1e-14);
                }
            }
        }
    }
    let s = Matrix2::new(0.3, -0.2, -0.2, 1.1);
    let t = Matrix2::new(-0.5, 0.4, 0.4, 0.2);
    let vs = nalgebra::Vector3::new(s[(0, 0)], s[(1, 1)], s[(0, 1)]);
    let vt = nalgebra::Vector3::new(t[(0, 0)], t[(1, 1)], t[(0, 1)]);
    assert_abs_diff_eq!(e.bilinear(&s, &t), vt.dot(&(e.voigt() * vs)), epsilon = 1e-13);
}

#[test]
fn elastic_tensor_lambda_zero_drops_coupling() {
    let chart = SpherePatch { radius: 1.0 };
    let gp = GeometryPoint::new(&chart, &v(0.3, 0.4)).unwrap();
    let e = ElasticTensor::new(&gp, 0.0, 2.0).unwrap();
    let a = gp.a_upper;
    for al in 0..2 {
        for be in 0..2 {
            for g in 0..2 {
                for d in 0..2 {
                    let want = 2.0 * (a[(al, g)] * a[(be, d)] + a[(be, g)] * a[(al, d)]);
                    assert_abs_diff_eq!(e.components[al][be][g][d], want, epsilon = 1e-14);
                }
            }
        }
    }
    assert!(ElasticTensor::new(&gp, 1.0, 0.0).is_err());
    assert!(ElasticTensor::new(&gp, -1.0, 1.0).is_err());
}

#[test]
fn elastic_tensor_positivity_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let chart = HyperbolicParaboloid { scale: 1.0 };
    let mu = 1.0;
    for _ in 0..20 {
        let x = v(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let gp = GeometryPoint::new(&chart, &x).unwrap();
        let e = ElasticTensor::new(&gp, 1.0, mu).unwrap();
        let lmin = gp.a_upper.symmetric_eigenvalues().min();
        for _ in 0..100 {
            let (p, q, r) = (
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let s = Matrix2::new(p, q, q, r);
            let sum_sq = p * p + 2.0 * q * q + r * r;
            assert!(e.quadratic(&s) >= 2.0 * mu * lmin * lmin * sum_sq * (1.0 - 1e-12));
        }
    }
}

#[test]
fn chart_spec_parsing() {
    assert_eq!(
        ChartSpec::parse("cylinder", &[("radius".into(), 2.0)]).unwrap(),
        ChartSpec::Cylinder { radius: 2.0 }
    );
    assert!(ChartSpec::parse("torus", &[]).is_err());
    assert!(ChartSpec::parse("flat", &[("radius".into(), 2.0)]).is_err());
}
