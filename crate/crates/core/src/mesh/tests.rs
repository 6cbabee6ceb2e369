use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

type M = Mesh<f64>;

fn v(x: f64, y: f64) -> Vector2<f64> {
    Vector2::new(x, y)
}

fn check_invariants(m: &M, area: f64) {
    assert!((m.total_area() - area).abs() <= 1e-12 * area);
    assert!(m.areas.iter().all(|&a| a > 0.0));
    for (i, e) in m.edges.iter().enumerate() {
        let [a, b] = m.edge_points(i);
        let side1 = m.triangles[e.elements.0];
        assert!(side1.contains(&e.vertices[0]) && side1.contains(&e.vertices[1]));
        if let Some(t2) = e.elements.1 {
            assert!(e.elements.0 < t2);
            let side2 = m.triangles[t2];
            assert!(side2.contains(&e.vertices[0]) && side2.contains(&e.vertices[1]));
        }
        // Normal points out of side 1.
        let probe = (a + b) * 0.5 + e.normal * (1e-6 * e.length);
        assert!(!m.contains(e.elements.0, &probe, 0.0));
        assert!((e.normal.dot(&e.tangent)).abs() < 1e-14);
        assert!((e.tangent.dot(&(b - a)).abs() - e.length).abs() < 1e-14);
    }
    for (t, edges) in m.triangle_edges.iter().enumerate() {
        for &e in edges {
            let edge = &m.edges[e];
            assert!(edge.elements.0 == t || edge.elements.1 == Some(t));
        }
    }
}

#[test]
fn single_cell_square() {
    let m = M::unit_square(1);
    assert_eq!(m.num_triangles(), 2);
    assert_eq!(m.interior_edges.len(), 1);
    let e = &m.edges[m.interior_edges[0]];
    assert!((e.length - 2f64.sqrt()).abs() < 1e-15);
    check_invariants(&m, 1.0);
}

#[test]
fn two_by_two_square() {
    let m = M::unit_square(2);
    assert_eq!(m.num_triangles(), 8);
    assert!((m.total_area() - 1.0).abs() < 1e-14);
    assert_eq!(m.euler_characteristic(), 1);
    check_invariants(&m, 1.0);
}

#[test]
fn l_shape_topology() {
    for n in 1..4 {
        let m = M::structured(n, Domain::LShape, Grading::None);
        assert_eq!(m.num_triangles(), 6 * n * n);
        assert_eq!(m.euler_characteristic(), 1);
        check_invariants(&m, 0.75);
    }
}

#[test]
fn graded_mesh_keeps_shape_but_not_size() {
    let flat = M::unit_square(4).shape_regularity().unwrap();
    let m = M::structured(4, Domain::UnitSquare, Grading::Geometric(0.5));
    check_invariants(&m, 1.0);
    assert_eq!(m.euler_characteristic(), 1);
    let r = m.shape_regularity().unwrap();
    assert!(r.kappa <= 1.2 * flat.kappa);
    assert!(r.quasi_uniformity >= 4.0, "ratio {}", r.quasi_uniformity);
    // Ratio grows with n.
    let finer = M::structured(8, Domain::UnitSquare, Grading::Geometric(0.5));
    assert!(finer.shape_regularity().unwrap().quasi_uniformity > r.quasi_uniformity);
}

#[test]
fn graded_l_shape_is_conforming() {
    let m = M::structured(2, Domain::LShape, Grading::Geometric(0.5));
    check_invariants(&m, 0.75);
    assert_eq!(m.euler_characteristic(), 1);
}

#[test]
fn red_refinement_preserves_similarity() {
    let m = M::unit_square(1);
    let r = m.refine_red();
    assert_eq!(r.num_triangles(), 8);
    check_invariants(&r, 1.0);
    let parent = m.shape_regularity().unwrap();
    let child = r.shape_regularity().unwrap();
    for (t, ratio) in child.ratios.iter().enumerate() {
        assert!((ratio - parent.ratios[t / 4]).abs() <= 1e-12);
    }
    assert!((child.min_angle - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!((r.max_h() - m.max_h() / 2.0).abs() < 1e-15);

    // A general triangle.
    let g = M::from_parts(
        vec![v(0.0, 0.0), v(1.0, 0.1), v(0.3, 0.8)],
        vec![[0, 1, 2]],
        &Default::default(),
    )
    .unwrap();
    let gr = g.refine_red().refine_red();
    let base = g.shape_regularity().unwrap().kappa;
    for ratio in gr.shape_regularity().unwrap().ratios {
        assert!((ratio - base).abs() <= 1e-12 * base);
    }
    let mut lengths: Vec<f64> = g.edges.iter().map(|e| e.length).collect();
    lengths.sort_by(f64::total_cmp);
    let child_lengths: Vec<f64> = g.refine_red().edges.iter().map(|e| e.length).collect();
    for l in child_lengths {
        assert!(lengths.iter().any(|p| (p / 2.0 - l).abs() < 1e-15));
    }
}

#[test]
fn shape_ratio_closed_forms() {
    let s3 = 3f64.sqrt();
    let eq = shape_ratio(&v(0.0, 0.0), &v(1.0, 0.0), &v(0.5, s3 / 2.0)).unwrap();
    assert!((eq - 2.0).abs() < 1e-14);
    // R = sqrt(2)/2, r = (2 - sqrt(2))/2.
    let r = (2.0 - 2f64.sqrt()) / 2.0;
    let expected = (2f64.sqrt() / 2.0) / r;
    let iso = shape_ratio(&v(0.0, 0.0), &v(1.0, 0.0), &v(0.0, 1.0)).unwrap();
    assert!((iso - expected).abs() < 1e-14);
    assert!((iso - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    let mut last = 0.0;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let thin = shape_ratio(&v(0.0, 0.0), &v(1.0, 0.0), &v(0.5, eps)).unwrap();
        assert!(thin > last);
        last = thin;
    }
    assert!(last > 1e6);
    assert!(shape_ratio(&v(0.0, 0.0), &v(1.0, 0.0), &v(2.0, 0.0)).is_none());
}

#[test]
fn shape_ratio_lower_bound_on_random_triangles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for _ in 0..200 {
        let p: Vec<Vector2<f64>> = (0..3)
            .map(|_| v(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if let Some(r) = shape_ratio(&p[0], &p[1], &p[2]) {
            assert!(r >= 2.0 - 1e-12);
        }
    }
}

#[test]
fn edge_length_bounds() {
    let g = M::structured(3, Domain::LShape, Grading::Geometric(0.6)).refine_red();
    for &e in &g.interior_edges {
        let edge = &g.edges[e];
        for t in [edge.elements.0, edge.elements.1.unwrap()] {
            assert!(edge.length <= g.diameters[t] + 1e-15);
            assert!(edge.length >= 2.0 * g.inradius(t));
        }
    }
}

#[test]
fn line_cut_counts_every_crossed_edge() {
    let line = Line::horizontal(0.5 + 1e-6);
    for n in [1, 2, 4, 8, 16] {
        let m = M::unit_square(n);
        // n + 1 vertical edges of length 1/n, n diagonals of length sqrt(2)/n.
        let expected = (n + 1) as f64 / n as f64 + 2f64.sqrt();
        assert!((m.line_cut_edge_sum(&line) - expected).abs() < 1e-12, "n = {n}");
    }
    let outside = Line::horizontal(2.0);
    assert_eq!(M::unit_square(4).line_cut_edge_sum(&outside), 0.0);
}

#[test]
fn line_through_vertex_is_perturbed() {
    let m = M::unit_square(4);
    let through = m.line_cut_edge_sum(&Line::horizontal(0.5));
    let nearby = m.line_cut_edge_sum(&Line::horizontal(0.5 + 1e-6));
    assert!((through - nearby).abs() < 1e-12);
}

#[test]
fn line_cut_bounded_under_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let coarse = M::structured(2, Domain::LShape, Grading::None);
    let meshes: Vec<M> = std::iter::successors(Some(coarse), |m| Some(m.refine_red()))
        .take(5)
        .collect();
    for _ in 0..20 {
        let angle = rng.random_range(0.0..std::f64::consts::PI);
        let line = Line::new(
            v(rng.random_range(0.1..0.9), rng.random_range(0.1..0.4)),
            v(angle.cos(), angle.sin()),
        );
        let base = meshes[0].line_cut_edge_sum(&line);
        for m in &meshes[1..] {
            assert!(m.line_cut_edge_sum(&line) <= 2.0 * base);
        }
    }
}

#[test]
fn boundary_strip_selection() {
    let m = M::unit_square(8);
    let all = m.boundary_strip_elements(2.0);
    assert_eq!(all.elements.len(), m.num_triangles());
    assert!(all.covers_domain);

    let strip = m.boundary_strip_elements(1.0 / 8.0);
    let touching: Vec<usize> = (0..m.num_triangles())
        .filter(|&t| {
            m.triangles[t].iter().any(|&i| {
                let p = m.vertices[i];
                p.x == 0.0 || p.y == 0.0 || p.x == 1.0 || p.y == 1.0
            })
        })
        .collect();
    assert_eq!(strip.elements, touching);
    assert!(!strip.covers_domain);
    // Exact strip of width 1/8 has measure 1 - (3/4)^2.
    let exact = 1.0 - 0.75f64.powi(2);
    assert!((strip.measure - exact).abs() <= 2.0 * 4.0 / 8.0 / 8.0 + 1e-12);

    let thin = m.boundary_strip_elements(1e-9);
    assert_eq!(thin.elements, touching);

    let half = m.boundary_strip_elements(1.0 / 16.0);
    assert!(half.elements.iter().all(|t| strip.elements.contains(t)));
}

#[test]
fn export_import_round_trip() {
    let m = M::unit_square(2);
    let partition = BoundaryPartition::uniform(&m, Marker::Simple);
    let (node, ele, edge) = export_mesh(&m, Some(&partition));
    assert!(node.starts_with("9 2 0 0\n"));
    assert!(ele.starts_with("8 3 1\n"));
    let back: M = import_mesh(&node, &ele, Some(&edge)).unwrap();
    assert_eq!(back.vertices, m.vertices);
    assert_eq!(back.triangles, m.triangles);
    assert_eq!(back.edges.len(), m.edges.len());
    let p = BoundaryPartition::new(&back, &BoundarySpec::FromMesh);
    assert_eq!(p.simple.len(), 8);
    assert!(p.dirichlet.is_empty());

    let graded = M::structured(2, Domain::LShape, Grading::Geometric(0.3));
    let (node, ele, _) = export_mesh(&graded, None);
    let back: M = import_mesh(&node, &ele, None).unwrap();
    assert_eq!(back.vertices, graded.vertices);
    assert_eq!(back.triangles, graded.triangles);
}

#[test]
fn file_round_trip() {
    let dir = std::env::temp_dir().join(format!("shellkorn-mesh-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let stem = dir.join("square");
    let m = M::unit_square(3);
    write_mesh_files(&m, None, &stem).unwrap();
    let back: M = read_mesh_files(&stem).unwrap();
    assert_eq!(back.vertices, m.vertices);
    assert_eq!(back.triangles, m.triangles);
    std::fs::remove_dir_all(&dir).unwrap();
}

const SQUARE_NODES: &str = "4 2 0 0\n1 0 0\n2 1 0\n3 1 1\n4 0 1\n";

#[test]
fn import_validation() {
    let missing = "2 3 1\n1 1 2 3 1\n2 1 3 5 1\n";
    assert!(matches!(
        import_mesh::<f64>(SQUARE_NODES, missing, None),
        Err(MeshError::Topology(_))
    ));
    let dup = "4 2 0 0\n1 0 0\n2 1 0\n3 1 1\n4 0 0\n";
    assert!(matches!(
        import_mesh::<f64>(dup, "1 3 1\n1 1 2 3 1\n", None),
        Err(MeshError::DuplicateVertex { a: 1, b: 4 })
    ));
    let ele = "2 3 1\n1 1 2 3 1\n2 1 3 4 1\n";
    assert!(matches!(
        import_mesh::<f64>(SQUARE_NODES, ele, Some("1 2 7\n")),
        Err(MeshError::UnknownMarker(7))
    ));
    assert!(matches!(
        import_mesh::<f64>(SQUARE_NODES, ele, Some("1 3 1\n")),
        Err(MeshError::Topology(_))
    ));
    // Hanging vertex: the square split in two, one half split again at the
    // midpoint of the diagonal.
    let nodes = "5 2 0 0\n1 0 0\n2 1 0\n3 1 1\n4 0 1\n5 0.5 0.5\n";
    let hanging = "3 3 1\n1 1 2 3 1\n2 1 5 4 1\n3 5 3 4 1\n";
    assert!(matches!(
        import_mesh::<f64>(nodes, hanging, None),
        Err(MeshError::Topology(_))
    ));
    // Clockwise input is reoriented.
    let cw = "2 3 1\n1 1 3 2 1\n2 1 4 3 1\n";
    let m = import_mesh::<f64>(SQUARE_NODES, cw, None).unwrap();
    check_invariants(&m, 1.0);
}

#[test]
fn markers_populate_partition() {
    let ele = "2 3 1\n1 1 2 3 1\n2 1 3 4 1\n";
    let edges = "1 2 1\n2 3 2\n3 4 3\n";
    let m = import_mesh::<f64>(SQUARE_NODES, ele, Some(edges)).unwrap();
    let p = BoundaryPartition::new(&m, &BoundarySpec::FromMesh);
    // Edge (4, 1) is unmarked and defaults to clamped.
    assert_eq!(p.dirichlet.len(), 2);
    assert_eq!(p.simple.len(), 1);
    assert_eq!(p.free.len(), 1);
    assert!((p.dirichlet_measure - 2.0).abs() < 1e-15);
    // Tags survive refinement.
    let r = m.refine_red();
    let p = BoundaryPartition::new(&r, &BoundarySpec::FromMesh);
    assert_eq!((p.dirichlet.len(), p.simple.len(), p.free.len()), (4, 2, 2));
}

#[test]
fn per_side_specification() {
    let spec: BoundarySpec = "west=D,east=F,south=S,north=F".parse().unwrap();
    assert_eq!(spec.to_string(), "west=D,east=F,south=S,north=F");
    let m = M::unit_square(4);
    let p = BoundaryPartition::new(&m, &spec);
    assert_eq!((p.dirichlet.len(), p.simple.len(), p.free.len()), (4, 4, 8));
    for &e in &p.dirichlet {
        let [a, b] = m.edge_points(e);
        assert!(a.x == 0.0 && b.x == 0.0);
    }
    assert_eq!("F".parse::<BoundarySpec>().unwrap(), BoundarySpec::Uniform(Marker::Free));
    assert!("up=D".parse::<BoundarySpec>().is_err());
    assert!("Q".parse::<BoundarySpec>().is_err());
    let free = BoundaryPartition::uniform(&m, Marker::Free);
    assert!(!free.has_dirichlet());
    assert_eq!(free.supported().len(), 0);
}

#[test]
fn stretched_meshes() {
    let base = M::stretched(2, 1.0, SplitPattern::CrissCross).unwrap();
    check_invariants(&base, 1.0);
    let k1 = base.shape_regularity().unwrap().kappa;
    assert!((k1 - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    let s8 = M::stretched(2, 8.0, SplitPattern::CrissCross).unwrap();
    check_invariants(&s8, 1.0);
    assert_eq!(s8.num_triangles(), 4 * 2 * 16);
    assert!(s8.shape_regularity().unwrap().kappa >= 4.0 * k1);
    // Diagonal cells: legs in ratio s, R/r = c/(1 + s - c) with c = sqrt(1 + s²).
    let d8 = M::stretched(2, 8.0, SplitPattern::Diagonal).unwrap();
    let c = 65f64.sqrt();
    assert!((d8.shape_regularity().unwrap().kappa - c / (9.0 - c)).abs() < 1e-12);
    assert!(M::stretched(2, 0.5, SplitPattern::Diagonal).is_err());
}

#[test]
fn single_precision_mesh() {
    let m = Mesh::<f32>::unit_square(4).refine_red();
    assert!((m.total_area() - 1.0).abs() < 1e-5);
    assert_eq!(m.euler_characteristic(), 1);
}
