mod common;

use std::f64::consts::PI;

use geokernels::{
    Circle, DiscreteSpectrumSpace, GraphData, GraphSpace, Hypersphere, MeshData, MeshSpace, Point, ProductSpace, Space,
    Su2,
};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn level_identity_error(space: &Space, pairs: &[(Point, Point)]) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, y) in pairs {
        let sums = space.level_sums(x, y);
        for (l, level) in space.levels().iter().enumerate() {
            let fx = space.eigenfunctions(l, x).expect("explicit eigenfunctions");
            let fy = space.eigenfunctions(l, y).expect("explicit eigenfunctions");
            assert_eq!(fx.len(), level.dimension);
            let direct: f64 = fx.iter().zip(&fy).map(|(a, b)| a * b).sum();
            worst = worst.max((sums[l] - direct).abs() / level.dimension as f64);
        }
    }
    worst
}

#[test]
fn level_identity_on_explicit_spaces() {
    let mut r = rng(21);
    let circle = Space::from(Circle::new(40).unwrap());
    let graph = Space::from(GraphSpace::new(&random_connected_graph(11, 5), None).unwrap());
    let mesh_data = icosphere(1);
    let mesh = Space::from(MeshSpace::new(&mesh_data, 30).unwrap());
    let product = Space::from(ProductSpace::new(vec![circle.clone(), graph.clone()], 60).unwrap());

    let angle = |r: &mut rand_chacha::ChaCha8Rng| Point::Angle(r.gen_range(0.0..2.0 * PI));
    let pairs: Vec<_> = (0..50).map(|_| (angle(&mut r), angle(&mut r))).collect();
    assert!(level_identity_error(&circle, &pairs) <= 1e-10);

    let pairs: Vec<_> = (0..50)
        .map(|_| (Point::Index(r.gen_range(0..11)), Point::Index(r.gen_range(0..11))))
        .collect();
    assert!(level_identity_error(&graph, &pairs) <= 1e-10);

    let nv = mesh_data.num_vertices();
    let pairs: Vec<_> = (0..50)
        .map(|_| (Point::Index(r.gen_range(0..nv)), Point::Index(r.gen_range(0..nv))))
        .collect();
    assert!(level_identity_error(&mesh, &pairs) <= 1e-10);

    let pairs: Vec<_> = (0..50)
        .map(|_| {
            (
                Point::Tuple(vec![angle(&mut r), Point::Index(r.gen_range(0..11))]),
                Point::Tuple(vec![angle(&mut r), Point::Index(r.gen_range(0..11))]),
            )
        })
        .collect();
    assert!(level_identity_error(&product, &pairs) <= 1e-10);
}

#[test]
fn sphere_level_sums_match_spherical_harmonics() {
    let sphere = Hypersphere::new(2, 11).unwrap();
    let mut r = rng(22);
    for _ in 0..50 {
        let (x, y) = (random_unit(3, &mut r), random_unit(3, &mut r));
        let sums = sphere.level_sums(&Point::Vector(x.clone()), &Point::Vector(y.clone()));
        for (l, g) in sums.iter().enumerate() {
            let (fx, fy) = (real_spherical_harmonics(l, &x), real_spherical_harmonics(l, &y));
            let direct: f64 = fx.iter().zip(&fy).map(|(a, b)| a * b).sum();
            assert!(
                (g - direct).abs() <= 1e-10 * (2 * l + 1) as f64,
                "l = {l}: {g} vs {direct}"
            );
        }
    }
}

#[test]
fn sphere_examples() {
    let s2 = Hypersphere::new(2, 5).unwrap();
    let dims: Vec<usize> = s2.levels().iter().map(|l| l.dimension).collect();
    assert_eq!(dims, vec![1, 3, 5, 7, 9]);
    let x = Point::Vector(vec![0.6, 0.0, 0.8]);
    assert!((s2.level_sums(&x, &x)[3] - 7.0).abs() < 1e-12);

    let s4 = Hypersphere::new(4, 4).unwrap();
    let levels = s4.levels();
    // λ = l(l+3); d = 1, 5, 14, 30 for harmonics on S⁴.
    assert_eq!(
        levels.iter().map(|l| l.eigenvalue).collect::<Vec<_>>(),
        vec![0.0, 4.0, 10.0, 18.0]
    );
    assert_eq!(
        levels.iter().map(|l| l.dimension).collect::<Vec<_>>(),
        vec![1, 5, 14, 30]
    );
    assert!(Hypersphere::new(1, 3).is_err());
    assert!(Hypersphere::new(2, 0).is_err());
}

#[test]
fn su2_examples() {
    let su2 = Su2::new(4).unwrap();
    assert_eq!(su2.eigenvalues(), vec![0.0, 3.0, 8.0, 15.0]);
    let id = Point::Quaternion([1.0, 0.0, 0.0, 0.0]);
    let sums = su2.level_sums(&id, &id);
    for (l, g) in sums.iter().enumerate() {
        assert!((g - ((l + 1) * (l + 1)) as f64).abs() < 1e-12);
    }
    // Antipodal points: θ = π, χ_l = (-1)^l (l+1).
    let minus = Point::Quaternion([-1.0, 0.0, 0.0, 0.0]);
    let sums = su2.level_sums(&id, &minus);
    for (l, g) in sums.iter().enumerate() {
        let expected = if l % 2 == 0 { 1.0 } else { -1.0 } * ((l + 1) * (l + 1)) as f64;
        assert!((g - expected).abs() < 1e-9, "l = {l}: {g}");
    }
    assert!(su2.validate_point(&Point::Quaternion([1.0, 1.0, 0.0, 0.0])).is_err());
}

#[test]
fn graph_eigenvectors_orthonormal_and_laplacian_psd() {
    for seed in 0..10 {
        let n = 3 + seed as usize;
        let space = GraphSpace::new(&random_connected_graph(n, seed), None).unwrap();
        let f = space.eigenvector_matrix();
        let gram = f.transpose() * f / n as f64;
        let err = (gram - nalgebra::DMatrix::<f64>::identity(n, n)).abs().max();
        assert!(err <= 1e-10, "seed {seed}: {err}");
        let eigs = space.eigenvalues();
        let max = eigs.iter().cloned().fold(0.0, f64::max);
        assert!(eigs.iter().all(|&l| l >= -1e-10 * max));
        assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        assert!(
            eigs[0].abs() < 1e-10 && eigs[1] > 1e-8,
            "connected graph has one zero eigenvalue"
        );
    }
}

#[test]
fn graph_examples() {
    let g = GraphData::new(2, vec![(0, 1, 1.0)]).unwrap();
    let space = GraphSpace::new(&g, None).unwrap();
    let eigs = space.eigenvalues();
    assert!(eigs[0].abs() < 1e-12 && (eigs[1] - 2.0).abs() < 1e-12);
    let f = space.eigenvector_matrix();
    assert!((f[(0, 0)] - f[(1, 0)]).abs() < 1e-12 && (f[(0, 0)].abs() - 1.0).abs() < 1e-12);
    assert!((f[(0, 1)] + f[(1, 1)]).abs() < 1e-12 && (f[(0, 1)].abs() - 1.0).abs() < 1e-12);

    // Two components plus an isolated node: three zero eigenvalues.
    let g = GraphData::new(5, vec![(0, 1, 1.0), (2, 3, 0.5)]).unwrap();
    let eigs = GraphSpace::new(&g, None).unwrap().eigenvalues();
    assert_eq!(eigs.iter().filter(|l| l.abs() < 1e-10).count(), 3);

    assert!(GraphSpace::new(&g, Some(6)).is_err());
    assert!(GraphData::new(3, vec![(0, 1, 1.0), (1, 0, 1.0)]).is_err());
    assert!(GraphData::new(3, vec![(0, 3, 1.0)]).is_err());
    assert!(GraphData::new(3, vec![(0, 1, f64::NAN)]).is_err());
}

#[test]
fn icosahedron_first_level_has_multiplicity_three() {
    let (v, f) = icosahedron();
    let mesh = MeshData::new(v, f).unwrap();
    let space = MeshSpace::new(&mesh, 12).unwrap();
    let eigs = space.eigenvalues();
    assert!(eigs[0].abs() < 1e-10);
    assert!((eigs[1] - eigs[2]).abs() < 1e-8 && (eigs[2] - eigs[3]).abs() < 1e-8);
    assert!(eigs[4] - eigs[3] > 1e-3);
    // Constant ground state with unit mass-weighted mean square.
    let f0 = space.eigenvector_matrix().column(0);
    assert!(f0.iter().all(|v| (v.abs() - 1.0).abs() < 1e-10));
}

#[test]
fn mesh_validation() {
    let (v, f) = icosahedron();
    let mut degenerate = f.clone();
    degenerate[0] = [0, 0, 5];
    assert!(MeshData::new(v.clone(), degenerate).is_err());
    let mut out_of_range = f.clone();
    out_of_range[0] = [0, 11, 12];
    assert!(MeshData::new(v.clone(), out_of_range).is_err());
    let mut extra = v.clone();
    extra.push([2.0, 0.0, 0.0]);
    assert!(MeshData::new(extra, f.clone()).is_err());
    let mesh = MeshData::new(v, f).unwrap();
    assert!(MeshSpace::new(&mesh, 13).is_err());
}

#[test]
fn product_examples() {
    let circles = || {
        vec![
            Space::from(Circle::new(4).unwrap()),
            Space::from(Circle::new(4).unwrap()),
        ]
    };
    let p = ProductSpace::new(circles(), 16).unwrap();
    assert_eq!(p.components(0), &[0, 0]);
    let lvl = (0..16).find(|&l| p.components(l) == [1, 2]).unwrap();
    assert_eq!(p.levels()[lvl].eigenvalue, 5.0);
    assert_eq!(p.levels()[lvl].dimension, 4);
    assert_eq!(p.dim_constant(), 2);
    let x = Point::Tuple(vec![Point::Angle(0.3), Point::Angle(1.1)]);
    assert_eq!(p.level_sums(&x, &x)[0], 1.0);

    // Ties broken lexicographically: (0,1) before (1,0).
    assert_eq!(p.components(1), &[0, 1]);
    assert_eq!(p.components(2), &[1, 0]);
    let eigs = p.eigenvalues();
    assert!(eigs.windows(2).all(|w| w[0] <= w[1]));

    let truncated = ProductSpace::new(circles(), 5).unwrap();
    assert_eq!(truncated.levels().len(), 5);
    assert!(ProductSpace::new(vec![Space::from(Circle::new(3).unwrap())], 3).is_err());
}

proptest! {
    #[test]
    fn level_sums_symmetric(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0) {
        prop_assume!(a * a + b * b > 1e-3 && c * c + d * d > 1e-3);
        let s2 = Hypersphere::new(2, 12).unwrap();
        let norm = |v: [f64; 3]| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            Point::Vector(v.iter().map(|x| x / n).collect())
        };
        let x = norm([a, b, 0.5]);
        let y = norm([c, d, -0.2]);
        prop_assert_eq!(s2.level_sums(&x, &y), s2.level_sums(&y, &x));
        let diag = s2.level_sums(&x, &x);
        for (l, g) in diag.iter().enumerate() {
            prop_assert!((g - (2 * l + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_points_renormalized_within_tolerance(scale in 1.0 - 9e-7f64..1.0 + 9e-7) {
        let s2 = Hypersphere::new(2, 3).unwrap();
        let p = s2.validate_point(&Point::Vector(vec![0.0, 0.0, scale])).unwrap();
        prop_assert_eq!(p, Point::Vector(vec![0.0, 0.0, 1.0]));
    }

    #[test]
    fn circle_angles_wrap(theta in -20.0f64..20.0) {
        let c = Circle::new(5).unwrap();
        let x = Point::Angle(theta);
        let y = Point::Angle(theta + 2.0 * PI);
        let (a, b) = (c.level_sums(&x, &Point::Angle(0.4)), c.level_sums(&y, &Point::Angle(0.4)));
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }
}
