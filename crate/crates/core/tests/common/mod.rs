//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use geokernels::{GraphData, MeshData, Point};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre on [a, b].
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            rule.iter().map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// `∫₀^∞ u^{ν-1+n/2} e^{-2νu/κ²} e^{-λu} du / Γ(ν + n/2)` by quadrature after `u = t²`.
pub fn matern_quadrature(lambda: f64, nu: f64, kappa: f64, n: usize) -> f64 {
    let a = nu + 0.5 * n as f64;
    let c = 2.0 * nu / (kappa * kappa) + lambda;
    let upper = (80.0 / c).sqrt();
    let integrand = |t: f64| 2.0 * t.powf(2.0 * a - 1.0) * (-c * t * t).exp();
    integrate(integrand, 0.0, upper, 64, 20) / statrs::function::gamma::gamma(a)
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.abs().row_sum().max();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(s);
    let n = a.nrows();
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..40 {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Connected graph on `n` nodes: random spanning tree plus extra random edges.
pub fn random_connected_graph(n: usize, seed: u64) -> GraphData {
    let mut r = rng(seed);
    let mut edges = HashMap::new();
    for i in 1..n {
        let j = r.gen_range(0..i);
        edges.insert((j, i), r.gen_range(0.1..2.0));
    }
    for _ in 0..n {
        let i = r.gen_range(0..n);
        let j = r.gen_range(0..n);
        if i != j {
            edges
                .entry((i.min(j), i.max(j)))
                .or_insert_with(|| r.gen_range(0.1..2.0));
        }
    }
    let mut list: Vec<_> = edges.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    list.sort_by_key(|e| (e.0, e.1));
    GraphData::new(n, list).unwrap()
}

pub fn random_unit(dim: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(r)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

pub fn random_sphere_point(dim: usize, r: &mut ChaCha8Rng) -> Point {
    Point::Vector(random_unit(dim + 1, r))
}

pub fn random_quaternion(r: &mut ChaCha8Rng) -> Point {
    let v = random_unit(4, r);
    Point::Quaternion([v[0], v[1], v[2], v[3]])
}

/// Real spherical harmonics of degree `l` on S², normalized for the uniform
/// probability measure (so their pairwise sum is `(2l+1) P_l(⟨x, y⟩)`).
pub fn real_spherical_harmonics(l: usize, x: &[f64]) -> Vec<f64> {
    let z = x[2].clamp(-1.0, 1.0);
    let phi = x[1].atan2(x[0]);
    let sin_theta = (1.0 - z * z).max(0.0).sqrt();
    let mut out = Vec::with_capacity(2 * l + 1);
    for m in 0..=l {
        let plm = associated_legendre(l, m, z, sin_theta);
        let ratio: f64 = ((l - m + 1)..=(l + m)).map(|k| k as f64).product();
        let norm = ((2 * l + 1) as f64 / ratio).sqrt();
        if m == 0 {
            out.push(norm * plm);
        } else {
            let c = 2f64.sqrt() * norm * plm;
            out.push(c * (m as f64 * phi).cos());
            out.push(c * (m as f64 * phi).sin());
        }
    }
    out
}

fn associated_legendre(l: usize, m: usize, x: f64, s: f64) -> f64 {
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    let mut pm0 = pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * pm1 - (ll + m - 1) as f64 * pm0) / (ll - m) as f64;
        pm0 = pm1;
        pm1 = next;
    }
    pm1
}

/// Periodized Gaussian `Σ_{|j| ≤ 10} exp(-(d + 2πj)² / (2κ²))`.
pub fn wrapped_gaussian(d: f64, kappa: f64) -> f64 {
    (-10..=10)
        .map(|j| {
            let e = d + 2.0 * PI * j as f64;
            (-e * e / (2.0 * kappa * kappa)).exp()
        })
        .sum()
}

pub fn icosahedron() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let vertices = raw.iter().map(|v| normalize(*v)).collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, faces)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Icosphere: icosahedron with `depth` rounds of 4-to-1 subdivision, projected to S².
pub fn icosphere(depth: usize) -> MeshData {
    let (mut vertices, mut faces) = icosahedron();
    for _ in 0..depth {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                vertices.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    MeshData::new(vertices, faces).unwrap()
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}
