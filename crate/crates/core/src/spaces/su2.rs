use super::hypersphere::{dot, random_unit_vectors};
use super::{check_num_levels, unit_vector, DiscreteSpectrumSpace, Level, Point, NORM_TOLERANCE};
use crate::error::{Error, Result};

/// The special unitary group SU(2) with points stored as unit quaternions.
///
/// Level `l` is the irreducible representation of dimension `l + 1`; its matrix
/// coefficients span `d_l = (l + 1)²` eigenfunctions with `λ_l = l(l + 2)` and
/// `G_l(x, y) = (l + 1) χ_l(x⁻¹y)`, where `χ_l(θ) = sin((l + 1)θ) / sin θ`.
/// The metric is the one that makes SU(2) isometric to the unit 3-sphere.
#[derive(Debug, Clone)]
pub struct Su2 {
    levels: Vec<Level>,
}

impl Su2 {
    pub fn new(num_levels: usize) -> Result<Self> {
        check_num_levels(num_levels)?;
        let levels = (0..num_levels)
            .map(|l| Level {
                index: l,
                eigenvalue: (l * (l + 2)) as f64,
                dimension: (l + 1) * (l + 1),
            })
            .collect();
        Ok(Su2 { levels })
    }

    /// Characters `χ_l(g)` of every retained irrep, given `trace(g) / 2`.
    pub fn characters(&self, half_trace: f64) -> Vec<f64> {
        let t = half_trace.clamp(-1.0, 1.0);
        // Near θ = π evaluate at ε = π - θ: χ_l(π - ε) = (-1)^l sin((l+1)ε) / sin ε.
        let (theta, flip) = if t < 0.0 {
            ((-t).acos(), true)
        } else {
            (t.acos(), false)
        };
        let s = theta.sin();
        self.levels
            .iter()
            .map(|lv| {
                let k = (lv.index + 1) as f64;
                let chi = if s == 0.0 { k } else { (k * theta).sin() / s };
                if flip && lv.index % 2 == 1 {
                    -chi
                } else {
                    chi
                }
            })
            .collect()
    }
}

/// Quaternion of a 2×2 complex matrix given as `[[(re, im); 2]; 2]`, checking
/// that it is unitary with determinant 1.
pub fn quaternion_from_matrix(m: [[(f64, f64); 2]; 2]) -> Result<Point> {
    let [[(a, b), (c, d)], [(e, f), (g, h)]] = m;
    // Form [[a+bi, c+di], [-c+di, a-bi]]
    let dev = (e + c).abs() + (f - d).abs() + (g - a).abs() + (h + b).abs();
    if dev > NORM_TOLERANCE {
        return Err(Error::point("matrix is not of the form [[α, β], [-β̄, ᾱ]]"));
    }
    let det = a * a + b * b + c * c + d * d;
    if (det - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::point(format!(
            "matrix is not unitary with det 1 (|α|²+|β|² = {det})"
        )));
    }
    let q = unit_vector(&[a, b, c, d])?;
    Ok(Point::Quaternion([q[0], q[1], q[2], q[3]]))
}

fn quaternion(p: &Point) -> &[f64; 4] {
    match p {
        Point::Quaternion(q) => q,
        other => panic!("SU(2) expects a quaternion, got {other:?}"),
    }
}

impl DiscreteSpectrumSpace for Su2 {
    fn name(&self) -> &'static str {
        "su2"
    }

    fn dim_constant(&self) -> usize {
        3
    }

    fn levels(&self) -> &[Level] {
        &self.levels
    }

    fn validate_point(&self, p: &Point) -> Result<Point> {
        let q = match p {
            Point::Quaternion(q) => q.to_vec(),
            Point::Vector(v) if v.len() == 4 => v.clone(),
            other => {
                return Err(Error::point(format!(
                    "SU(2) expects a quaternion (a, b, c, d), got {other:?}"
                )))
            }
        };
        let u = unit_vector(&q)?;
        Ok(Point::Quaternion([u[0], u[1], u[2], u[3]]))
    }

    fn level_sums(&self, x: &Point, y: &Point) -> Vec<f64> {
        // trace(x⁻¹ y) / 2 is the real part of conj(x)·y, i.e. the 4-vector dot product.
        let half_trace = dot(quaternion(x), quaternion(y));
        self.characters(half_trace)
            .into_iter()
            .zip(&self.levels)
            .map(|(chi, lv)| (lv.index + 1) as f64 * chi)
            .collect()
    }

    fn eigenfunctions(&self, _level: usize, _x: &Point) -> Option<Vec<f64>> {
        None
    }

    fn variance_probe(&self) -> Vec<(f64, Point)> {
        vec![(1.0, Point::Quaternion([1.0, 0.0, 0.0, 0.0]))]
    }

    fn design_points(&self, count: usize, seed: u64) -> Option<Vec<Point>> {
        Some(
            random_unit_vectors(4, count, seed)
                .into_iter()
                .map(|v| Point::Quaternion([v[0], v[1], v[2], v[3]]))
                .collect(),
        )
    }
}
