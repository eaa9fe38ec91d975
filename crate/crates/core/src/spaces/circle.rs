use std::f64::consts::{SQRT_2, TAU};

use super::{check_num_levels, DiscreteSpectrumSpace, Level, Point};
use crate::error::{Error, Result};

/// The unit circle, points given as angles.
///
/// Level 0 is the constant function; level `l ≥ 1` groups `√2 cos(lθ)` and
/// `√2 sin(lθ)` with eigenvalue `l²`, so `G_l(θ, θ') = 2 cos(l(θ - θ'))`.
#[derive(Debug, Clone)]
pub struct Circle {
    levels: Vec<Level>,
}

impl Circle {
    pub fn new(num_levels: usize) -> Result<Self> {
        check_num_levels(num_levels)?;
        let levels = (0..num_levels)
            .map(|l| Level {
                index: l,
                eigenvalue: (l * l) as f64,
                dimension: if l == 0 { 1 } else { 2 },
            })
            .collect();
        Ok(Circle { levels })
    }
}

fn angle(p: &Point) -> f64 {
    match p {
        Point::Angle(t) => *t,
        other => panic!("circle expects an angle, got {other:?}"),
    }
}

impl DiscreteSpectrumSpace for Circle {
    fn name(&self) -> &'static str {
        "circle"
    }

    fn dim_constant(&self) -> usize {
        1
    }

    fn levels(&self) -> &[Level] {
        &self.levels
    }

    fn validate_point(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Angle(t) if t.is_finite() => Ok(Point::Angle(t.rem_euclid(TAU))),
            Point::Angle(t) => Err(Error::point(format!("non-finite angle {t}"))),
            other => Err(Error::point(format!("circle expects an angle, got {other:?}"))),
        }
    }

    fn level_sums(&self, x: &Point, y: &Point) -> Vec<f64> {
        let d = angle(x) - angle(y);
        self.levels
            .iter()
            .map(|lv| {
                if lv.index == 0 {
                    1.0
                } else {
                    2.0 * (lv.index as f64 * d).cos()
                }
            })
            .collect()
    }

    fn eigenfunctions(&self, level: usize, x: &Point) -> Option<Vec<f64>> {
        let t = angle(x);
        Some(if level == 0 {
            vec![1.0]
        } else {
            let lt = level as f64 * t;
            vec![SQRT_2 * lt.cos(), SQRT_2 * lt.sin()]
        })
    }

    fn variance_probe(&self) -> Vec<(f64, Point)> {
        vec![(1.0, Point::Angle(0.0))]
    }
}
