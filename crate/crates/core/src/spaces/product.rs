use super::{check_num_levels, DiscreteSpectrumSpace, Level, Point, Space};
use crate::error::{Error, Result};

/// Cartesian product of discrete-spectrum spaces.
///
/// A product level is a tuple of factor levels `(l₁, ..., l_m)` with
/// `λ = Σ λ_{l_i}`, `d = Π d_{l_i}` and `G = Π G_{l_i}`. The `num_levels`
/// tuples with the smallest `λ` are kept, ties broken lexicographically.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    factors: Vec<Space>,
    levels: Vec<Level>,
    components: Vec<Vec<usize>>,
}

impl ProductSpace {
    /// `num_levels` larger than the full tuple grid keeps the whole grid.
    pub fn new(factors: Vec<Space>, num_levels: usize) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::domain("a product space needs at least two factors"));
        }
        check_num_levels(num_levels)?;

        let factor_eigs: Vec<Vec<f64>> = factors.iter().map(|f| f.eigenvalues()).collect();
        let grid_size = factor_eigs
            .iter()
            .try_fold(1usize, |acc, e| acc.checked_mul(e.len()))
            .ok_or_else(|| Error::domain("product level grid is too large"))?;

        // Odometer enumeration yields tuples in lexicographic order; the stable
        // sort then breaks eigenvalue ties lexicographically.
        let mut tuples = Vec::with_capacity(grid_size);
        let mut current = vec![0usize; factors.len()];
        for _ in 0..grid_size {
            let lambda: f64 = current.iter().zip(&factor_eigs).map(|(&l, e)| e[l]).sum();
            tuples.push((lambda, current.clone()));
            for k in (0..current.len()).rev() {
                current[k] += 1;
                if current[k] < factor_eigs[k].len() {
                    break;
                }
                current[k] = 0;
            }
        }
        tuples.sort_by(|a, b| a.0.total_cmp(&b.0));
        tuples.truncate(num_levels);

        let levels = tuples
            .iter()
            .enumerate()
            .map(|(index, (lambda, comp))| Level {
                index,
                eigenvalue: *lambda,
                dimension: comp
                    .iter()
                    .zip(&factors)
                    .map(|(&l, f)| f.levels()[l].dimension)
                    .product(),
            })
            .collect();
        Ok(ProductSpace {
            factors,
            levels,
            components: tuples.into_iter().map(|(_, c)| c).collect(),
        })
    }

    pub fn factors(&self) -> &[Space] {
        &self.factors
    }

    /// Factor level indices making up product level `level`.
    pub fn components(&self, level: usize) -> &[usize] {
        &self.components[level]
    }
}

fn tuple(p: &Point) -> &[Point] {
    match p {
        Point::Tuple(t) => t,
        other => panic!("product space expects a tuple point, got {other:?}"),
    }
}

/// Row-major Kronecker product of vectors.
pub(crate) fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

impl DiscreteSpectrumSpace for ProductSpace {
    fn name(&self) -> &'static str {
        "product"
    }

    fn dim_constant(&self) -> usize {
        self.factors.iter().map(|f| f.dim_constant()).sum()
    }

    fn levels(&self) -> &[Level] {
        &self.levels
    }

    fn validate_point(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Tuple(t) if t.len() == self.factors.len() => Ok(Point::Tuple(
                t.iter()
                    .zip(&self.factors)
                    .map(|(q, f)| f.validate_point(q))
                    .collect::<Result<_>>()?,
            )),
            Point::Tuple(t) => Err(Error::point(format!(
                "expected a tuple of {} factor points, got {}",
                self.factors.len(),
                t.len()
            ))),
            other => Err(Error::point(format!(
                "product space expects a tuple point, got {other:?}"
            ))),
        }
    }

    fn level_sums(&self, x: &Point, y: &Point) -> Vec<f64> {
        let (x, y) = (tuple(x), tuple(y));
        let factor_sums: Vec<Vec<f64>> = self
            .factors
            .iter()
            .enumerate()
            .map(|(k, f)| f.level_sums(&x[k], &y[k]))
            .collect();
        self.components
            .iter()
            .map(|comp| comp.iter().zip(&factor_sums).map(|(&l, g)| g[l]).product())
            .collect()
    }

    fn eigenfunctions(&self, level: usize, x: &Point) -> Option<Vec<f64>> {
        let x = tuple(x);
        let mut acc = vec![1.0];
        for ((f, &l), xi) in self.factors.iter().zip(&self.components[level]).zip(x) {
            acc = kron(&acc, &f.eigenfunctions(l, xi)?);
        }
        Some(acc)
    }

    /// Product of the factor measures.
    fn variance_probe(&self) -> Vec<(f64, Point)> {
        let mut acc: Vec<(f64, Vec<Point>)> = vec![(1.0, Vec::new())];
        for f in &self.factors {
            let probe = f.variance_probe();
            acc = acc
                .into_iter()
                .flat_map(|(w, pts)| {
                    probe.iter().map(move |(v, p)| {
                        let mut next = pts.clone();
                        next.push(p.clone());
                        (w * v, next)
                    })
                })
                .collect();
        }
        acc.into_iter().map(|(w, p)| (w, Point::Tuple(p))).collect()
    }

    fn mean_level_diagonal(&self) -> Vec<f64> {
        let factor_means: Vec<Vec<f64>> = self.factors.iter().map(|f| f.mean_level_diagonal()).collect();
        self.components
            .iter()
            .map(|comp| comp.iter().zip(&factor_means).map(|(&l, m)| m[l]).product())
            .collect()
    }
}
