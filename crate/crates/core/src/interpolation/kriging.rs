use log::warn;
use rayon::prelude::*;

use super::{validate_points, SamplePoint, VariogramModel};
use crate::error::InterpolationError;
use crate::grid::{Grid, GridHeader};

/// Pivot ratio above which the system is reported as ill-conditioned.
const CONDITION_WARNING: f64 = 1e12;

/// Ordinary kriging system over a global neighbourhood.
///
/// The `(n+1) x (n+1)` matrix `[[Γ, 1], [1ᵀ, 0]]` depends only on the sample
/// locations, so it is factorized once (LU with partial pivoting) and reused
/// for every prediction location.
#[derive(Debug, Clone)]
pub struct KrigingSystem {
    points: Vec<SamplePoint>,
    model: VariogramModel,
    matrix: Vec<f64>,
    lu: Vec<f64>,
    perm: Vec<usize>,
    ill_conditioned: bool,
}

impl KrigingSystem {
    pub fn new(points: &[SamplePoint], model: VariogramModel) -> Result<Self, InterpolationError> {
        if points.len() < 2 {
            return Err(InterpolationError::TooFewPoints {
                needed: 2,
                found: points.len(),
            });
        }
        model.validate()?;
        validate_points(points)?;

        let n = points.len();
        let dim = n + 1;
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&points[i], &points[j]);
                matrix[i * dim + j] = model.gamma(a.distance_to(b.x, b.y));
            }
            matrix[i * dim + n] = 1.0;
            matrix[n * dim + i] = 1.0;
        }
        let (lu, perm, ratio) = lu_factor(&matrix, dim).map_err(|column| {
            // Name the samples whose rows are (nearly) dependent on the failing column.
            let target = column.min(n - 1);
            let p = &points[target];
            let mut offenders: Vec<usize> = (0..n)
                .filter(|&j| j == target || matrix[target * dim..target * dim + n]
                    .iter()
                    .zip(&matrix[j * dim..j * dim + n])
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs())))
                .collect();
            if offenders.len() < 2 {
                offenders = (0..n)
                    .filter(|&j| points[j].distance_to(p.x, p.y) == 0.0)
                    .collect();
            }
            InterpolationError::SingularSystem {
                column,
                points: offenders,
            }
        })?;
        let ill_conditioned = ratio > CONDITION_WARNING;
        if ill_conditioned {
            warn!("kriging system is ill-conditioned (pivot ratio {ratio:.3e})");
        }
        Ok(KrigingSystem {
            points: points.to_vec(),
            model,
            matrix,
            lu,
            perm,
            ill_conditioned,
        })
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.ill_conditioned
    }

    pub fn model(&self) -> &VariogramModel {
        &self.model
    }

    /// Kriging weights `λ` at (x, y); the Lagrange multiplier is dropped.
    pub fn weights(&self, x: f64, y: f64) -> Vec<f64> {
        let n = self.points.len();
        let mut rhs: Vec<f64> = self
            .points
            .iter()
            .map(|p| self.model.gamma(p.distance_to(x, y)))
            .collect();
        rhs.push(1.0);
        let mut sol = lu_solve(&self.lu, &self.perm, &rhs);
        // one step of iterative refinement
        let dim = n + 1;
        let residual: Vec<f64> = (0..dim)
            .map(|i| {
                let row = &self.matrix[i * dim..(i + 1) * dim];
                rhs[i] - row.iter().zip(&sol).map(|(a, s)| a * s).sum::<f64>()
            })
            .collect();
        let correction = lu_solve(&self.lu, &self.perm, &residual);
        for (s, c) in sol.iter_mut().zip(correction) {
            *s += c;
        }
        sol.truncate(n);
        sol
    }

    pub fn predict(&self, x: f64, y: f64) -> f64 {
        self.weights(x, y)
            .iter()
            .zip(&self.points)
            .map(|(l, p)| l * p.value)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct KrigingOutput {
    pub grid: Grid,
    pub ill_conditioned: bool,
}

/// Ordinary kriging prediction at every cell center.
pub fn kriging(
    points: &[SamplePoint],
    geometry: &GridHeader,
    model: VariogramModel,
) -> Result<KrigingOutput, InterpolationError> {
    geometry.validate()?;
    let system = KrigingSystem::new(points, model)?;
    let ncols = geometry.ncols;
    let values: Vec<f64> = (0..geometry.len())
        .into_par_iter()
        .map(|cell| {
            let (x, y) = geometry.cell_center(cell / ncols, cell % ncols);
            system.predict(x, y)
        })
        .collect();
    Ok(KrigingOutput {
        grid: Grid::new(*geometry, values)?,
        ill_conditioned: system.is_ill_conditioned(),
    })
}

/// Kriging weights for a single location.
pub fn kriging_weights(
    points: &[SamplePoint],
    model: VariogramModel,
    x: f64,
    y: f64,
) -> Result<Vec<f64>, InterpolationError> {
    Ok(KrigingSystem::new(points, model)?.weights(x, y))
}

/// Doolittle LU with partial pivoting on a row-major `dim x dim` matrix.
/// Returns the packed factors, the row permutation and the max/min pivot
/// magnitude ratio, or the failing column.
fn lu_factor(a: &[f64], dim: usize) -> Result<(Vec<f64>, Vec<usize>, f64), usize> {
    let mut lu = a.to_vec();
    let mut perm: Vec<usize> = (0..dim).collect();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
    for k in 0..dim {
        let (p, pv) = (k..dim)
            .map(|r| (r, lu[r * dim + k].abs()))
            .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if pv <= 1e-13 * scale {
            return Err(k);
        }
        if p != k {
            for c in 0..dim {
                lu.swap(k * dim + c, p * dim + c);
            }
            perm.swap(k, p);
        }
        pmax = pmax.max(pv);
        pmin = pmin.min(pv);
        let pivot = lu[k * dim + k];
        for r in k + 1..dim {
            let f = lu[r * dim + k] / pivot;
            lu[r * dim + k] = f;
            if f != 0.0 {
                for c in k + 1..dim {
                    lu[r * dim + c] -= f * lu[k * dim + c];
                }
            }
        }
    }
    Ok((lu, perm, pmax / pmin))
}

fn lu_solve(lu: &[f64], perm: &[usize], b: &[f64]) -> Vec<f64> {
    let dim = perm.len();
    let mut y: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for r in 0..dim {
        let s: f64 = (0..r).map(|c| lu[r * dim + c] * y[c]).sum();
        y[r] -= s;
    }
    for r in (0..dim).rev() {
        let s: f64 = (r + 1..dim).map(|c| lu[r * dim + c] * y[c]).sum();
        y[r] = (y[r] - s) / lu[r * dim + r];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::VariogramShape;

    fn spherical() -> VariogramModel {
        VariogramModel::new(VariogramShape::Spherical, 0.0, 1.0, 50.0).unwrap()
    }

    #[test]
    fn exact_at_sample() {
        let pts = [
            SamplePoint::new(5.0, 25.0, 42.0),
            SamplePoint::new(22.0, 3.0, 7.0),
            SamplePoint::new(14.0, 17.0, -3.0),
        ];
        let geom = GridHeader::new(3, 3, 0.0, 0.0, 10.0, -9999.0).unwrap();
        let out = kriging(&pts, &geom, spherical()).unwrap();
        assert!((out.grid.get(0, 0).unwrap() - 42.0).abs() < 1e-6);
    }

    #[test]
    fn midpoint_of_two_samples() {
        let pts = [SamplePoint::new(0.0, 0.0, 0.0), SamplePoint::new(30.0, 40.0, 10.0)];
        for shape in [
            VariogramShape::Spherical,
            VariogramShape::Exponential,
            VariogramShape::Gaussian,
        ] {
            let m = VariogramModel::new(shape, 0.1, 2.0, 80.0).unwrap();
            let sys = KrigingSystem::new(&pts, m).unwrap();
            assert!((sys.predict(15.0, 20.0) - 5.0).abs() < 1e-6);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let pts: Vec<_> = (0..8)
            .map(|i| SamplePoint::new((i * 7 % 11) as f64 * 3.0, (i * 5 % 13) as f64 * 2.0, i as f64))
            .collect();
        let w = kriging_weights(&pts, spherical(), 4.5, 9.25).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duplicates_are_named() {
        let pts = [
            SamplePoint::new(1.0, 1.0, 0.0),
            SamplePoint::new(2.0, 2.0, 1.0),
            SamplePoint::new(1.0, 1.0, 2.0),
        ];
        match KrigingSystem::new(&pts, spherical()).unwrap_err() {
            InterpolationError::DuplicatePoint { first, second, .. } => assert_eq!((first, second), (0, 2)),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn lu_solves_small_system() {
        let a = [0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let (lu, perm, _) = lu_factor(&a, 3).unwrap();
        let x = lu_solve(&lu, &perm, &[3.0, 2.0, 4.0]);
        for (got, want) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(lu_factor(&[1.0, 2.0, 2.0, 4.0], 2).unwrap_err(), 1);
    }
}
