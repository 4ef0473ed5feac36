use rayon::prelude::*;

use super::{validate_points, SamplePoint};
use crate::error::InterpolationError;
use crate::grid::{Grid, GridHeader};

pub const DEFAULT_POWER: f64 = 2.0;
pub const DEFAULT_NEIGHBORS: usize = 12;

/// Distances below `COINCIDE_FRACTION * cellsize` snap to the sample value.
const COINCIDE_FRACTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwParams {
    pub power: f64,
    pub neighbors: usize,
}

impl Default for IdwParams {
    fn default() -> Self {
        IdwParams {
            power: DEFAULT_POWER,
            neighbors: DEFAULT_NEIGHBORS,
        }
    }
}

/// Inverse-distance-weighted surface over the k nearest samples of each cell center.
pub fn idw(
    points: &[SamplePoint],
    geometry: &GridHeader,
    params: IdwParams,
) -> Result<Grid, InterpolationError> {
    if points.is_empty() {
        return Err(InterpolationError::EmptyPointSet);
    }
    if !(params.power.is_finite() && params.power > 0.0) {
        return Err(InterpolationError::InvalidParameter(format!(
            "IDW power must be positive, got {}",
            params.power
        )));
    }
    if params.neighbors == 0 {
        return Err(InterpolationError::InvalidParameter(
            "IDW neighbor count must be at least 1".into(),
        ));
    }
    geometry.validate()?;
    validate_points(points)?;

    let eps = COINCIDE_FRACTION * geometry.cellsize;
    let k = params.neighbors.min(points.len());
    let ncols = geometry.ncols;
    let values: Vec<f64> = (0..geometry.len())
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(points.len()),
            |scratch: &mut Vec<(f64, usize)>, cell| {
                let (x, y) = geometry.cell_center(cell / ncols, cell % ncols);
                estimate(points, x, y, k, params.power, eps, scratch)
            },
        )
        .collect();
    Ok(Grid::new(*geometry, values)?)
}

fn estimate(
    points: &[SamplePoint],
    x: f64,
    y: f64,
    k: usize,
    power: f64,
    eps: f64,
    scratch: &mut Vec<(f64, usize)>,
) -> f64 {
    scratch.clear();
    scratch.extend(points.iter().enumerate().map(|(i, p)| (p.distance_to(x, y), i)));
    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scratch.len() {
        scratch.select_nth_unstable_by(k - 1, by_distance);
        scratch.truncate(k);
    }
    scratch.sort_unstable_by(by_distance);

    let (d0, i0) = scratch[0];
    if d0 < eps {
        return points[i0].value;
    }
    // Accumulate deviations from the nearest sample so equal inputs reproduce exactly.
    let base = points[i0].value;
    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(d, i) in scratch.iter() {
        let w = d.powf(-power);
        let z = points[i].value;
        num += w * (z - base);
        den += w;
        lo = lo.min(z);
        hi = hi.max(z);
    }
    (base + num / den).clamp(lo, hi)
}
