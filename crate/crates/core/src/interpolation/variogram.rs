use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SamplePoint;
use crate::error::InterpolationError;

/// Partial sill used when every empirical semivariance is zero.
pub const EPS_SILL: f64 = 1e-12;

const RANGE_CANDIDATES: usize = 240;
const RANGE_MIN_FACTOR: f64 = 0.02;
const RANGE_MAX_FACTOR: f64 = 5.0;
const REFINE_ITERATIONS: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagBin {
    pub center: f64,
    pub semivariance: f64,
    pub pair_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVariogram {
    pub bins: Vec<LagBin>,
}

impl EmpiricalVariogram {
    pub fn non_empty(&self) -> impl Iterator<Item = &LagBin> {
        self.bins.iter().filter(|b| b.pair_count > 0)
    }
}

/// Half mean squared difference of point pairs, binned by separation into
/// `n_lags` equal-width bins over `[0, max_dist]`.
pub fn empirical_variogram(
    points: &[SamplePoint],
    n_lags: usize,
    max_dist: f64,
) -> Result<EmpiricalVariogram, InterpolationError> {
    if points.len() < 2 {
        return Err(InterpolationError::TooFewPoints {
            needed: 2,
            found: points.len(),
        });
    }
    if n_lags == 0 {
        return Err(InterpolationError::InvalidParameter(
            "lag count must be at least 1".into(),
        ));
    }
    if !(max_dist.is_finite() && max_dist > 0.0) {
        return Err(InterpolationError::InvalidParameter(format!(
            "max_dist must be positive, got {max_dist}"
        )));
    }
    let width = max_dist / n_lags as f64;
    let mut contributions: Vec<Vec<f64>> = vec![Vec::new(); n_lags];
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let h = a.distance_to(b.x, b.y);
            if h > max_dist {
                continue;
            }
            let bin = ((h / width) as usize).min(n_lags - 1);
            let dz = a.value - b.value;
            contributions[bin].push(0.5 * dz * dz);
        }
    }
    // Sorting each bin makes the sums independent of input point order.
    let bins = contributions
        .into_iter()
        .enumerate()
        .map(|(b, mut c)| {
            c.sort_unstable_by(f64::total_cmp);
            let pair_count = c.len();
            let semivariance = if pair_count == 0 {
                0.0
            } else {
                c.iter().sum::<f64>() / pair_count as f64
            };
            LagBin {
                center: (b as f64 + 0.5) * width,
                semivariance,
                pair_count,
            }
        })
        .collect();
    Ok(EmpiricalVariogram { bins })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VariogramShape {
    #[default]
    Spherical,
    Exponential,
    Gaussian,
}

impl VariogramShape {
    /// Normalized structure function: 0 at the origin, 1 (or ~0.95 for the
    /// asymptotic shapes) at one range.
    fn structure(self, r: f64) -> f64 {
        match self {
            VariogramShape::Spherical => {
                if r >= 1.0 {
                    1.0
                } else {
                    1.5 * r - 0.5 * r * r * r
                }
            }
            VariogramShape::Exponential => 1.0 - (-3.0 * r).exp(),
            VariogramShape::Gaussian => 1.0 - (-3.0 * r * r).exp(),
        }
    }
}

impl fmt::Display for VariogramShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariogramShape::Spherical => "spherical",
            VariogramShape::Exponential => "exponential",
            VariogramShape::Gaussian => "gaussian",
        })
    }
}

impl FromStr for VariogramShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spherical" => Ok(VariogramShape::Spherical),
            "exponential" => Ok(VariogramShape::Exponential),
            "gaussian" => Ok(VariogramShape::Gaussian),
            other => Err(format!("unknown variogram shape '{other}'")),
        }
    }
}

/// Isotropic variogram model.
///
/// `gamma(0) = 0`; for `h > 0`, `gamma(h) = nugget + (sill - nugget) * f(h / range)`.
/// The exponential and gaussian shapes use the practical range (about 95% of
/// the partial sill is reached at `h = range`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariogramModel {
    pub shape: VariogramShape,
    pub nugget: f64,
    pub sill: f64,
    pub range: f64,
}

impl VariogramModel {
    pub fn new(
        shape: VariogramShape,
        nugget: f64,
        sill: f64,
        range: f64,
    ) -> Result<Self, InterpolationError> {
        let m = VariogramModel {
            shape,
            nugget,
            sill,
            range,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), InterpolationError> {
        if !(self.nugget.is_finite() && self.nugget >= 0.0) {
            return Err(InterpolationError::InvalidParameter(format!(
                "nugget must be >= 0, got {}",
                self.nugget
            )));
        }
        if !(self.sill.is_finite() && self.sill >= self.nugget) {
            return Err(InterpolationError::InvalidParameter(format!(
                "sill must be >= nugget, got sill {} nugget {}",
                self.sill, self.nugget
            )));
        }
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(InterpolationError::InvalidParameter(format!(
                "range must be positive, got {}",
                self.range
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn gamma(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        self.nugget + (self.sill - self.nugget) * self.shape.structure(h / self.range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitWarning {
    /// Every empirical semivariance was zero; the model is a placeholder.
    AllZeroSemivariance,
    /// Semivariance is flat across lags; range is unidentifiable and a pure
    /// nugget model was returned.
    FlatVariogram,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramFit {
    pub model: VariogramModel,
    pub weighted_sse: f64,
    pub warning: Option<FitWarning>,
}

/// Pair-count-weighted least-squares fit of `shape` to the non-empty bins.
///
/// Range is searched over a fixed geometric grid, with nugget and partial sill
/// solved in closed form at each candidate under `nugget >= 0`,
/// `sill >= nugget`. The best candidate is refined by golden-section search
/// between its grid neighbours.
pub fn fit_variogram(
    ev: &EmpiricalVariogram,
    shape: VariogramShape,
) -> Result<VariogramFit, InterpolationError> {
    let bins: Vec<LagBin> = ev.non_empty().copied().collect();
    if bins.len() < 3 {
        return Err(InterpolationError::TooFewBins(bins.len()));
    }
    let max_lag = bins.iter().map(|b| b.center).fold(0.0, f64::max);
    let (lo, hi) = bins.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
        (lo.min(b.semivariance), hi.max(b.semivariance))
    });

    if hi <= 0.0 {
        return Ok(VariogramFit {
            model: VariogramModel {
                shape,
                nugget: 0.0,
                sill: EPS_SILL,
                range: max_lag,
            },
            weighted_sse: 0.0,
            warning: Some(FitWarning::AllZeroSemivariance),
        });
    }
    if hi - lo <= 1e-12 * hi {
        let total: f64 = bins.iter().map(|b| b.pair_count as f64).sum();
        let mean = bins
            .iter()
            .map(|b| b.pair_count as f64 * b.semivariance)
            .sum::<f64>()
            / total;
        let model = VariogramModel {
            shape,
            nugget: mean,
            sill: mean,
            range: max_lag,
        };
        return Ok(VariogramFit {
            weighted_sse: weighted_sse(&bins, &model),
            model,
            warning: Some(FitWarning::FlatVariogram),
        });
    }

    let ranges: Vec<f64> = (0..RANGE_CANDIDATES)
        .map(|i| {
            let t = i as f64 / (RANGE_CANDIDATES - 1) as f64;
            let log = RANGE_MIN_FACTOR.ln() + t * (RANGE_MAX_FACTOR.ln() - RANGE_MIN_FACTOR.ln());
            max_lag * log.exp()
        })
        .collect();
    let mut best = (0usize, f64::INFINITY);
    for (i, &r) in ranges.iter().enumerate() {
        let (_, _, sse) = solve_linear_part(&bins, shape, r);
        if sse < best.1 {
            best = (i, sse);
        }
    }

    let mut a = ranges[best.0.saturating_sub(1)];
    let mut b = ranges[(best.0 + 1).min(RANGE_CANDIDATES - 1)];
    let objective = |r: f64| solve_linear_part(&bins, shape, r).2;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..REFINE_ITERATIONS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = objective(d);
        }
    }
    let mut range = 0.5 * (a + b);
    if objective(range) > best.1 {
        range = ranges[best.0];
    }
    let (nugget, partial, sse) = solve_linear_part(&bins, shape, range);
    Ok(VariogramFit {
        model: VariogramModel {
            shape,
            nugget,
            sill: nugget + partial,
            range,
        },
        weighted_sse: sse,
        warning: None,
    })
}

fn weighted_sse(bins: &[LagBin], model: &VariogramModel) -> f64 {
    bins.iter()
        .map(|b| {
            let e = model.gamma(b.center) - b.semivariance;
            b.pair_count as f64 * e * e
        })
        .sum()
}

/// Best non-negative `(nugget, partial_sill)` at a fixed range, and its weighted SSE.
fn solve_linear_part(bins: &[LagBin], shape: VariogramShape, range: f64) -> (f64, f64, f64) {
    let (mut sw, mut sf, mut sff, mut sg, mut sfg) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for b in bins {
        let w = b.pair_count as f64;
        let f = shape.structure(b.center / range);
        sw += w;
        sf += w * f;
        sff += w * f * f;
        sg += w * b.semivariance;
        sfg += w * f * b.semivariance;
    }
    let sse = |c0: f64, c1: f64| -> f64 {
        bins.iter()
            .map(|b| {
                let e = c0 + c1 * shape.structure(b.center / range) - b.semivariance;
                b.pair_count as f64 * e * e
            })
            .sum()
    };

    let det = sw * sff - sf * sf;
    if det.abs() > 1e-12 * sw * sff {
        let c0 = (sff * sg - sf * sfg) / det;
        let c1 = (sw * sfg - sf * sg) / det;
        if c0 >= 0.0 && c1 >= 0.0 {
            return (c0, c1, sse(c0, c1));
        }
    }
    let mut candidates = Vec::with_capacity(3);
    if sff > 0.0 {
        let c1 = (sfg / sff).max(0.0);
        candidates.push((0.0, c1));
    }
    candidates.push(((sg / sw).max(0.0), 0.0));
    candidates
        .into_iter()
        .map(|(c0, c1)| (c0, c1, sse(c0, c1)))
        .fold((0.0, 0.0, f64::INFINITY), |best, c| if c.2 < best.2 { c } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(model: &VariogramModel, lags: usize, step: f64) -> EmpiricalVariogram {
        EmpiricalVariogram {
            bins: (1..=lags)
                .map(|i| {
                    let h = i as f64 * step;
                    LagBin {
                        center: h,
                        semivariance: model.gamma(h),
                        pair_count: 10 + i,
                    }
                })
                .collect(),
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn two_point_semivariance() {
        let pts = [SamplePoint::new(0.0, 0.0, 1.0), SamplePoint::new(3.0, 4.0, 3.0)];
        let ev = empirical_variogram(&pts, 1, 10.0).unwrap();
        assert_eq!(ev.bins.len(), 1);
        assert_eq!(ev.bins[0].semivariance, 2.0);
        assert_eq!(ev.bins[0].pair_count, 1);
    }

    #[test]
    fn constant_values_give_zero_semivariance() {
        let pts: Vec<_> = (0..6).map(|i| SamplePoint::new(i as f64, (i * i) as f64, 4.0)).collect();
        let ev = empirical_variogram(&pts, 4, 40.0).unwrap();
        assert!(ev.bins.iter().all(|b| b.semivariance == 0.0));
    }

    #[test]
    fn far_pairs_leave_bins_empty() {
        let pts = [SamplePoint::new(0.0, 0.0, 1.0), SamplePoint::new(100.0, 0.0, 3.0)];
        let ev = empirical_variogram(&pts, 3, 10.0).unwrap();
        assert!(ev.bins.iter().all(|b| b.pair_count == 0));
        assert!(empirical_variogram(&pts[..1], 3, 10.0).is_err());
    }

    #[test]
    fn recovers_generating_models() {
        for shape in [
            VariogramShape::Spherical,
            VariogramShape::Exponential,
            VariogramShape::Gaussian,
        ] {
            let truth = VariogramModel::new(shape, 0.0, 1.0, 100.0).unwrap();
            let ev = synthetic(&truth, 10, 12.0);
            let fit = fit_variogram(&ev, shape).unwrap();
            assert!(fit.warning.is_none());
            assert!(fit.model.nugget.abs() < 0.01, "{shape}: {:?}", fit.model);
            assert!(rel(fit.model.sill, 1.0) < 0.01, "{shape}: {:?}", fit.model);
            assert!(rel(fit.model.range, 100.0) < 0.01, "{shape}: {:?}", fit.model);
        }
    }

    #[test]
    fn flat_variogram_falls_back_to_pure_nugget() {
        let ev = EmpiricalVariogram {
            bins: (1..=5)
                .map(|i| LagBin {
                    center: i as f64,
                    semivariance: 2.5,
                    pair_count: 3,
                })
                .collect(),
        };
        let fit = fit_variogram(&ev, VariogramShape::Spherical).unwrap();
        assert_eq!(fit.warning, Some(FitWarning::FlatVariogram));
        assert_eq!(fit.model.nugget, 2.5);
        assert_eq!(fit.model.sill, 2.5);
        assert_eq!(fit.model.range, 5.0);
    }

    #[test]
    fn all_zero_variogram() {
        let ev = EmpiricalVariogram {
            bins: (1..=4)
                .map(|i| LagBin {
                    center: i as f64 * 2.0,
                    semivariance: 0.0,
                    pair_count: 1,
                })
                .collect(),
        };
        let fit = fit_variogram(&ev, VariogramShape::Gaussian).unwrap();
        assert_eq!(fit.warning, Some(FitWarning::AllZeroSemivariance));
        assert_eq!(fit.model.nugget, 0.0);
        assert_eq!(fit.model.sill, EPS_SILL);
        assert_eq!(fit.model.range, 8.0);
    }

    #[test]
    fn too_few_bins() {
        let ev = EmpiricalVariogram {
            bins: vec![
                LagBin { center: 1.0, semivariance: 1.0, pair_count: 1 },
                LagBin { center: 2.0, semivariance: 2.0, pair_count: 0 },
                LagBin { center: 3.0, semivariance: 2.0, pair_count: 4 },
            ],
        };
        assert!(matches!(
            fit_variogram(&ev, VariogramShape::Spherical),
            Err(InterpolationError::TooFewBins(2))
        ));
    }

    #[test]
    fn model_monotone_and_bounded() {
        for shape in [
            VariogramShape::Spherical,
            VariogramShape::Exponential,
            VariogramShape::Gaussian,
        ] {
            let m = VariogramModel::new(shape, 0.3, 2.0, 50.0).unwrap();
            assert_eq!(m.gamma(0.0), 0.0);
            let mut prev = 0.0;
            for i in 1..500 {
                let g = m.gamma(i as f64);
                assert!(g >= prev && g <= 2.0 + 1e-12);
                prev = g;
            }
            assert!((m.gamma(1e6) - 2.0).abs() < 1e-9);
        }
        assert!(VariogramModel::new(VariogramShape::Spherical, 2.0, 1.0, 5.0).is_err());
    }
}
