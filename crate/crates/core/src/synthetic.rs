//! Deterministic synthetic basin: physical DRASTIC layers, land use,
//! interpolation samples and wells whose nitrate exceedance is planted with a
//! probability that rises with the planted vulnerability index.
//!
//! All randomness comes from [`SplitMix64`], so outputs depend only on the
//! scenario and are identical across platforms and thread counts.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::classification::{apply_rating, standard_schemes, RatingEntries, RatingScheme};
use crate::error::SyntheticError;
use crate::grid::{weighted_sum, write_ascii_grid, Grid, GridHeader};
use crate::interpolation::{write_points_csv, SamplePoint};
use crate::mcda::reference::{DRASTIC_LU_PARAMETERS, DRASTIC_LU_WEIGHTS};
use crate::validation::{write_observations_csv, Observation, NITRATE_THRESHOLD_MG_L};

/// SplitMix64 (Steele, Lea & Flood 2014): state += 0x9E3779B97F4A7C15, then
/// two xor-shift-multiply rounds. Floats take the top 53 bits.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Spatial structure of one physical layer on the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub parameter: String,
    /// Direction of the regional gradient, degrees counter-clockwise from east.
    pub trend_angle_deg: f64,
    /// Amplitude of the smooth random anomalies, as a fraction of the value range.
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScenario {
    pub seed: u64,
    pub geometry: GridHeader,
    pub layers: Vec<LayerSpec>,
    pub wells: usize,
    pub depth_samples: usize,
    pub recharge_samples: usize,
    /// Logistic slope per standard deviation of the planted index.
    /// `f64::INFINITY` makes exceedance a deterministic threshold.
    pub steepness: f64,
    /// Weights of the planted index, in land-use-extended parameter order.
    pub planted_weights: [f64; 8],
    /// Restrict valid cells to the inscribed ellipse.
    pub basin_mask: bool,
}

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_STEEPNESS: f64 = 8.0;

impl Default for SyntheticScenario {
    fn default() -> Self {
        let angles = [200.0, 120.0, 60.0, 330.0, 15.0, 250.0, 170.0, 90.0];
        SyntheticScenario {
            seed: DEFAULT_SEED,
            geometry: GridHeader::new(200, 200, 0.0, 0.0, 50.0, -9999.0)
                .expect("default geometry is valid"),
            layers: DRASTIC_LU_PARAMETERS
                .iter()
                .zip(angles)
                .map(|(p, a)| LayerSpec {
                    parameter: p.to_string(),
                    trend_angle_deg: a,
                    noise: 0.25,
                })
                .collect(),
            wells: 70,
            depth_samples: 19,
            recharge_samples: 30,
            steepness: DEFAULT_STEEPNESS,
            planted_weights: DRASTIC_LU_WEIGHTS,
            basin_mask: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    /// Physical (unrated) layers keyed by parameter.
    pub layers: BTreeMap<String, Grid>,
    pub planted_vi: Grid,
    pub depth_samples: Vec<SamplePoint>,
    pub recharge_samples: Vec<SamplePoint>,
    pub observations: Vec<Observation>,
}

const BUMPS_PER_LAYER: usize = 6;

struct Bump {
    cx: f64,
    cy: f64,
    width: f64,
    amplitude: f64,
}

pub fn generate(scenario: &SyntheticScenario) -> Result<SyntheticData, SyntheticError> {
    let geom = scenario.geometry;
    geom.validate()?;
    if geom.ncols < 2 || geom.nrows < 2 {
        return Err(SyntheticError::Degenerate("grid must be at least 2x2".into()));
    }
    if scenario.wells == 0 {
        return Err(SyntheticError::Degenerate("well count must be positive".into()));
    }
    if scenario.steepness.is_nan() || scenario.steepness < 0.0 {
        return Err(SyntheticError::Degenerate("steepness must be >= 0".into()));
    }
    let schemes: BTreeMap<String, RatingScheme> = standard_schemes()
        .into_iter()
        .map(|s| (s.parameter.clone(), s))
        .collect();
    for p in DRASTIC_LU_PARAMETERS {
        if !scenario.layers.iter().any(|l| l.parameter == p) {
            return Err(SyntheticError::Degenerate(format!("no layer spec for {p}")));
        }
    }

    let mut rng = SplitMix64::new(scenario.seed);
    let mask = basin_mask(&geom, scenario.basin_mask);
    if !mask.iter().any(|m| *m) {
        return Err(SyntheticError::Degenerate("basin mask is empty".into()));
    }

    let mut layers = BTreeMap::new();
    for p in DRASTIC_LU_PARAMETERS {
        let spec = scenario.layers.iter().find(|l| l.parameter == p).unwrap();
        let grid = physical_layer(&geom, &mask, spec, &schemes[p], &mut rng)?;
        layers.insert(p.to_string(), grid);
    }

    let mut rated = Vec::with_capacity(8);
    for p in DRASTIC_LU_PARAMETERS {
        rated.push(apply_rating(&layers[p], &schemes[p])?.grid);
    }
    let weighted: Vec<(&Grid, f64)> = rated
        .iter()
        .zip(scenario.planted_weights)
        .collect();
    let planted_vi = weighted_sum(&weighted)?;

    let (mean, sd) = mean_sd(planted_vi.valid_values());
    let sd = if sd > 0.0 { sd } else { 1.0 };

    let mut occupied = Vec::new();
    let depth_samples = sample_points(&geom, &mask, &layers["D"], scenario.depth_samples, &mut occupied, &mut rng);
    let recharge_samples = sample_points(&geom, &mask, &layers["R"], scenario.recharge_samples, &mut occupied, &mut rng);

    let well_sites = sample_points(&geom, &mask, &planted_vi, scenario.wells, &mut occupied, &mut rng);
    let observations = well_sites
        .iter()
        .map(|site| {
            let z = (site.value - mean) / sd;
            let p = if scenario.steepness.is_infinite() {
                if z > 0.0 { 1.0 } else { 0.0 }
            } else {
                1.0 / (1.0 + (-scenario.steepness * z).exp())
            };
            let draw = rng.next_f64();
            let level = rng.next_f64();
            let nitrate = if draw < p {
                NITRATE_THRESHOLD_MG_L + 1.0 + 249.0 * level
            } else {
                (NITRATE_THRESHOLD_MG_L - 0.5) * level
            };
            Observation::new(site.x, site.y, round_to(nitrate, 10.0))
        })
        .collect();

    Ok(SyntheticData {
        layers,
        planted_vi,
        depth_samples,
        recharge_samples,
        observations,
    })
}

impl SyntheticData {
    /// Writes `<P>.asc` per layer, `planted_vi.asc`, `depth_samples.csv`,
    /// `recharge_samples.csv` and `wells.csv`; returns the paths written.
    pub fn write_files(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (p, g) in &self.layers {
            let path = dir.join(format!("{p}.asc"));
            fs::write(&path, write_ascii_grid(g))?;
            written.push(path);
        }
        let path = dir.join("planted_vi.asc");
        fs::write(&path, write_ascii_grid(&self.planted_vi))?;
        written.push(path);
        for (name, pts) in [
            ("depth_samples.csv", &self.depth_samples),
            ("recharge_samples.csv", &self.recharge_samples),
        ] {
            let path = dir.join(name);
            write_points_csv(fs::File::create(&path)?, pts).map_err(io::Error::other)?;
            written.push(path);
        }
        let path = dir.join("wells.csv");
        write_observations_csv(fs::File::create(&path)?, &self.observations)
            .map_err(io::Error::other)?;
        written.push(path);
        Ok(written)
    }
}

fn basin_mask(geom: &GridHeader, enabled: bool) -> Vec<bool> {
    (0..geom.len())
        .map(|i| {
            if !enabled {
                return true;
            }
            let (u, v) = unit_coords(geom, i);
            let (dx, dy) = ((u - 0.5) / 0.49, (v - 0.5) / 0.47);
            dx * dx + dy * dy <= 1.0
        })
        .collect()
}

/// Cell-center position on the unit square, v pointing north.
fn unit_coords(geom: &GridHeader, cell: usize) -> (f64, f64) {
    let (row, col) = (cell / geom.ncols, cell % geom.ncols);
    let u = (col as f64 + 0.5) / geom.ncols as f64;
    let v = 1.0 - (row as f64 + 0.5) / geom.nrows as f64;
    (u, v)
}

fn value_span(scheme: &RatingScheme) -> Span {
    match &scheme.entries {
        RatingEntries::Continuous(e) => Span::Continuous {
            lo: e.first().unwrap().lower,
            hi: e.last().unwrap().upper,
        },
        RatingEntries::Categorical(e) => Span::Categorical(e.iter().map(|c| c.code).collect()),
    }
}

enum Span {
    Continuous { lo: f64, hi: f64 },
    Categorical(Vec<i64>),
}

fn physical_layer(
    geom: &GridHeader,
    mask: &[bool],
    spec: &LayerSpec,
    scheme: &RatingScheme,
    rng: &mut SplitMix64,
) -> Result<Grid, SyntheticError> {
    let bumps: Vec<Bump> = (0..BUMPS_PER_LAYER)
        .map(|_| Bump {
            cx: rng.next_f64(),
            cy: rng.next_f64(),
            width: rng.uniform(0.08, 0.25),
            amplitude: rng.uniform(-1.0, 1.0) * spec.noise,
        })
        .collect();
    let (ca, sa) = {
        let a = spec.trend_angle_deg.to_radians();
        (a.cos(), a.sin())
    };
    let span = value_span(scheme);
    let mut values = Vec::with_capacity(geom.len());
    for (cell, &inside) in mask.iter().enumerate() {
        // white noise is drawn for every cell to keep the stream independent of the mask
        let jitter = rng.uniform(-0.5, 0.5) * spec.noise * 0.2;
        if !inside {
            values.push(geom.nodata_value);
            continue;
        }
        let (u, v) = unit_coords(geom, cell);
        let trend = 0.5 + 0.65 * ((u - 0.5) * ca + (v - 0.5) * sa);
        let anomaly: f64 = bumps
            .iter()
            .map(|b| {
                let d2 = (u - b.cx).powi(2) + (v - b.cy).powi(2);
                b.amplitude * (-d2 / (2.0 * b.width * b.width)).exp()
            })
            .sum();
        let f = (trend + anomaly + jitter).clamp(0.0, 1.0);
        let value = match &span {
            Span::Continuous { lo, hi } => {
                let raw = lo + f * (hi - lo);
                let scale = decimal_scale(*hi);
                round_to(raw, scale).clamp(*lo, *hi)
            }
            Span::Categorical(codes) => {
                let idx = ((f * codes.len() as f64) as usize).min(codes.len() - 1);
                codes[idx] as f64
            }
        };
        values.push(value);
    }
    Ok(Grid::new(*geom, values)?)
}

/// Four significant digits relative to the upper end of the range.
fn decimal_scale(hi: f64) -> f64 {
    let digits = 3 - hi.abs().log10().floor() as i32;
    10f64.powi(digits.max(0))
}

fn round_to(x: f64, scale: f64) -> f64 {
    (x * scale).round() / scale
}

fn mean_sd(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Random points on distinct valid cells, snapped to cell centers, carrying
/// the value of `source` there.
fn sample_points(
    geom: &GridHeader,
    mask: &[bool],
    source: &Grid,
    count: usize,
    occupied: &mut Vec<usize>,
    rng: &mut SplitMix64,
) -> Vec<SamplePoint> {
    let available = mask.iter().filter(|m| **m).count();
    let mut out = Vec::with_capacity(count);
    while out.len() < count && occupied.len() < available {
        let cell = (rng.next_u64() % geom.len() as u64) as usize;
        if !mask[cell] || occupied.contains(&cell) {
            continue;
        }
        occupied.push(cell);
        let (row, col) = (cell / geom.ncols, cell % geom.ncols);
        let (x, y) = geom.cell_center(row, col);
        let value = source.get(row, col).expect("masked cells are valid");
        out.push(SamplePoint::new(x, y, value));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SyntheticScenario {
        SyntheticScenario {
            geometry: GridHeader::new(40, 30, 1000.0, 2000.0, 25.0, -9999.0).unwrap(),
            ..SyntheticScenario::default()
        }
    }

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 0 of the published SplitMix64 reference.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.layers, b.layers);
        assert_eq!(a.observations, b.observations);
        let c = generate(&SyntheticScenario { seed: 7, ..small() }).unwrap();
        assert_ne!(a.observations, c.observations);
    }

    #[test]
    fn layers_fit_rating_tables() {
        let data = generate(&small()).unwrap();
        for scheme in standard_schemes() {
            let rated = apply_rating(&data.layers[&scheme.parameter], &scheme).unwrap();
            assert_eq!(rated.out_of_range, 0, "{}", scheme.parameter);
        }
        assert_eq!(data.observations.len(), 70);
        assert_eq!(data.depth_samples.len(), 19);
    }

    #[test]
    fn rejects_degenerate_scenarios() {
        let s = SyntheticScenario {
            geometry: GridHeader::new(1, 5, 0.0, 0.0, 1.0, -9999.0).unwrap(),
            ..SyntheticScenario::default()
        };
        assert!(generate(&s).is_err());
        assert!(generate(&SyntheticScenario { wells: 0, ..small() }).is_err());
    }
}
