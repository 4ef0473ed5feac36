//! The full workflow: layers, ratings, weights, index and zoning,
//! validation, reports. Stages run in a fixed order and every artifact is
//! listed with its SHA-256 digest in `manifest.csv`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use drastic_core::classification::{apply_rating, RatingScheme};
use drastic_core::grid::{read_ascii_grid, write_ascii_grid, Grid, GridHeader};
use drastic_core::index::{build_vulnerability_map, class_area_summary, IndexModel, Scheme};
use drastic_core::interpolation::{
    empirical_variogram, fit_variogram, idw, kriging, read_points_csv, IdwParams, SamplePoint,
    VariogramFit, VariogramModel,
};
use drastic_core::mcda::{
    ahp_weights, consistency, fuzzy_ahp_weights, matrix_from_priorities, Consistency,
    FuzzyPairwiseMatrix, PairwiseMatrix,
};
use drastic_core::validation::{
    binarize, default_zone_sets, read_observations_csv, roc_auc, score_wells, zone_coincidence,
    Observation, NITRATE_THRESHOLD_MG_L,
};
use log::{info, warn};
use sha2::{Digest, Sha256};

use crate::config::{GeometryTemplate, LayerSource, PipelineConfig};
use crate::error::PipelineError;
use crate::render::{encode_png, render_map};
use crate::report::{areas_csv, report_csv, report_text, roc_csv, weights_csv, SchemeResult};

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub results: Vec<SchemeResult>,
    /// Sorted by path; the manifest itself is not listed.
    pub manifest: Vec<ManifestEntry>,
}

/// Writes files under one root and remembers them so a failed run can be
/// undone.
struct Artifacts {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
    created_dirs: Vec<PathBuf>,
}

impl Artifacts {
    fn new(root: &Path) -> Self {
        Artifacts {
            root: root.to_path_buf(),
            entries: Vec::new(),
            created_dirs: Vec::new(),
        }
    }

    fn ensure_dir(&mut self, dir: &Path) -> Result<(), PipelineError> {
        let mut missing = Vec::new();
        let mut d = dir;
        while !d.exists() {
            missing.push(d.to_path_buf());
            match d.parent() {
                Some(p) if !p.as_os_str().is_empty() => d = p,
                _ => break,
            }
        }
        fs::create_dir_all(dir).map_err(|source| PipelineError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        // deepest last, so rollback can remove them in reverse
        self.created_dirs.extend(missing.into_iter().rev());
        Ok(())
    }

    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            self.ensure_dir(parent)?;
        }
        fs::write(&path, bytes).map_err(|source| PipelineError::Write {
            path: path.clone(),
            source,
        })?;
        self.entries.push(ManifestEntry {
            path: rel.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    fn rollback(&mut self) {
        for e in self.entries.drain(..) {
            let _ = fs::remove_file(self.root.join(&e.path));
        }
        let _ = fs::remove_file(self.root.join(MANIFEST_FILE));
        for d in self.created_dirs.drain(..).rev() {
            let _ = fs::remove_dir(d);
        }
    }
}

pub fn manifest_csv(entries: &[ManifestEntry]) -> String {
    let mut s = String::from("path,bytes,sha256\n");
    for e in entries {
        s.push_str(&format!("{},{},{}\n", e.path, e.bytes, e.sha256));
    }
    s
}

/// Validates `cfg`, then runs every enabled scheme and writes all artifacts
/// under `out_dir`. On error, files written by this run are removed.
pub fn run_pipeline(cfg: &PipelineConfig, out_dir: &Path) -> Result<RunSummary, PipelineError> {
    cfg.preflight()?;
    let mut art = Artifacts::new(out_dir);
    let outcome = run_stages(cfg, &mut art).and_then(|results| {
        let mut manifest = art.entries.clone();
        manifest.sort_by(|a, b| a.path.cmp(&b.path));
        let text = manifest_csv(&manifest);
        let path = out_dir.join(MANIFEST_FILE);
        fs::write(&path, text).map_err(|source| PipelineError::Write { path, source })?;
        Ok(RunSummary {
            out_dir: out_dir.to_path_buf(),
            results,
            manifest,
        })
    });
    if outcome.is_err() {
        art.rollback();
    }
    outcome
}

fn run_stages(cfg: &PipelineConfig, art: &mut Artifacts) -> Result<Vec<SchemeResult>, PipelineError> {
    art.ensure_dir(&art.root.clone())?;

    // 1-2: physical layers, including land use
    let geometry = resolve_geometry(cfg)?;
    let mut layers = BTreeMap::new();
    for p in cfg.required_parameters() {
        let src = &cfg.layers[p];
        let (grid, fit) = load_layer(cfg, p, src, geometry.as_ref())?;
        if let Some(fit) = fit {
            let m = fit.model;
            info!(
                "layer {p}: {} variogram nugget={} sill={} range={}",
                m.shape, m.nugget, m.sill, m.range
            );
        }
        if !src.is_grid() {
            art.write(&format!("layers/{p}.asc"), write_ascii_grid(&grid).as_bytes())?;
        }
        layers.insert(p.to_string(), grid);
    }
    check_alignment(&layers)?;

    let tables = cfg.rating_schemes()?;
    let mut rated = BTreeMap::new();
    for (p, g) in &layers {
        let r = apply_rating(g, &tables[p]).map_err(|e| PipelineError::compute("ratings", p.as_str(), e))?;
        if r.out_of_range > 0 {
            warn!("layer {p}: {} cells fall outside the rating table", r.out_of_range);
        }
        art.write(&format!("ratings/{p}.asc"), write_ascii_grid(&r.grid).as_bytes())?;
        rated.insert(p.clone(), r.grid);
    }

    // 3: weights
    let observations = match &cfg.validation {
        Some(v) => Some(read_wells(&cfg.resolve(&v.wells))?),
        None => None,
    };

    let mut results = Vec::new();
    for scheme in cfg.schemes() {
        let (weights, cons) = scheme_weights(cfg, scheme, &tables)?;
        if let Some(c) = &cons {
            if !c.acceptable {
                warn!("{scheme}: consistency ratio {:.4} exceeds 0.1", c.cr);
            }
        }

        // 4: weighted overlay and zoning
        let k = cfg.classification.classes_for(scheme);
        let model = IndexModel::new(scheme, weights.clone(), &rated)
            .map_err(|e| PipelineError::compute("index", scheme.name(), e))?;
        let map = build_vulnerability_map(&model, k)
            .map_err(|e| PipelineError::compute("index", scheme.name(), e))?;
        let areas = class_area_summary(&map.classes, k);
        let dir = scheme.name();
        art.write(&format!("{dir}/vi.asc"), write_ascii_grid(&map.vi).as_bytes())?;
        art.write(&format!("{dir}/classes.asc"), write_ascii_grid(&map.classes).as_bytes())?;
        art.write(&format!("{dir}/areas.csv"), areas_csv(scheme, &map.breaks, &areas).as_bytes())?;
        let img = render_map(&map.classes, &cfg.palette(k)?)
            .map_err(|e| PipelineError::compute("render", scheme.name(), e))?;
        art.write(&format!("{dir}/map.png"), &encode_png(&img))?;

        // 5: validation against observed nitrate
        let explicit = cfg
            .validation
            .as_ref()
            .and_then(|v| v.high_classes.clone().zip(v.low_classes.clone()));
        let (high, low) = zone_sets(explicit, &map.breaks);
        let threshold = cfg.validation.as_ref().map_or(NITRATE_THRESHOLD_MG_L, |v| v.threshold);
        let obs = observations.as_deref().unwrap_or(&[]);
        let zones = zone_coincidence(&map.classes, obs, threshold, &high, &low)
            .map_err(|e| PipelineError::compute("validation", scheme.name(), e))?;
        let (roc, skipped) = match &observations {
            Some(obs) => {
                let labeled = binarize(obs, threshold)
                    .map_err(|e| PipelineError::input("validation", "threshold", e))?;
                let scored = score_wells(&map.vi, &labeled)
                    .map_err(|e| PipelineError::input("validation", scheme.name(), e))?;
                let roc = match roc_auc(&scored.pairs()) {
                    Ok(r) => {
                        art.write(&format!("{dir}/roc.csv"), roc_csv(&r).as_bytes())?;
                        Some(r)
                    }
                    Err(e) => {
                        warn!("{scheme}: AUC undefined: {e}");
                        None
                    }
                };
                (roc, scored.skipped())
            }
            None => (None, 0),
        };
        if skipped > 0 {
            warn!("{scheme}: {skipped} wells outside the valid area were skipped");
        }
        if let Some(r) = &roc {
            info!("{scheme}: AUC {:.4} ({} positive, {} negative wells)", r.auc, r.n_pos, r.n_neg);
        }

        results.push(SchemeResult {
            scheme,
            weights: scheme
                .parameters()
                .iter()
                .map(|p| p.to_string())
                .zip(weights)
                .collect(),
            consistency: cons,
            breaks: map.breaks,
            areas,
            zones,
            roc,
            validated: observations.is_some(),
            wells_skipped: skipped,
        });
    }

    art.write("weights.csv", weights_csv(&results).as_bytes())?;
    art.write("report.csv", report_csv(&results).as_bytes())?;
    art.write("report.txt", report_text(&results).as_bytes())?;
    Ok(results)
}

fn resolve_geometry(cfg: &PipelineConfig) -> Result<Option<GridHeader>, PipelineError> {
    let needs = cfg.required_parameters().iter().any(|p| !cfg.layers[*p].is_grid());
    if !needs {
        return Ok(None);
    }
    match cfg.geometry_template() {
        Some(GeometryTemplate::Explicit(g)) => g
            .header()
            .map(Some)
            .map_err(|e| PipelineError::Config(format!("geometry: {e}"))),
        Some(GeometryTemplate::FromGrid(path)) => Ok(Some(*read_grid_file("layers", &path)?.header())),
        None => Err(PipelineError::Config("geometry: no target grid for interpolation".into())),
    }
}

pub fn read_grid_file(stage: &'static str, path: &Path) -> Result<Grid, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    read_ascii_grid(&text).map_err(|e| PipelineError::input(stage, path.display().to_string(), e))
}

pub fn read_points_file(stage: &'static str, path: &Path) -> Result<Vec<SamplePoint>, PipelineError> {
    let f = fs::File::open(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    read_points_csv(f).map_err(|e| PipelineError::input(stage, path.display().to_string(), e))
}

pub fn read_wells(path: &Path) -> Result<Vec<Observation>, PipelineError> {
    let f = fs::File::open(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    read_observations_csv(f).map_err(|e| PipelineError::input("validation", path.display().to_string(), e))
}

/// Default largest lag: half the diagonal of the samples' bounding box.
pub fn default_max_lag(points: &[SamplePoint]) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    0.5 * (x1 - x0).hypot(y1 - y0)
}

/// Reads or interpolates one physical layer. Returns the fitted variogram
/// when kriging had to fit one.
pub fn load_layer(
    cfg: &PipelineConfig,
    parameter: &str,
    src: &LayerSource,
    geometry: Option<&GridHeader>,
) -> Result<(Grid, Option<VariogramFit>), PipelineError> {
    let geometry = || geometry.ok_or_else(|| PipelineError::Config("geometry: no target grid".into()));
    match src {
        LayerSource::Grid { path } => Ok((read_grid_file("layers", &cfg.resolve(path))?, None)),
        LayerSource::Idw {
            points,
            power,
            neighbors,
        } => {
            let pts = read_points_file("layers", &cfg.resolve(points))?;
            let g = idw(
                &pts,
                geometry()?,
                IdwParams {
                    power: *power,
                    neighbors: *neighbors,
                },
            )
            .map_err(|e| PipelineError::compute("interpolation", parameter, e))?;
            Ok((g, None))
        }
        LayerSource::Kriging {
            points,
            shape,
            lags,
            max_distance,
            model,
        } => {
            let pts = read_points_file("layers", &cfg.resolve(points))?;
            let compute = |e: drastic_core::InterpolationError| PipelineError::compute("interpolation", parameter, e);
            let (model, fit) = match model {
                Some(m) => (VariogramModel::new(*shape, m.nugget, m.sill, m.range).map_err(compute)?, None),
                None => {
                    let max = max_distance.unwrap_or_else(|| default_max_lag(&pts));
                    let ev = empirical_variogram(&pts, *lags, max).map_err(compute)?;
                    let fit = fit_variogram(&ev, *shape).map_err(compute)?;
                    if let Some(w) = fit.warning {
                        warn!("layer {parameter}: variogram fit: {w:?}");
                    }
                    (fit.model, Some(fit))
                }
            };
            let out = kriging(&pts, geometry()?, model).map_err(compute)?;
            if out.ill_conditioned {
                warn!("layer {parameter}: kriging system is ill-conditioned");
            }
            Ok((out.grid, fit))
        }
    }
}

fn check_alignment(layers: &BTreeMap<String, Grid>) -> Result<(), PipelineError> {
    let mut it = layers.iter();
    let Some((first_name, first)) = it.next() else {
        return Ok(());
    };
    for (name, g) in it {
        let diff = first.header().differences(g.header());
        if !diff.is_empty() {
            return Err(PipelineError::input(
                "layers",
                name.as_str(),
                format!("grid header differs from layer {first_name} in {}", diff.join(", ")),
            ));
        }
    }
    Ok(())
}

/// Weights in the scheme's parameter order, with the AHP consistency check
/// where it applies.
pub fn scheme_weights(
    cfg: &PipelineConfig,
    scheme: Scheme,
    tables: &BTreeMap<String, RatingScheme>,
) -> Result<(Vec<f64>, Option<Consistency>), PipelineError> {
    let params = scheme.parameters();
    let labels: Vec<String> = params.iter().map(|p| p.to_string()).collect();
    let bad = |e: drastic_core::McdaError| PipelineError::input("weights", scheme.name(), e);
    let table_weights = || params.iter().map(|p| tables[*p].weight).collect::<Vec<f64>>();
    let w = &cfg.weights;
    match scheme {
        Scheme::Drastic | Scheme::DrasticLu => {
            let spec = if scheme == Scheme::Drastic { &w.drastic } else { &w.drastic_lu };
            let v = spec
                .as_ref()
                .and_then(|c| c.weights.clone())
                .unwrap_or_else(table_weights);
            Ok((v, None))
        }
        Scheme::AhpLu => {
            let spec = w.ahp_lu.as_ref().ok_or_else(|| PipelineError::Config("weights: ahp_lu missing".into()))?;
            let pm = match (&spec.priorities, &spec.matrix) {
                (Some(p), _) => matrix_from_priorities(p).map_err(bad)?,
                (None, Some(m)) => PairwiseMatrix::new(m.clone()).map_err(bad)?,
                (None, None) => return Err(PipelineError::Config("weights: ahp_lu is empty".into())),
            };
            let pm = pm.with_labels(labels).map_err(bad)?;
            let wv = ahp_weights(&pm);
            let c = consistency(&pm, &wv).map_err(bad)?;
            Ok((wv.weights().to_vec(), Some(c)))
        }
        Scheme::FuzzyAhpLu => {
            let spec = w
                .fuzzy_ahp_lu
                .as_ref()
                .ok_or_else(|| PipelineError::Config("weights: fuzzy_ahp_lu missing".into()))?;
            let fm = FuzzyPairwiseMatrix::new(spec.fuzzy_matrix.clone())
                .and_then(|m| m.with_labels(labels))
                .map_err(bad)?;
            Ok((fuzzy_ahp_weights(&fm).weights().to_vec(), None))
        }
    }
}

/// Zone sets from explicit config, falling back to the class labels.
pub fn zone_sets(
    explicit: Option<(BTreeSet<u32>, BTreeSet<u32>)>,
    breaks: &drastic_core::ClassBreaks,
) -> (BTreeSet<u32>, BTreeSet<u32>) {
    explicit.unwrap_or_else(|| default_zone_sets(breaks))
}
