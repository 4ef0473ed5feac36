//! Pipeline configuration document and its pre-flight checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use drastic_core::classification::{standard_scheme, RatingScheme};
use drastic_core::grid::GridHeader;
use drastic_core::index::{Scheme, DEFAULT_CLASS_COUNT};
use drastic_core::interpolation::{VariogramModel, VariogramShape, DEFAULT_NEIGHBORS, DEFAULT_POWER};
use drastic_core::mcda::reference::DRASTIC_LU_PARAMETERS;
use drastic_core::mcda::Tfn;
use drastic_core::validation::NITRATE_THRESHOLD_MG_L;
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use crate::render::Palette;

pub const DEFAULT_LAGS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Target grid for interpolated layers. Defaults to the header of the
    /// first grid-sourced layer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    pub layers: BTreeMap<String, LayerSource>,
    /// Overrides of the built-in rating tables, keyed by their `parameter`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ratings: Vec<RatingScheme>,
    pub weights: WeightsConfig,
    #[serde(default)]
    pub classification: ClassificationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub ncols: usize,
    pub nrows: usize,
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
    pub nodata_value: f64,
}

impl GeometrySpec {
    pub fn header(&self) -> Result<GridHeader, drastic_core::GridError> {
        GridHeader::new(
            self.ncols,
            self.nrows,
            self.xllcorner,
            self.yllcorner,
            self.cellsize,
            self.nodata_value,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum LayerSource {
    Grid {
        path: PathBuf,
    },
    Idw {
        points: PathBuf,
        #[serde(default = "default_power")]
        power: f64,
        #[serde(default = "default_neighbors")]
        neighbors: usize,
    },
    Kriging {
        points: PathBuf,
        #[serde(default)]
        shape: VariogramShape,
        #[serde(default = "default_lags")]
        lags: usize,
        /// Largest lag distance; half the sample bounding-box diagonal if absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_distance: Option<f64>,
        /// Fixed model; skips variogram fitting.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<ModelSpec>,
    },
}

impl LayerSource {
    pub fn file(&self) -> &Path {
        match self {
            LayerSource::Grid { path } => path,
            LayerSource::Idw { points, .. } | LayerSource::Kriging { points, .. } => points,
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, LayerSource::Grid { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub nugget: f64,
    pub sill: f64,
    pub range: f64,
}

fn default_power() -> f64 {
    DEFAULT_POWER
}

fn default_neighbors() -> usize {
    DEFAULT_NEIGHBORS
}

fn default_lags() -> usize {
    DEFAULT_LAGS
}

fn default_classes() -> usize {
    DEFAULT_CLASS_COUNT
}

fn default_threshold() -> f64 {
    NITRATE_THRESHOLD_MG_L
}

/// Schemes run are the keys present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drastic: Option<CrispWeights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drastic_lu: Option<CrispWeights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ahp_lu: Option<AhpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzzy_ahp_lu: Option<FuzzySpec>,
}

/// Integer-style weights; taken from the rating tables when omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrispWeights {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Exactly one of `priorities` (ratio matrix is derived) or `matrix`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AhpSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priorities: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzySpec {
    pub fuzzy_matrix: Vec<Vec<Tfn>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationConfig {
    #[serde(default = "default_classes")]
    pub classes: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_scheme: BTreeMap<Scheme, usize>,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        ClassificationConfig {
            classes: DEFAULT_CLASS_COUNT,
            per_scheme: BTreeMap::new(),
        }
    }
}

impl ClassificationConfig {
    pub fn classes_for(&self, scheme: Scheme) -> usize {
        self.per_scheme.get(&scheme).copied().unwrap_or(self.classes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    pub wells: PathBuf,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Class ids counted as high vulnerability. Both sets default to the
    /// class labels (`high`/`very high` vs `very low`/`low`/`moderate`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high_classes: Option<BTreeSet<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low_classes: Option<BTreeSet<u32>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// `#rrggbb` colors from lowest to highest class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<Vec<String>>,
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Enabled schemes in execution order.
    pub fn schemes(&self) -> Vec<Scheme> {
        let w = &self.weights;
        Scheme::ALL
            .into_iter()
            .filter(|s| match s {
                Scheme::Drastic => w.drastic.is_some(),
                Scheme::DrasticLu => w.drastic_lu.is_some(),
                Scheme::AhpLu => w.ahp_lu.is_some(),
                Scheme::FuzzyAhpLu => w.fuzzy_ahp_lu.is_some(),
            })
            .collect()
    }

    /// Parameters needed by at least one enabled scheme, in table order.
    pub fn required_parameters(&self) -> Vec<&'static str> {
        let schemes = self.schemes();
        DRASTIC_LU_PARAMETERS
            .into_iter()
            .filter(|p| schemes.iter().any(|s| s.parameters().contains(p)))
            .collect()
    }

    /// Built-in rating tables with configured overrides applied.
    pub fn rating_schemes(&self) -> Result<BTreeMap<String, RatingScheme>, PipelineError> {
        let mut out: BTreeMap<String, RatingScheme> = DRASTIC_LU_PARAMETERS
            .iter()
            .map(|p| (p.to_string(), standard_scheme(p).expect("built-in table")))
            .collect();
        for r in &self.ratings {
            if !out.contains_key(&r.parameter) {
                return Err(PipelineError::Config(format!(
                    "ratings: unknown parameter {}",
                    r.parameter
                )));
            }
            let r = r
                .clone()
                .normalize()
                .map_err(|e| PipelineError::Config(format!("ratings for {}: {e}", r.parameter)))?;
            out.insert(r.parameter.clone(), r);
        }
        Ok(out)
    }

    pub fn palette(&self, k: usize) -> Result<Palette, PipelineError> {
        match &self.output.palette {
            Some(colors) => {
                let p = Palette::parse(colors).map_err(|e| PipelineError::Config(format!("palette: {e}")))?;
                if p.len() < k {
                    return Err(PipelineError::Config(format!(
                        "palette has {} colors, {k} classes requested",
                        p.len()
                    )));
                }
                Ok(p)
            }
            None => Ok(Palette::default_for(k)),
        }
    }

    /// Target geometry for interpolation, if one can be determined without
    /// reading a grid body.
    pub fn geometry_template(&self) -> Option<GeometryTemplate> {
        if let Some(g) = self.geometry {
            return Some(GeometryTemplate::Explicit(g));
        }
        DRASTIC_LU_PARAMETERS.iter().find_map(|p| match self.layers.get(*p) {
            Some(LayerSource::Grid { path }) => Some(GeometryTemplate::FromGrid(self.resolve(path))),
            _ => None,
        })
    }

    /// Checks everything that can be checked before any computation: enabled
    /// schemes, layer coverage, referenced files, weight shapes, class
    /// counts and the palette.
    pub fn preflight(&self) -> Result<(), PipelineError> {
        let schemes = self.schemes();
        if schemes.is_empty() {
            return Err(PipelineError::Config(
                "weights: no scheme enabled (expected one of drastic, drastic_lu, ahp_lu, fuzzy_ahp_lu)".into(),
            ));
        }
        for name in self.layers.keys() {
            if !DRASTIC_LU_PARAMETERS.contains(&name.as_str()) {
                return Err(PipelineError::Config(format!("layers: unknown parameter {name}")));
            }
        }
        for s in &schemes {
            for p in s.parameters() {
                if !self.layers.contains_key(*p) {
                    return Err(PipelineError::Config(format!(
                        "layers: scheme {s} requires layer {p}, which is not configured"
                    )));
                }
            }
        }
        for p in self.required_parameters() {
            let src = &self.layers[p];
            let path = self.resolve(src.file());
            if !path.is_file() {
                return Err(PipelineError::Config(format!(
                    "layers: {p}: file not found: {}",
                    path.display()
                )));
            }
            match src {
                LayerSource::Idw { power, neighbors, .. } => {
                    if !(power.is_finite() && *power > 0.0) || *neighbors == 0 {
                        return Err(PipelineError::Config(format!(
                            "layers: {p}: idw needs power > 0 and neighbors >= 1"
                        )));
                    }
                }
                LayerSource::Kriging {
                    lags,
                    max_distance,
                    model,
                    shape,
                    ..
                } => {
                    if *lags == 0 || max_distance.is_some_and(|d| !(d.is_finite() && d > 0.0)) {
                        return Err(PipelineError::Config(format!(
                            "layers: {p}: kriging needs lags >= 1 and max_distance > 0"
                        )));
                    }
                    if let Some(m) = model {
                        VariogramModel::new(*shape, m.nugget, m.sill, m.range)
                            .map_err(|e| PipelineError::Config(format!("layers: {p}: {e}")))?;
                    }
                }
                LayerSource::Grid { .. } => {}
            }
        }
        if self.required_parameters().iter().any(|p| !self.layers[*p].is_grid())
            && self.geometry_template().is_none()
        {
            return Err(PipelineError::Config(
                "geometry: interpolated layers need a `geometry` section or at least one grid layer".into(),
            ));
        }
        if let Some(g) = &self.geometry {
            g.header().map_err(|e| PipelineError::Config(format!("geometry: {e}")))?;
        }
        self.rating_schemes()?;
        self.check_weights()?;

        if self.classification.classes == 0 {
            return Err(PipelineError::Config("classification: classes must be >= 1".into()));
        }
        for (s, k) in &self.classification.per_scheme {
            if *k == 0 {
                return Err(PipelineError::Config(format!(
                    "classification: {s}: classes must be >= 1"
                )));
            }
        }
        for s in &schemes {
            self.palette(self.classification.classes_for(*s))?;
        }

        if let Some(v) = &self.validation {
            let path = self.resolve(&v.wells);
            if !path.is_file() {
                return Err(PipelineError::Config(format!(
                    "validation: wells file not found: {}",
                    path.display()
                )));
            }
            if !(v.threshold.is_finite() && v.threshold > 0.0) {
                return Err(PipelineError::Config(format!(
                    "validation: threshold must be positive, got {}",
                    v.threshold
                )));
            }
            if v.high_classes.is_some() != v.low_classes.is_some() {
                return Err(PipelineError::Config(
                    "validation: give both high_classes and low_classes, or neither".into(),
                ));
            }
            if let (Some(h), Some(l)) = (&v.high_classes, &v.low_classes) {
                if let Some(c) = h.intersection(l).next() {
                    return Err(PipelineError::Config(format!(
                        "validation: class {c} is in both zone sets"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_weights(&self) -> Result<(), PipelineError> {
        let w = &self.weights;
        let check_crisp = |name: &str, cw: &Option<CrispWeights>, n: usize| {
            if let Some(CrispWeights { weights: Some(v) }) = cw {
                if v.len() != n || v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(PipelineError::Config(format!(
                        "weights: {name} needs {n} positive weights, got {v:?}"
                    )));
                }
            }
            Ok(())
        };
        check_crisp("drastic", &w.drastic, 7)?;
        check_crisp("drastic_lu", &w.drastic_lu, 8)?;
        if let Some(a) = &w.ahp_lu {
            match (&a.priorities, &a.matrix) {
                (Some(p), None) if p.len() == 8 => {}
                (None, Some(m)) if m.len() == 8 && m.iter().all(|r| r.len() == 8) => {}
                _ => {
                    return Err(PipelineError::Config(
                        "weights: ahp_lu needs either 8 priorities or an 8x8 matrix".into(),
                    ))
                }
            }
        }
        if let Some(f) = &w.fuzzy_ahp_lu {
            let m = &f.fuzzy_matrix;
            if m.len() != 8 || m.iter().any(|r| r.len() != 8) {
                return Err(PipelineError::Config(
                    "weights: fuzzy_ahp_lu needs an 8x8 matrix of [l, m, u] triples".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryTemplate {
    Explicit(GeometrySpec),
    FromGrid(PathBuf),
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "layers": {"D": {"source": "grid", "path": "D.asc"}},
        "weights": {"drastic": {}}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let c = PipelineConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.schemes(), vec![Scheme::Drastic]);
        assert_eq!(c.classification.classes, 5);
        assert!(c.validation.is_none());
        assert_eq!(c.required_parameters(), ["D", "R", "A", "S", "T", "I", "C"]);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = MINIMAL.replace("\"weights\"", "\"wieghts\": 1, \"weights\"");
        assert!(matches!(PipelineConfig::from_json(&bad), Err(PipelineError::Config(_))));
    }

    #[test]
    fn missing_layer_named() {
        let c = PipelineConfig::from_json(MINIMAL).unwrap();
        let err = c.preflight().unwrap_err().to_string();
        assert!(err.contains("layer R"), "{err}");
    }

    #[test]
    fn layer_sources_parse() {
        let c = PipelineConfig::from_json(
            r#"{
            "layers": {
                "D": {"source": "idw", "points": "d.csv", "power": 3},
                "R": {"source": "kriging", "points": "r.csv", "shape": "exponential",
                      "model": {"nugget": 0, "sill": 2, "range": 500}}
            },
            "weights": {"ahp_lu": {"priorities": [5,4,3,2,1,5,3,5]}},
            "classification": {"classes": 4, "per_scheme": {"ahp_lu": 3}}
        }"#,
        )
        .unwrap();
        assert_eq!(
            c.layers["D"],
            LayerSource::Idw {
                points: "d.csv".into(),
                power: 3.0,
                neighbors: 12
            }
        );
        assert!(matches!(
            c.layers["R"],
            LayerSource::Kriging { shape: VariogramShape::Exponential, lags: 12, model: Some(_), .. }
        ));
        assert_eq!(c.classification.classes_for(Scheme::AhpLu), 3);
        assert_eq!(c.classification.classes_for(Scheme::Drastic), 4);
    }

    #[test]
    fn rating_override_round_trips() {
        let c = PipelineConfig::from_json(
            r#"{
            "layers": {},
            "ratings": [{"parameter": "T", "weight": 1, "mode": "continuous",
                         "entries": [{"lower": 0, "upper": 10, "rating": 9},
                                     {"lower": 10, "upper": 90, "rating": 2}]}],
            "weights": {"drastic": {"weights": [5,4,3,2,1,5,3]}}
        }"#,
        )
        .unwrap();
        let schemes = c.rating_schemes().unwrap();
        assert_eq!(schemes["T"].rate(5.0), Some(9.0));
        assert_eq!(schemes["D"], standard_scheme("D").unwrap());
        let back = PipelineConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let mut c = PipelineConfig::from_json(MINIMAL).unwrap();
        c.base_dir = PathBuf::from("/data/run");
        assert_eq!(c.resolve(Path::new("D.asc")), PathBuf::from("/data/run/D.asc"));
        assert_eq!(c.resolve(Path::new("/abs/D.asc")), PathBuf::from("/abs/D.asc"));
    }
}
