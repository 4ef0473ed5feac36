//! Synthetic basin on disk, with a ready-to-run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use drastic_core::mcda::reference::{drastic_lu_fuzzy_rows, DRASTIC_LU_PARAMETERS, DRASTIC_LU_WEIGHTS};
use drastic_core::synthetic::{generate, SyntheticScenario};

use crate::config::{
    AhpSpec, ClassificationConfig, CrispWeights, FuzzySpec, LayerSource, OutputConfig,
    PipelineConfig, ValidationConfig, WeightsConfig,
};
use crate::error::PipelineError;
use crate::render::Palette;

pub const CONFIG_FILE: &str = "config.json";

/// Configuration for the files written by [`write_scenario`], all four
/// schemes enabled and paths relative to the scenario directory.
pub fn scenario_config() -> PipelineConfig {
    let layers: BTreeMap<String, LayerSource> = DRASTIC_LU_PARAMETERS
        .iter()
        .map(|p| {
            (
                p.to_string(),
                LayerSource::Grid {
                    path: PathBuf::from(format!("{p}.asc")),
                },
            )
        })
        .collect();
    PipelineConfig {
        geometry: None,
        layers,
        ratings: Vec::new(),
        weights: WeightsConfig {
            drastic: Some(CrispWeights::default()),
            drastic_lu: Some(CrispWeights::default()),
            ahp_lu: Some(AhpSpec {
                priorities: Some(DRASTIC_LU_WEIGHTS.to_vec()),
                matrix: None,
            }),
            fuzzy_ahp_lu: Some(FuzzySpec {
                fuzzy_matrix: drastic_lu_fuzzy_rows(),
            }),
        },
        classification: ClassificationConfig::default(),
        validation: Some(ValidationConfig {
            wells: PathBuf::from("wells.csv"),
            threshold: drastic_core::validation::NITRATE_THRESHOLD_MG_L,
            high_classes: None,
            low_classes: None,
        }),
        output: OutputConfig {
            dir: Some(PathBuf::from("out")),
            palette: Some(Palette::default_for(5).to_hex()),
        },
        base_dir: PathBuf::new(),
    }
}

/// Generates `scenario` into `dir` and writes `config.json` next to the data.
pub fn write_scenario(dir: &Path, scenario: &SyntheticScenario) -> Result<Vec<PathBuf>, PipelineError> {
    let data = generate(scenario).map_err(|e| PipelineError::compute("generate", "scenario", e))?;
    let write_err = |source| PipelineError::Write {
        path: dir.to_path_buf(),
        source,
    };
    let mut written = data.write_files(dir).map_err(write_err)?;
    let path = dir.join(CONFIG_FILE);
    fs::write(&path, scenario_config().to_json() + "\n").map_err(|source| PipelineError::Write {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(written)
}
