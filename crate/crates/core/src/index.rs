//! Vulnerability index surfaces for the four weighting schemes, their
//! natural-breaks zoning and areal class summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classification::{classify, jenks_breaks, ClassBreaks};
use crate::error::IndexError;
use crate::grid::{weighted_sum, Grid};
use crate::mcda::reference::{DRASTIC_LU_PARAMETERS, DRASTIC_PARAMETERS};

pub const DEFAULT_CLASS_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Drastic,
    DrasticLu,
    AhpLu,
    FuzzyAhpLu,
}

impl Scheme {
    /// Execution and reporting order.
    pub const ALL: [Scheme; 4] = [
        Scheme::Drastic,
        Scheme::DrasticLu,
        Scheme::AhpLu,
        Scheme::FuzzyAhpLu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Drastic => "drastic",
            Scheme::DrasticLu => "drastic_lu",
            Scheme::AhpLu => "ahp_lu",
            Scheme::FuzzyAhpLu => "fuzzy_ahp_lu",
        }
    }

    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Scheme::Drastic => &DRASTIC_PARAMETERS,
            _ => &DRASTIC_LU_PARAMETERS,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = IndexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| IndexError::UnknownScheme(s.to_string()))
    }
}

/// Rating layers and weights for one scheme, in the scheme's parameter order.
#[derive(Debug, Clone)]
pub struct IndexModel<'a> {
    scheme: Scheme,
    weights: Vec<f64>,
    layers: Vec<&'a Grid>,
}

impl<'a> IndexModel<'a> {
    pub fn new(
        scheme: Scheme,
        weights: Vec<f64>,
        rating_layers: &'a BTreeMap<String, Grid>,
    ) -> Result<Self, IndexError> {
        let params = scheme.parameters();
        if weights.len() != params.len() {
            return Err(IndexError::WeightCount {
                weights: weights.len(),
                parameters: params.len(),
            });
        }
        let layers = params
            .iter()
            .map(|p| {
                rating_layers
                    .get(*p)
                    .ok_or_else(|| IndexError::MissingLayer(p.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IndexModel {
            scheme,
            weights,
            layers,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `VI = Σ weight_p · rating_p` cell by cell; nodata in any layer propagates.
pub fn compute_index(model: &IndexModel<'_>) -> Result<Grid, IndexError> {
    let layers: Vec<(&Grid, f64)> = model
        .layers
        .iter()
        .copied()
        .zip(model.weights.iter().copied())
        .collect();
    Ok(weighted_sum(&layers)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VulnerabilityMap {
    pub scheme: Scheme,
    pub vi: Grid,
    pub classes: Grid,
    pub breaks: ClassBreaks,
}

pub fn build_vulnerability_map(
    model: &IndexModel<'_>,
    k: usize,
) -> Result<VulnerabilityMap, IndexError> {
    let vi = compute_index(model)?;
    let values: Vec<f64> = vi.valid_values().collect();
    let breaks = jenks_breaks(&values, k)?;
    let classes = classify(&vi, &breaks)?;
    Ok(VulnerabilityMap {
        scheme: model.scheme,
        vi,
        classes,
        breaks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassArea {
    pub class: u32,
    pub cells: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaSummary {
    pub rows: Vec<ClassArea>,
    pub valid_cells: usize,
}

impl AreaSummary {
    pub fn is_empty(&self) -> bool {
        self.valid_cells == 0
    }
}

/// Cell count and share of valid cells for classes `1..=k`. Empty when the
/// grid has no valid cell.
pub fn class_area_summary(classes: &Grid, k: usize) -> AreaSummary {
    let mut counts = vec![0usize; k];
    let mut valid = 0usize;
    for v in classes.valid_values() {
        valid += 1;
        let id = v as usize;
        if (1..=k).contains(&id) {
            counts[id - 1] += 1;
        }
    }
    if valid == 0 {
        return AreaSummary {
            rows: Vec::new(),
            valid_cells: 0,
        };
    }
    let rows = counts
        .into_iter()
        .enumerate()
        .map(|(i, cells)| ClassArea {
            class: i as u32 + 1,
            cells,
            percent: 100.0 * cells as f64 / valid as f64,
        })
        .collect();
    AreaSummary {
        rows,
        valid_cells: valid,
    }
}
