use serde::{Deserialize, Serialize};

use crate::error::ClassificationError;
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRating {
    pub lower: f64,
    pub upper: f64,
    pub rating: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRating {
    pub code: i64,
    pub label: String,
    pub rating: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "entries", rename_all = "lowercase")]
pub enum RatingEntries {
    Continuous(Vec<IntervalRating>),
    Categorical(Vec<CategoryRating>),
}

/// Maps a physical layer to ratings in `[1, 10]`.
///
/// Continuous intervals are closed below and open above, except the last
/// interval which is closed on both ends. Entries are stored sorted by lower
/// bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingScheme {
    pub parameter: String,
    #[serde(flatten)]
    pub entries: RatingEntries,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatedGrid {
    pub grid: Grid,
    /// Valid input cells that matched no interval or category.
    pub out_of_range: usize,
}

impl RatingScheme {
    pub fn continuous(
        parameter: &str,
        weight: f64,
        mut entries: Vec<IntervalRating>,
    ) -> Result<Self, ClassificationError> {
        entries.sort_by(|a, b| a.lower.total_cmp(&b.lower));
        let scheme = RatingScheme {
            parameter: parameter.to_string(),
            entries: RatingEntries::Continuous(entries),
            weight,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn categorical(
        parameter: &str,
        weight: f64,
        entries: Vec<CategoryRating>,
    ) -> Result<Self, ClassificationError> {
        let scheme = RatingScheme {
            parameter: parameter.to_string(),
            entries: RatingEntries::Categorical(entries),
            weight,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Sorts continuous entries and checks every invariant. Call after deserializing.
    pub fn normalize(mut self) -> Result<Self, ClassificationError> {
        if let RatingEntries::Continuous(e) = &mut self.entries {
            e.sort_by(|a, b| a.lower.total_cmp(&b.lower));
        }
        self.validate()?;
        Ok(self)
    }

    fn invalid(&self, message: impl Into<String>) -> ClassificationError {
        ClassificationError::InvalidScheme {
            parameter: self.parameter.clone(),
            message: message.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ClassificationError> {
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return Err(self.invalid(format!("weight must be positive, got {}", self.weight)));
        }
        let ratings: Vec<f64> = match &self.entries {
            RatingEntries::Continuous(e) => e.iter().map(|r| r.rating).collect(),
            RatingEntries::Categorical(e) => e.iter().map(|r| r.rating).collect(),
        };
        if ratings.is_empty() {
            return Err(self.invalid("no entries"));
        }
        if let Some(r) = ratings.iter().find(|r| !(1.0..=10.0).contains(*r)) {
            return Err(self.invalid(format!("rating {r} outside [1, 10]")));
        }
        match &self.entries {
            RatingEntries::Continuous(e) => {
                for iv in e {
                    if !(iv.lower.is_finite() && iv.upper.is_finite() && iv.lower < iv.upper) {
                        return Err(self.invalid(format!(
                            "interval [{}, {}] is empty or not finite",
                            iv.lower, iv.upper
                        )));
                    }
                }
                for w in e.windows(2) {
                    if w[0].upper != w[1].lower {
                        return Err(self.invalid(format!(
                            "intervals [{}, {}] and [{}, {}] are not contiguous",
                            w[0].lower, w[0].upper, w[1].lower, w[1].upper
                        )));
                    }
                }
            }
            RatingEntries::Categorical(e) => {
                let mut codes: Vec<i64> = e.iter().map(|c| c.code).collect();
                codes.sort_unstable();
                if let Some(w) = codes.windows(2).find(|w| w[0] == w[1]) {
                    return Err(self.invalid(format!("category code {} repeated", w[0])));
                }
            }
        }
        Ok(())
    }

    /// Rating for a single physical value, `None` when no entry matches.
    pub fn rate(&self, value: f64) -> Option<f64> {
        match &self.entries {
            RatingEntries::Continuous(e) => {
                let last = e.len() - 1;
                e.iter().enumerate().find_map(|(i, iv)| {
                    let inside = value >= iv.lower
                        && (value < iv.upper || (i == last && value == iv.upper));
                    inside.then_some(iv.rating)
                })
            }
            RatingEntries::Categorical(e) => {
                if value.fract() != 0.0 {
                    return None;
                }
                e.iter()
                    .find(|c| c.code as f64 == value)
                    .map(|c| c.rating)
            }
        }
    }

    /// Smallest and largest rating this scheme can emit.
    pub fn rating_bounds(&self) -> (f64, f64) {
        let ratings: Box<dyn Iterator<Item = f64>> = match &self.entries {
            RatingEntries::Continuous(e) => Box::new(e.iter().map(|r| r.rating)),
            RatingEntries::Categorical(e) => Box::new(e.iter().map(|r| r.rating)),
        };
        ratings.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        })
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.entries, RatingEntries::Categorical(_))
    }
}

/// Replace each valid cell by its rating; unmatched cells become nodata and are counted.
pub fn apply_rating(g: &Grid, scheme: &RatingScheme) -> Result<RatedGrid, ClassificationError> {
    scheme.validate()?;
    let nodata = g.nodata_value();
    let mut out_of_range = 0;
    let values: Vec<f64> = g
        .values()
        .iter()
        .map(|&v| {
            if v == nodata {
                return nodata;
            }
            match scheme.rate(v) {
                Some(r) => r,
                None => {
                    out_of_range += 1;
                    nodata
                }
            }
        })
        .collect();
    if out_of_range > 0 {
        log::warn!(
            "{}: {out_of_range} cells outside every rating interval set to nodata",
            scheme.parameter
        );
    }
    Ok(RatedGrid {
        grid: Grid::new(*g.header(), values)?,
        out_of_range,
    })
}

fn iv(lower: f64, upper: f64, rating: f64) -> IntervalRating {
    IntervalRating {
        lower,
        upper,
        rating,
    }
}

fn cat(code: i64, label: &str, rating: f64) -> CategoryRating {
    CategoryRating {
        code,
        label: label.to_string(),
        rating,
    }
}

/// Standard DRASTIC rating tables with the integer DRASTIC weights, plus the
/// land-use extension. Categorical layers use codes `1..` in table order.
pub fn standard_schemes() -> Vec<RatingScheme> {
    let ok = |r: Result<RatingScheme, ClassificationError>| r.expect("built-in table is valid");
    vec![
        ok(RatingScheme::continuous(
            "D",
            5.0,
            vec![
                iv(5.70, 17.90, 10.0),
                iv(17.90, 30.10, 8.0),
                iv(30.10, 42.30, 6.0),
                iv(42.30, 54.50, 4.0),
                iv(54.50, 66.50, 2.0),
            ],
        )),
        ok(RatingScheme::continuous(
            "R",
            4.0,
            vec![
                iv(300.0, 390.0, 10.0),
                iv(220.0, 300.0, 8.0),
                iv(160.0, 220.0, 7.0),
                iv(100.0, 160.0, 4.0),
                iv(42.0, 100.0, 3.0),
            ],
        )),
        ok(RatingScheme::categorical(
            "A",
            3.0,
            vec![
                cat(1, "Sand / Gravel", 8.0),
                cat(2, "Sand and Clay", 6.0),
                cat(3, "Limestone and Sandstone", 4.0),
                cat(4, "Silty Clay", 2.0),
            ],
        )),
        ok(RatingScheme::categorical(
            "S",
            2.0,
            vec![
                cat(1, "Pebble_Gravel_Sand", 10.0),
                cat(2, "Gravel and Clay", 8.0),
                cat(3, "Sand and Clay", 6.0),
                cat(4, "Sandy Clay", 4.0),
                cat(5, "Sandy Clay Loam", 3.0),
            ],
        )),
        ok(RatingScheme::continuous(
            "T",
            1.0,
            vec![
                iv(0.0, 2.0, 10.0),
                iv(2.0, 6.0, 8.0),
                iv(6.0, 11.50, 6.0),
                iv(11.50, 19.50, 4.0),
                iv(19.50, 40.50, 2.0),
            ],
        )),
        ok(RatingScheme::categorical(
            "I",
            5.0,
            vec![
                cat(1, "Pebble-Gravel-sand", 10.0),
                cat(2, "Sandy Loam", 8.0),
                cat(3, "Sandy Clay, Clayey Sand, Silt Loam, Loam", 6.0),
                cat(4, "Clay Loam", 4.0),
                cat(5, "Clay and Silty Clay", 2.0),
            ],
        )),
        ok(RatingScheme::continuous(
            "C",
            3.0,
            vec![
                iv(3.38e-4, 4.15e-4, 10.0),
                iv(2.61e-4, 3.38e-4, 8.0),
                iv(1.84e-4, 2.61e-4, 6.0),
                iv(1.06e-4, 1.84e-4, 4.0),
                iv(2.96e-5, 1.06e-4, 2.0),
            ],
        )),
        ok(RatingScheme::categorical(
            "LU",
            5.0,
            vec![
                cat(1, "Urban and Residential Areas", 10.0),
                cat(2, "New agricultural Areas", 9.0),
                cat(3, "Wastewater-Impacted Areas", 7.0),
                cat(4, "Old agricultural Areas", 3.0),
                cat(5, "Barren land", 1.0),
            ],
        )),
    ]
}

/// Looks up one parameter in [`standard_schemes`].
pub fn standard_scheme(parameter: &str) -> Option<RatingScheme> {
    standard_schemes()
        .into_iter()
        .find(|s| s.parameter == parameter)
}
