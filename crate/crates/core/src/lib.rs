//! Groundwater vulnerability mapping with DRASTIC-family indices.
//!
//! Thematic layers are held as [`Grid`]s, rated with per-parameter tables,
//! combined with fixed, AHP or fuzzy-AHP weights into a vulnerability index,
//! zoned with Jenks natural breaks and validated against nitrate
//! observations through ROC analysis.

pub mod classification;
pub mod error;
pub mod grid;
pub mod index;
pub mod interpolation;
pub mod mcda;
pub mod synthetic;
pub mod validation;

pub use classification::{ClassBreaks, RatingScheme};
pub use error::{
    ClassificationError, GridError, IndexError, InterpolationError, McdaError, SyntheticError,
    ValidationError,
};
pub use grid::{read_ascii_grid, weighted_sum, write_ascii_grid, Grid, GridHeader};
pub use index::{IndexModel, Scheme, VulnerabilityMap};
pub use interpolation::{SamplePoint, VariogramModel, VariogramShape};
pub use mcda::{FuzzyPairwiseMatrix, PairwiseMatrix, Tfn, WeightVector};
pub use validation::{Observation, RocResult, ZoneMetrics};
