//! Configuration-driven groundwater vulnerability pipeline built on
//! `drastic-core`.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod render;
pub mod report;
pub mod scenario;

pub use config::PipelineConfig;
pub use error::PipelineError;
pub use pipeline::{run_pipeline, ManifestEntry, RunSummary, MANIFEST_FILE};
pub use render::{render_map, Palette};
