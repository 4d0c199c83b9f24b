//! Dataset ingestion, stage orchestration, feature-vector assembly, the
//! experiment runner and report rendering.

pub mod config;
pub mod experiment;
pub mod features;
pub mod manifest;
pub mod report;

pub use config::PipelineConfig;
pub use experiment::{
    run_experiment, stage_images, synthetic_image_set, ExperimentConfig, GridCell, ModelFamily,
    MseRow, Regime, RunReport, EPOCH_CHECKPOINTS, PRESET_GRID,
};
pub use features::{
    extract_record, extract_vector, feature_names, parse_feature_file, render_feature_file,
    to_labeled_data, FeatureRecord, Stage, FEATURE_LEN, FEATURE_SCHEMA,
};
pub use manifest::{ingest, render_manifest, DatasetManifest, ManifestEntry};
pub use report::{grid_csv, metrics_csv, mse_csv, mse_histogram_svg, render_report};
