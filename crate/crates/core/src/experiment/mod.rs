//! Scenario files, the end-to-end pipeline and its persisted artifacts.

mod config;
mod pipeline;
mod report;
mod trace;

pub use config::*;
pub use pipeline::{
    deviation_label, form, load_predictor, prepare_data, save_formation, save_trained, saved_profiles, simulate,
    train_target, DataSummary, Engine, Formation, PreparedData, RunLayout, TrainedTarget,
};
pub use report::{build_report, satisfaction, EngineReport, ModelReport, RunReport};
pub use trace::{
    read_profile, read_routes, read_trace, write_ga_history, write_profile, write_routes, write_trace, RouteRow,
    TraceRow,
};
