use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::eval::EvalReport;
use super::model::{ModelParams, ModelSpec};
use super::predictor::TrainedModel;
use crate::data::{FeatureEncoder, Target, TargetScale};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MODEL_FORMAT: &str = "fogfed-model";
const MODEL_VERSION: u32 = 1;

/// On-disk form of a [`TrainedModel`]. Values are always stored as `f64`.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    target: Target,
    spec: ModelSpec,
    encoder: FeatureEncoder,
    scale: TargetScale,
    values: Vec<f64>,
}

pub fn save_model<T: Scalar>(path: &Path, model: &TrainedModel<T>) -> Result<()> {
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        target: model.target,
        spec: model.params.spec.clone(),
        encoder: model.encoder,
        scale: model.scale,
        values: model.params.values.iter().map(|v| v.as_f64()).collect(),
    };
    let text = serde_json::to_string_pretty(&file)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model<T: Scalar>(path: &Path) -> Result<TrainedModel<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text)?;
    if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
        return Err(Error::Model(format!(
            "{}: unsupported model file {} v{}",
            path.display(),
            file.format,
            file.version
        )));
    }
    let params = ModelParams::new(file.spec, file.values.into_iter().map(T::of).collect())?;
    TrainedModel::new(file.target, params, file.encoder, file.scale)
}

/// Writes `round,mse,mae` rows.
pub fn write_history_csv<T: Scalar>(path: &Path, report: &EvalReport<T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["round", "mse", "mae"])?;
    for m in &report.history {
        w.write_record([m.round.to_string(), m.mse.to_string(), m.mae.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
