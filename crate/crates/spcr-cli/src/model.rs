//! Versioned JSON persistence of fitted models.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use spcr::pcr::PcrModel;

use crate::{CliError, CliResult};

const FORMAT: &str = "spcr-model";
const VERSION: u32 = 1;

/// On-disk form of a fitted model plus the column names needed to apply it
/// to new files by name.
#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    /// Names of every training predictor column, in training order.
    pub column_names: Vec<String>,
    pub selected_indices: Vec<usize>,
    pub x_column_means: Vec<f64>,
    /// Row-major m x h loadings.
    pub loadings: Vec<Vec<f64>>,
    /// Row-major h x q coefficients.
    pub coefficients: Vec<Vec<f64>>,
    pub y_means: Vec<f64>,
    pub y_names: Vec<String>,
    pub m: usize,
    pub h: usize,
}

fn to_rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn from_rows(rows: &[Vec<f64>], what: &str) -> CliResult<Array2<f64>> {
    let n = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if width == 0 {
        return Err(CliError::Ingest(format!("model {what} matrix is empty")));
    }
    let mut flat = Vec::with_capacity(n * width);
    for row in rows {
        if row.len() != width {
            return Err(CliError::Ingest(format!("model {what} matrix is ragged")));
        }
        flat.extend_from_slice(row);
    }
    Ok(Array2::from_shape_vec((n, width), flat).expect("checked rectangular shape"))
}

/// Packs a fitted model with its naming context for serialization.
pub fn to_file(model: &PcrModel, column_names: &[String], y_names: &[String]) -> ModelFile {
    ModelFile {
        format: FORMAT.to_string(),
        version: VERSION,
        column_names: column_names.to_vec(),
        selected_indices: model.selected_indices.clone(),
        x_column_means: model.x_column_means.to_vec(),
        loadings: to_rows(&model.loadings),
        coefficients: to_rows(&model.coefficients),
        y_means: model.y_means.to_vec(),
        y_names: y_names.to_vec(),
        m: model.m,
        h: model.h,
    }
}

/// Validates a loaded file and rebuilds the model and its naming context.
pub fn from_file(mf: ModelFile) -> CliResult<(PcrModel, Vec<String>, Vec<String>)> {
    if mf.format != FORMAT {
        return Err(CliError::Ingest(format!(
            "not a model file: format is {:?}, expected {FORMAT:?}",
            mf.format
        )));
    }
    if mf.version != VERSION {
        return Err(CliError::Ingest(format!(
            "unsupported model version {}, expected {VERSION}",
            mf.version
        )));
    }
    let p = mf.column_names.len();
    if mf.x_column_means.len() != p {
        return Err(CliError::Ingest(format!(
            "model has {p} column names but {} column means",
            mf.x_column_means.len()
        )));
    }
    if mf.selected_indices.len() != mf.m {
        return Err(CliError::Ingest(format!(
            "model selects {} columns but m = {}",
            mf.selected_indices.len(),
            mf.m
        )));
    }
    for (i, &j) in mf.selected_indices.iter().enumerate() {
        if j >= p {
            return Err(CliError::Ingest(format!(
                "selected index {j} is outside the {p} training columns"
            )));
        }
        if mf.selected_indices[..i].contains(&j) {
            return Err(CliError::Ingest(format!("selected index {j} repeats")));
        }
    }
    let loadings = from_rows(&mf.loadings, "loadings")?;
    let coefficients = from_rows(&mf.coefficients, "coefficients")?;
    if loadings.dim() != (mf.m, mf.h) {
        return Err(CliError::Ingest(format!(
            "loadings are {:?}, expected ({}, {})",
            loadings.dim(),
            mf.m,
            mf.h
        )));
    }
    let q = mf.y_means.len();
    if coefficients.dim() != (mf.h, q) {
        return Err(CliError::Ingest(format!(
            "coefficients are {:?}, expected ({}, {q})",
            coefficients.dim(),
            mf.h
        )));
    }
    if mf.y_names.len() != q {
        return Err(CliError::Ingest(format!(
            "model has {q} response means but {} response names",
            mf.y_names.len()
        )));
    }
    let model = PcrModel {
        selected_indices: mf.selected_indices,
        x_column_means: Array1::from_vec(mf.x_column_means),
        loadings,
        coefficients,
        y_means: Array1::from_vec(mf.y_means),
        m: mf.m,
        h: mf.h,
    };
    Ok((model, mf.column_names, mf.y_names))
}

pub fn save(path: &Path, mf: &ModelFile) -> CliResult<()> {
    let text = serde_json::to_string_pretty(mf)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load(path: &Path) -> CliResult<(PcrModel, Vec<String>, Vec<String>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
    let mf: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
    from_file(mf)
}
