//! File plumbing: CSV ingestion and emission, run directories, manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde_json::Value;

use crate::{CliError, CliResult};

/// A loaded CSV: header names plus the numeric matrix below them.
pub struct Table {
    pub names: Vec<String>,
    pub values: Array2<f64>,
}

/// Loads a CSV with a mandatory header row into a numeric matrix.
///
/// Every data row must have as many fields as the header; offending rows are
/// reported with their 1-based line number.
pub fn load_table(path: &Path) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().all(|n| n.is_empty()) {
        return Err(CliError::Ingest(format!(
            "{}: missing header row",
            path.display()
        )));
    }
    let width = names.len();

    let mut flat: Vec<f64> = Vec::new();
    let mut n_rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(CliError::Ingest(format!(
                "{}: line {line}: expected {width} fields, got {}",
                path.display(),
                record.len()
            )));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Ingest(format!(
                    "{}: line {line}: column {:?} has non-numeric value {field:?}",
                    path.display(),
                    names[j]
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::Ingest(format!(
                    "{}: line {line}: column {:?} has non-finite value {field:?}",
                    path.display(),
                    names[j]
                )));
            }
            flat.push(v);
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(CliError::Ingest(format!(
            "{}: no data rows below the header",
            path.display()
        )));
    }
    let values = Array2::from_shape_vec((n_rows, width), flat)
        .expect("row-major buffer matches the counted shape");
    Ok(Table { names, values })
}

/// Loads the predictor and response files and checks their row counts agree.
pub fn load_xy(path_x: &Path, path_y: &Path) -> CliResult<(Table, Table)> {
    let x = load_table(path_x)?;
    let y = load_table(path_y)?;
    if x.values.nrows() != y.values.nrows() {
        return Err(CliError::Ingest(format!(
            "{} has {} data rows but {} has {}",
            path_x.display(),
            x.values.nrows(),
            path_y.display(),
            y.values.nrows()
        )));
    }
    Ok((x, y))
}

/// Writes a named numeric matrix as CSV. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_table(path: &Path, names: &[String], values: &Array2<f64>) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
    writer.write_record(names)?;
    for row in values.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writer.write_record(&fields)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a CSV with the given header and pre-rendered field strings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Ingest(format!("{}: {e}", path.display())))?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes plain text lines with a trailing newline.
pub fn write_lines(path: &Path, lines: &[String]) -> CliResult<()> {
    let mut f = fs::File::create(path)?;
    for line in lines {
        writeln!(f, "{line}")?;
    }
    Ok(())
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// A freshly created run directory plus its stable (unsuffixed) identifier.
pub struct RunDir {
    pub dir: PathBuf,
    pub run_id: String,
}

/// Creates `out_root/<command>-<confighash>` for this run.
///
/// The identifier hashes the configuration, so re-running the same setup maps
/// to the same name; an existing directory is never reused, a `-2`, `-3`, ...
/// suffix is appended instead. The manifest records the unsuffixed id.
pub fn create_run_dir(out_root: &Path, command: &str, config: &Value) -> CliResult<RunDir> {
    let canonical = serde_json::to_string(config)?;
    let digest = format!("{:016x}", fnv1a(canonical.as_bytes()));
    let run_id = format!("{command}-{}", &digest[..8]);
    fs::create_dir_all(out_root)?;
    let mut attempt = 1usize;
    loop {
        let name = if attempt == 1 {
            run_id.clone()
        } else {
            format!("{run_id}-{attempt}")
        };
        let dir = out_root.join(&name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(RunDir { dir, run_id }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => attempt += 1,
            Err(e) => {
                return Err(CliError::Ingest(format!("{}: {e}", dir.display())));
            }
        }
    }
}

/// Writes the run manifest: command, stable run id, seed, config echo,
/// package version and RNG name, plus optional command-specific details.
/// Deliberately no timestamps, so identical configurations produce identical
/// manifests.
pub fn write_manifest(
    run: &RunDir,
    command: &str,
    seed: Option<u64>,
    config: &Value,
    details: Option<&Value>,
) -> CliResult<()> {
    let mut manifest = serde_json::json!({
        "format": "spcr-run-manifest",
        "version": 1,
        "command": command,
        "run_id": run.run_id,
        "seed": seed,
        "config": config,
        "versions": { "spcr-cli": env!("CARGO_PKG_VERSION") },
        "rng": spcr::simgen::RNG_NAME,
    });
    if let Some(extra) = details {
        manifest["details"] = extra.clone();
    }
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(run.dir.join("manifest.json"), text + "\n")?;
    Ok(())
}
