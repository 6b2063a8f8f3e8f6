//! CSV tables and schema sidecars on disk.

use std::fs;
use std::path::{Path, PathBuf};

use balmse_core::tabular::{format_csv, parse_csv, Dataset, Schema, SchemaSource};

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(path, text).map_err(CliError::io(path))
}

pub fn read_csv(path: &Path, source: &SchemaSource) -> Result<Dataset> {
    Ok(parse_csv(&read_text(path)?, source)?)
}

pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    write_text(path, &format_csv(data))
}

/// `data.csv` → `data.schema`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("schema")
}

pub fn read_schema(path: &Path) -> Result<Schema> {
    Ok(Schema::from_sidecar(&read_text(path)?)?)
}

pub fn write_schema(schema: &Schema, path: &Path) -> Result<()> {
    write_text(path, &schema.to_sidecar())
}
