//! File formats: JSON schema, CSV datasets, JSON models.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use mcce_core::generator::ChainModel;
use mcce_core::predictor::Mlp;
use mcce_core::{Dataset, Error as CoreError, FeatureSchema, Schema};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default name of the label column in labeled CSV files.
pub const LABEL_COLUMN: &str = "y";

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    let json_err = |source| Error::Json {
        path: path.to_path_buf(),
        source,
    };
    serde_json::to_writer_pretty(&mut w, value).map_err(json_err)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn read_schema(path: &Path) -> Result<Schema> {
    read_json(path)
}

pub fn write_schema(path: &Path, schema: &Schema) -> Result<()> {
    write_json(path, schema)
}

pub fn read_mlp(path: &Path) -> Result<Mlp> {
    let mlp: Mlp = read_json(path)?;
    mlp.validate()?;
    Ok(mlp)
}

pub fn write_mlp(path: &Path, mlp: &Mlp) -> Result<()> {
    write_json(path, mlp)
}

pub fn write_chain(path: &Path, chain: &ChainModel) -> Result<()> {
    write_json(path, chain)
}

/// Parses one cell. Level labels map to their index; numbers use `.` as
/// the decimal separator.
pub fn parse_cell(feature: &FeatureSchema, row: usize, text: &str) -> Result<f64, CoreError> {
    let bad = || CoreError::InvalidCell {
        row,
        column: feature.name.clone(),
        value: text.to_string(),
    };
    if feature.kind.is_numeric() {
        let v: f64 = text.trim().parse().map_err(|_| bad())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    } else {
        feature.level_index(text).map(|i| i as f64).ok_or_else(bad)
    }
}

/// Inverse of [`parse_cell`]. Numbers use the shortest representation that
/// parses back to the same `f64`.
pub fn format_cell(feature: &FeatureSchema, value: f64) -> String {
    if feature.kind.is_numeric() {
        format!("{value}")
    } else {
        let i = value as usize;
        feature
            .levels
            .get(i)
            .cloned()
            .unwrap_or_else(|| format!("{value}"))
    }
}

/// Reads a CSV whose header contains every schema column (extra columns
/// are ignored). Row numbers in errors are 1-based data rows.
pub fn read_dataset(path: &Path, schema: &Schema) -> Result<Dataset> {
    Ok(read_labeled_from(open(path)?, path, schema, None)?.0)
}

/// Like [`read_dataset`] and also reads a 0/1 label column.
pub fn read_labeled(path: &Path, schema: &Schema, label: &str) -> Result<(Dataset, Vec<bool>)> {
    let (ds, labels) = read_labeled_from(open(path)?, path, schema, Some(label))?;
    Ok((ds, labels.expect("label column requested")))
}

pub fn read_labeled_from<R: Read>(
    reader: R,
    path: &Path,
    schema: &Schema,
    label: Option<&str>,
) -> Result<(Dataset, Option<Vec<bool>>)> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let positions: Vec<usize> = schema
        .features()
        .iter()
        .map(|f| find(&f.name))
        .collect::<Result<_>>()?;
    let label_pos = label.map(find).transpose()?;

    let mut rows = Vec::new();
    let mut labels = label.map(|_| Vec::new());
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row_no = i + 1;
        let get = |pos: usize| record.get(pos).unwrap_or("");
        let row = schema
            .features()
            .iter()
            .zip(&positions)
            .map(|(f, &pos)| parse_cell(f, row_no, get(pos)))
            .collect::<Result<Vec<f64>, _>>()?;
        if let (Some(pos), Some(labels)) = (label_pos, labels.as_mut()) {
            let text = get(pos);
            let y = match text.trim() {
                "1" | "true" => true,
                "0" | "false" => false,
                _ => {
                    return Err(CoreError::InvalidCell {
                        row: row_no,
                        column: label.unwrap_or(LABEL_COLUMN).to_string(),
                        value: text.to_string(),
                    }
                    .into())
                }
            };
            labels.push(y);
        }
        rows.push(row);
    }
    Ok((Dataset::from_rows(schema.clone(), &rows)?, labels))
}

/// Writes the dataset with a header row, optionally followed by a label
/// column.
pub fn write_dataset(path: &Path, ds: &Dataset, labels: Option<(&str, &[bool])>) -> Result<()> {
    let mut w = create(path)?;
    write_dataset_to(&mut w, ds, labels).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_dataset_to<W: Write>(
    w: W,
    ds: &Dataset,
    labels: Option<(&str, &[bool])>,
) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let schema = ds.schema();
    let mut header: Vec<&str> = schema.features().iter().map(|f| f.name.as_str()).collect();
    if let Some((name, _)) = labels {
        header.push(name);
    }
    wtr.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut rec: Vec<String> = (0..ds.n_cols())
            .map(|j| format_cell(schema.feature(j), ds.value(i, j)))
            .collect();
        if let Some((_, y)) = labels {
            rec.push(if y[i] { "1" } else { "0" }.to_string());
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}
