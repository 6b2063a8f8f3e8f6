//! Plain comma-separated text: one header row, no quoting, `.` decimals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::dataset::{ColumnData, Dataset};
use super::schema::{Column, ColumnKind, Schema};
use crate::error::{Error, Result};

/// How column kinds are determined when parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemaSource {
    /// Columns are mapped by header name onto the given schema.
    Given(Schema),
    /// A column is categorical iff one of its cells does not parse as a finite
    /// number or it is listed in `categorical`. Categories are ordered by
    /// first appearance. `target`, when set, names a numeric target column.
    Infer {
        categorical: Vec<String>,
        target: Option<String>,
    },
}

impl SchemaSource {
    pub fn infer() -> Self {
        SchemaSource::Infer {
            categorical: Vec::new(),
            target: None,
        }
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_csv(text: &str, source: &SchemaSource) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header_line) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header row".into()))?;
    let header: Vec<String> = header_line.split(',').map(|h| h.trim().to_string()).collect();
    let width = header.len();
    let mut cells: Vec<Vec<&str>> = vec![Vec::new(); width];
    for (lineno, line) in lines {
        let row: Vec<&str> = line.split(',').map(str::trim).collect();
        if row.len() != width {
            return Err(Error::Shape(format!(
                "line {} has {} cells, header has {width}",
                lineno + 1,
                row.len()
            )));
        }
        for (j, cell) in row.into_iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row: cells[j].len(),
                    column: header[j].clone(),
                });
            }
            cells[j].push(cell);
        }
    }

    let schema = match source {
        SchemaSource::Given(s) => s.clone(),
        SchemaSource::Infer { categorical, target } => infer_schema(&header, &cells, categorical, target.as_deref())?,
    };

    let mut by_name: BTreeMap<&str, usize> = BTreeMap::new();
    for (j, h) in header.iter().enumerate() {
        if by_name.insert(h.as_str(), j).is_some() {
            return Err(Error::Parse(format!("duplicate header `{h}`")));
        }
    }
    let expected = schema.header();
    if expected.len() != header.len() || expected.iter().any(|name| !by_name.contains_key(name)) {
        return Err(Error::SchemaMismatch(format!(
            "header [{}] does not match schema columns [{}]",
            header.join(","),
            expected.join(",")
        )));
    }

    let mut columns = Vec::with_capacity(schema.len());
    for col in schema.columns() {
        let raw = &cells[by_name[col.name.as_str()]];
        columns.push(match &col.kind {
            ColumnKind::Numeric => ColumnData::Numeric(parse_numeric(&col.name, raw)?),
            ColumnKind::Categorical { categories } => {
                let lookup: BTreeMap<&str, usize> =
                    categories.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
                let idx = raw
                    .iter()
                    .map(|cell| {
                        lookup.get(cell).copied().ok_or_else(|| Error::UnknownCategory {
                            column: col.name.clone(),
                            value: cell.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ColumnData::Categorical(idx)
            }
        });
    }
    let target = match schema.target() {
        Some(t) => Some(parse_numeric(t, &cells[by_name[t]])?),
        None => None,
    };
    Dataset::new(schema, columns, target)
}

fn parse_numeric(name: &str, raw: &[&str]) -> Result<Vec<f64>> {
    raw.iter()
        .enumerate()
        .map(|(i, cell)| {
            parse_number(cell)
                .ok_or_else(|| Error::Parse(format!("row {i}, column `{name}`: `{cell}` is not a finite number")))
        })
        .collect()
}

fn infer_schema(header: &[String], cells: &[Vec<&str>], categorical: &[String], target: Option<&str>) -> Result<Schema> {
    let mut columns = Vec::new();
    for (name, raw) in header.iter().zip(cells) {
        if Some(name.as_str()) == target {
            continue;
        }
        let forced = categorical.iter().any(|c| c == name);
        if !forced && raw.iter().all(|c| parse_number(c).is_some()) {
            columns.push(Column::numeric(name.clone()));
        } else {
            let mut cats: Vec<String> = Vec::new();
            for cell in raw {
                if !cats.iter().any(|c| c == cell) {
                    cats.push(cell.to_string());
                }
            }
            columns.push(Column::categorical(name.clone(), cats));
        }
    }
    if let Some(t) = target {
        if !header.iter().any(|h| h == t) {
            return Err(Error::SchemaMismatch(format!("target column `{t}` not in header")));
        }
    }
    Schema::new(columns, target.map(ToString::to_string))
}

/// Writes features in schema order then the target. Numbers use Rust's
/// shortest round-trip formatting, so parsing the output recovers every bit.
pub fn format_csv(data: &Dataset) -> String {
    let schema = data.schema();
    let mut out = String::new();
    out.push_str(&schema.header().join(","));
    out.push('\n');
    for i in 0..data.n() {
        for (j, (col, values)) in schema.columns().iter().zip(data.columns()).enumerate() {
            if j > 0 {
                out.push(',');
            }
            match (values, &col.kind) {
                (ColumnData::Numeric(v), _) => {
                    let _ = write!(out, "{}", v[i]);
                }
                (ColumnData::Categorical(v), ColumnKind::Categorical { categories }) => {
                    out.push_str(&categories[v[i]]);
                }
                (ColumnData::Categorical(_), ColumnKind::Numeric) => unreachable!("validated at construction"),
            }
        }
        if let Some(t) = data.target() {
            if !schema.is_empty() {
                out.push(',');
            }
            let _ = write!(out, "{}", t[i]);
        }
        out.push('\n');
    }
    out
}
