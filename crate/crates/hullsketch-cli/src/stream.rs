//! Forward-only input readers.
//!
//! The point reader wraps a buffered line iterator and exposes points in
//! stream order; it has no way to seek backward, which is what makes every
//! run of the tool honestly single-pass. Blank lines are skipped, all other
//! lines must parse, and the dimension of the first point (or the --d flag)
//! binds every later one.

use std::fs::File;
use std::io::{BufRead, BufReader, Lines};
use std::path::{Path, PathBuf};

use hullsketch::nalgebra::DMatrix;
use hullsketch::Point;

use crate::config::Format;
use crate::error::CliError;

pub struct PointReader {
    lines: Lines<BufReader<File>>,
    path: PathBuf,
    format: Format,
    line_no: usize,
    dim: Option<usize>,
}

impl PointReader {
    pub fn open(path: &Path, format: Format, dim: Option<usize>) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            lines: BufReader::new(file).lines(),
            path: path.to_path_buf(),
            format,
            line_no: 0,
            dim,
        })
    }

    fn parse_line(&self, line: &str) -> Result<Vec<f64>, CliError> {
        let parse_err = |reason: String| CliError::Parse {
            path: self.path.clone(),
            line: self.line_no,
            reason,
        };
        let coords = match self.format {
            Format::Csv => parse_csv_fields(line).map_err(parse_err)?,
            Format::Jsonl => serde_json::from_str::<Vec<f64>>(line)
                .map_err(|e| parse_err(format!("not a JSON array of numbers: {e}")))?,
        };
        if coords.is_empty() {
            return Err(parse_err("empty point".into()));
        }
        if let Some(bad) = coords.iter().find(|v| !v.is_finite()) {
            return Err(parse_err(format!("non-finite coordinate {bad}")));
        }
        Ok(coords)
    }
}

fn parse_csv_fields(line: &str) -> Result<Vec<f64>, String> {
    line.split(',')
        .enumerate()
        .map(|(i, field)| {
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("field {}: '{}' is not a number", i + 1, field.trim()))
        })
        .collect()
}

impl Iterator for PointReader {
    type Item = Result<Point, CliError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(source) => {
                    return Some(Err(CliError::Io {
                        path: self.path.clone(),
                        source,
                    }))
                }
            };
            self.line_no += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let coords = match self.parse_line(trimmed) {
                Ok(c) => c,
                Err(e) => return Some(Err(e)),
            };
            match self.dim {
                None => self.dim = Some(coords.len()),
                Some(expected) if expected != coords.len() => {
                    return Some(Err(CliError::DimensionMismatch {
                        path: self.path.clone(),
                        line: self.line_no,
                        expected,
                        got: coords.len(),
                    }));
                }
                Some(_) => {}
            }
            return Some(Ok(Point::from_vec(coords)));
        }
    }
}

/// Reads a square matrix from a CSV file: d lines of d comma-separated
/// numbers. Used for --reference matrix files.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row = parse_csv_fields(trimmed).map_err(|reason| CliError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            reason,
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::DimensionMismatch {
                    path: path.to_path_buf(),
                    line: line_no,
                    expected: first.len(),
                    got: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: "matrix file is empty".into(),
        });
    }
    if rows.len() != rows[0].len() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: rows.len(),
            reason: format!("matrix must be square, got {}x{}", rows.len(), rows[0].len()),
        });
    }
    let d = rows.len();
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}
