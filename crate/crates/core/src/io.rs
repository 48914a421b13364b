//! `x,y` point CSV reading and writing.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::geometry::{Point2, PointSet};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no points found")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses `x,y` rows. Blank lines and `#` comments are skipped; a leading
/// `x,y` header is optional.
pub fn parse_points_csv(text: &str) -> Result<PointSet<f64>, CsvError> {
    let mut points = Vec::new();
    let mut seen_row = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !seen_row
            && fields.len() == 2
            && fields[0].eq_ignore_ascii_case("x")
            && fields[1].eq_ignore_ascii_case("y")
        {
            seen_row = true;
            continue;
        }
        seen_row = true;
        let err = |message: String| CsvError::Parse {
            line: idx + 1,
            message,
        };
        if fields.len() != 2 {
            return Err(err(format!("expected 2 fields, found {}", fields.len())));
        }
        let parse = |s: &str| -> Result<f64, CsvError> {
            let v: f64 = s
                .parse()
                .map_err(|_| err(format!("invalid number `{s}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("non-finite coordinate `{s}`")))
            }
        };
        points.push(Point2::new(parse(fields[0])?, parse(fields[1])?));
    }
    if points.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(PointSet::new(points))
}

/// Shortest round-trip decimal form, so parsing reproduces every bit.
pub fn write_points_csv(points: &PointSet<f64>) -> String {
    let mut out = String::with_capacity(points.len() * 40 + 4);
    out.push_str("x,y\n");
    for p in points.iter() {
        writeln!(out, "{},{}", p.x, p.y).expect("writing to a String");
    }
    out
}

pub fn read_points_file(path: impl AsRef<Path>) -> Result<PointSet<f64>, CsvError> {
    parse_points_csv(&std::fs::read_to_string(path)?)
}

pub fn write_points_file(path: impl AsRef<Path>, points: &PointSet<f64>) -> Result<(), CsvError> {
    std::fs::write(path, write_points_csv(points))?;
    Ok(())
}
