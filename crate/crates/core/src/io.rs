//! Point CSV input and target specifications.
//!
//! Point files have a header `x,y`, `x,y,f` or `x,y,f1,f2`; lines starting
//! with `#` are ignored.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::geometry::Strengths;
use crate::vec2::Vec2;

/// Parsed contents of a point file.
#[derive(Clone, Debug, PartialEq)]
pub struct PointData {
    pub positions: Vec<Vec2>,
    pub strengths: Option<Strengths>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Layout {
    Bare,
    Scalar,
    Vector,
}

pub fn parse_points(text: &str) -> Result<PointData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header_line = |e: &csv::Error| e.position().map_or(1, |p| p.line() as usize);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: header_line(&e),
            message: e.to_string(),
        })?
        .clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let layout = match names.as_slice() {
        ["x", "y"] => Layout::Bare,
        ["x", "y", "f"] => Layout::Scalar,
        ["x", "y", "f1", "f2"] => Layout::Vector,
        _ => {
            let line = headers.position().map_or(1, |p| p.line() as usize);
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected header x,y[,f] or x,y,f1,f2, found {}",
                    names.join(",")
                ),
            });
        }
    };
    let mut positions = Vec::new();
    let mut scalar = Vec::new();
    let mut vector = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: header_line(&e),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let expected = names.len();
        if rec.len() != expected {
            return Err(Error::Parse {
                line,
                message: format!("expected {expected} fields, found {}", rec.len()),
            });
        }
        let mut vals = [0.0f64; 4];
        for (i, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {}: not a number: {field:?}", names[i]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("column {}: non-finite value", names[i]),
                });
            }
            vals[i] = v;
        }
        positions.push(Vec2::new(vals[0], vals[1]));
        match layout {
            Layout::Bare => {}
            Layout::Scalar => scalar.push(vals[2]),
            Layout::Vector => vector.push(Vec2::new(vals[2], vals[3])),
        }
    }
    let strengths = match layout {
        Layout::Bare => None,
        Layout::Scalar => Some(Strengths::Scalar(scalar)),
        Layout::Vector => Some(Strengths::Vector(vector)),
    };
    Ok(PointData {
        positions,
        strengths,
    })
}

/// Where targets come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSpec {
    /// Targets are the sources themselves.
    Random,
    /// Uniform grid of `nx` by `ny` points `(i L/nx, j L/ny)`.
    Grid {
        nx: usize,
        ny: usize,
    },
    File(PathBuf),
}

// Keeps grid allocations sane.
const MAX_GRID_POINTS: usize = 1 << 26;

pub fn parse_target_spec(s: &str) -> Result<TargetSpec> {
    let bad = |m: String| Error::Parse {
        line: 0,
        message: m,
    };
    if s == "random" {
        return Ok(TargetSpec::Random);
    }
    if let Some(rest) = s.strip_prefix("grid:") {
        let (a, b) = rest
            .split_once(['x', 'X'])
            .ok_or_else(|| bad(format!("grid spec {rest:?} is not of the form MxN")))?;
        let parse = |t: &str| -> Result<usize> {
            let v: usize = t
                .trim()
                .parse()
                .map_err(|_| bad(format!("grid size {t:?} is not a positive integer")))?;
            if v == 0 {
                return Err(bad("grid size must be positive".into()));
            }
            Ok(v)
        };
        let (nx, ny) = (parse(a)?, parse(b)?);
        if nx.checked_mul(ny).is_none_or(|n| n > MAX_GRID_POINTS) {
            return Err(bad(format!("grid {nx}x{ny} is too large")));
        }
        return Ok(TargetSpec::Grid { nx, ny });
    }
    if let Some(path) = s.strip_prefix("file:") {
        if path.is_empty() {
            return Err(bad("empty target file path".into()));
        }
        return Ok(TargetSpec::File(PathBuf::from(path)));
    }
    Err(bad(format!(
        "unknown target spec {s:?}; expected random, grid:MxN or file:PATH"
    )))
}

/// Grid targets `(i L/nx, j L/ny)`, x fastest.
pub fn grid_targets(nx: usize, ny: usize, side: f64) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push(Vec2::new(
                i as f64 * side / nx as f64,
                j as f64 * side / ny as f64,
            ));
        }
    }
    out
}
