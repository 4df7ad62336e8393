//! Plain-text point files: one point per line, coordinates separated by
//! whitespace or commas, `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

pub fn parse_points(text: &str, source_name: &str) -> Result<PointSet> {
    let mut points: Option<PointSet> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            source_name: source_name.to_string(),
            line: k + 1,
            message,
        };
        let coords = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(format!("not a finite number: {t:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let set = points.get_or_insert_with(|| PointSet::new(coords.len()));
        if coords.len() != set.dim() {
            return Err(parse_err(format!(
                "expected {} coordinates, found {}",
                set.dim(),
                coords.len()
            )));
        }
        set.push(&coords)?;
    }
    points.ok_or_else(|| Error::Parse {
        source_name: source_name.to_string(),
        line: 0,
        message: "no points".into(),
    })
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points(&text, &path.display().to_string())
}

/// Points with 17 significant digits, one per line.
pub fn format_points(points: &PointSet) -> String {
    let mut s = String::new();
    for p in points.iter() {
        let c: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(s, "{}", c.join(" ")).unwrap();
    }
    s
}

pub fn write_points(path: &Path, points: &PointSet, header: &str) -> Result<()> {
    let mut s = String::new();
    for line in header.lines() {
        writeln!(s, "# {line}").unwrap();
    }
    s.push_str(&format_points(points));
    write_text(path, &s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
