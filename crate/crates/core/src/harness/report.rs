//! Report files: a CSV table plus a `.summary.txt` companion carrying
//! everything needed to reproduce it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::io::write_text;

/// Reproducibility metadata written next to every CSV.
#[derive(Clone, Debug, Default)]
pub struct ReportMeta {
    pub command: String,
    /// Hex digest of the canonical configuration.
    pub config_hash: String,
    /// The canonical configuration itself.
    pub config: String,
    pub grid: Vec<String>,
    pub tolerances: Vec<(String, f64)>,
    /// Free-form result lines.
    pub results: String,
}

impl ReportMeta {
    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "splinestab {}", crate::VERSION).unwrap();
        writeln!(s, "command = {}", self.command).unwrap();
        writeln!(s, "config_hash = {}", self.config_hash).unwrap();
        for g in &self.grid {
            writeln!(s, "grid = {g}").unwrap();
        }
        for (name, v) in &self.tolerances {
            writeln!(s, "tolerance {name} = {v:.3e}").unwrap();
        }
        writeln!(s, "[config]").unwrap();
        s.push_str(&self.config);
        writeln!(s, "[results]").unwrap();
        s.push_str(&self.results);
        s
    }
}

/// `rep.csv` -> `rep.summary.txt`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.txt")
}

/// Writes the CSV and its summary; returns the summary path.
pub fn write_report(csv_path: &Path, csv: &str, meta: &ReportMeta) -> Result<PathBuf> {
    write_text(csv_path, csv)?;
    let summary = summary_path(csv_path);
    write_text(&summary, &meta.render())?;
    Ok(summary)
}

/// Tolerances used across the library, for embedding in summaries.
pub fn library_tolerances() -> Vec<(String, f64)> {
    vec![
        ("interpolation".into(), crate::INTERPOLATION_TOL),
        ("rank".into(), crate::interpolation::RANK_TOL),
        ("condition_warn".into(), crate::interpolation::CONDITION_WARN),
        ("condition_max".into(), crate::interpolation::CONDITION_MAX),
        ("density_radius_inflation".into(), crate::density::RADIUS_INFLATION),
        ("density_precision".into(), crate::density::PRECISION_TOL),
        ("decay_floor".into(), crate::stability::DECAY_FLOOR),
        ("convergence_exact".into(), super::convergence::EXACT_TOL),
        ("convergence_noise_floor".into(), super::convergence::NOISE_FLOOR),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_next_to_csv() {
        assert_eq!(
            summary_path(Path::new("out/rep.csv")),
            PathBuf::from("out/rep.summary.txt")
        );
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        let meta = ReportMeta {
            command: "test".into(),
            config_hash: "00".into(),
            ..Default::default()
        };
        let s = write_report(&p, "x\n1\n", &meta).unwrap();
        let text = std::fs::read_to_string(s).unwrap();
        assert!(text.starts_with("splinestab "));
        assert!(text.contains("config_hash = 00"));
    }
}
