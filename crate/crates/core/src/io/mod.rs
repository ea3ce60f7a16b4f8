//! File ingestion and result serialization.

mod curve;
mod mtx;
mod plot;

use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub use curve::{curve_csv, read_curve, write_curve, Curve, CurveFormat};
pub use mtx::{parse_matrix_market, read_matrix, read_matrix_with_limit, write_matrix, DEFAULT_DIMENSION_LIMIT};
pub use plot::{emit_plot_script, render_plot_script, PlotPanel};

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
