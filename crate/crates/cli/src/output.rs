//! CSV emission.

use crate::compute::Series;
use crate::config::{Column, RunConfig};
use crate::error::{CliError, Result};
use std::fs;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn write_series<W: Write>(out: &mut W, cfg: &RunConfig, series: &Series) -> std::io::Result<()> {
    writeln!(out, "# rtngeo {}", env!("CARGO_PKG_VERSION"))?;
    out.write_all(cfg.metadata().as_bytes())?;
    writeln!(out, "# coherence = {}", series.route)?;
    writeln!(out, "# phase_excluded_width = {:?}", series.excluded_width)?;
    for w in &series.warnings {
        writeln!(out, "# warning: {w}")?;
    }
    let header: Vec<&str> = cfg.columns.iter().map(|c| c.name()).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in &series.rows {
        let fields: Vec<String> = cfg
            .columns
            .iter()
            .map(|&c| match c {
                Column::NearZeroFlag => u8::from(row.near_zero).to_string(),
                _ => fmt_real(row.value(c)),
            })
            .collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Writes `contents` to `path` through a buffered writer.
pub fn write_file<F>(path: &Path, contents: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<fs::File>) -> std::io::Result<()>,
{
    let file = fs::File::create(path).map_err(CliError::io(path))?;
    let mut w = std::io::BufWriter::new(file);
    contents(&mut w).and_then(|_| w.flush()).map_err(CliError::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_real(f64::NAN), "NaN");
        assert_eq!(fmt_real(f64::NEG_INFINITY), "-inf");
    }
}
