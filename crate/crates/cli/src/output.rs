//! Plot-ready table output.
//!
//! Tables are CSV with a short `#` comment header that names the command, the
//! manifest file, and the resolved configuration. Floats are written with
//! shortest round-trip formatting, so reruns are byte-identical.

use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

pub fn write_table(
    path: &Path,
    title: &str,
    manifest_name: &str,
    echo: &str,
    columns: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<()> {
    let file = std::fs::File::create(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# {title}")?;
    writeln!(w, "# manifest: {manifest_name}")?;
    if !echo.is_empty() {
        writeln!(w, "# {echo}")?;
    }
    writeln!(w, "{columns}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

/// One-line echo of the resolved estimator configuration.
pub fn mfdfa_echo(resolved: &crate::config::ResolvedMfdfa) -> String {
    let fit = match resolved.fit_range {
        Some((lo, hi)) => format!("{lo}:{hi}"),
        None => "full".into(),
    };
    format!(
        "q={} scales={}..{}x{} poly_order={} both_ends={} fit={}",
        resolved.q_grid_spec,
        resolved.scales.first().copied().unwrap_or(0),
        resolved.scales.last().copied().unwrap_or(0),
        resolved.scales.len(),
        resolved.poly_order,
        resolved.both_ends,
        fit
    )
}
