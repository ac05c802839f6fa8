//! Mesh files and matrix dumps.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use friedrichs_core::mesh::{parse_polymesh, write_polymesh};
use friedrichs_core::sparse::BlockSparse;
use friedrichs_core::PolyMesh;

/// Read a mesh in the ASCII polyhedral format.
pub fn load_mesh(path: &Path) -> Result<PolyMesh> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_polymesh(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn save_mesh(mesh: &PolyMesh, path: &Path) -> Result<()> {
    fs::write(path, write_polymesh(mesh)).with_context(|| format!("writing {}", path.display()))
}

/// Coordinate dump of a matrix: one `row col value` line per stored
/// nonzero, 0-based.
pub fn write_coo(a: &BlockSparse, out: &mut impl Write) -> std::io::Result<()> {
    for (i, j, v) in a.triplets() {
        if v != 0.0 {
            writeln!(out, "{i} {j} {v:.16e}")?;
        }
    }
    Ok(())
}

pub fn save_coo(a: &BlockSparse, path: &Path) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_coo(a, &mut w)?;
    w.flush()?;
    Ok(())
}
