//! Legacy ASCII VTK output. Cells are written as their sub-simplex
//! decomposition, each sub-simplex carrying the data of its cell.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use friedrichs_core::{PolyMesh, Vec3};

/// A cell-data array: one value per element, `components` entries each.
pub struct CellArray<'a> {
    pub name: &'a str,
    pub components: usize,
    pub values: &'a [f64],
}

pub fn format_vtk(mesh: &PolyMesh, title: &str, arrays: &[CellArray<'_>]) -> Result<String> {
    let dim = mesh.dim();
    let npts = dim + 1;
    let mut points: Vec<Vec3> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    let mut tmp = Vec::new();
    for t in 0..mesh.n_elements() {
        tmp.clear();
        mesh.element_simplices(t, &mut tmp);
        points.extend_from_slice(&tmp);
        owner.extend(std::iter::repeat_n(t, tmp.len() / npts));
    }
    for a in arrays {
        if a.components == 0 || a.values.len() != a.components * mesh.n_elements() {
            bail!("cell array `{}` has {} values for {} cells", a.name, a.values.len(), mesh.n_elements());
        }
    }
    let ncells = owner.len();
    let mut s = String::new();
    writeln!(s, "# vtk DataFile Version 3.0")?;
    writeln!(s, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID")?;
    writeln!(s, "POINTS {} double", points.len())?;
    for p in &points {
        writeln!(s, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    writeln!(s, "CELLS {} {}", ncells, ncells * (npts + 1))?;
    for c in 0..ncells {
        write!(s, "{npts}")?;
        for i in 0..npts {
            write!(s, " {}", c * npts + i)?;
        }
        s.push('\n');
    }
    let cell_type = if dim == 3 { 10 } else { 5 };
    writeln!(s, "CELL_TYPES {ncells}")?;
    for _ in 0..ncells {
        writeln!(s, "{cell_type}")?;
    }
    if !arrays.is_empty() {
        writeln!(s, "CELL_DATA {ncells}")?;
    }
    for a in arrays {
        if a.components == 3 {
            writeln!(s, "VECTORS {} double", a.name)?;
        } else {
            writeln!(s, "SCALARS {} double {}\nLOOKUP_TABLE default", a.name, a.components)?;
        }
        for &t in &owner {
            let v = &a.values[t * a.components..(t + 1) * a.components];
            let line: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(s, "{}", line.join(" "))?;
        }
    }
    Ok(s)
}

pub fn write_vtk(path: &Path, mesh: &PolyMesh, title: &str, arrays: &[CellArray<'_>]) -> Result<()> {
    let text = format_vtk(mesh, title, arrays)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use friedrichs_core::mesh::{generate_cartesian, Extent};

    #[test]
    fn cube_cells_are_split_into_tets() {
        let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
        let vals = [2.0];
        let s = format_vtk(&mesh, "cube", &[CellArray { name: "u", components: 1, values: &vals }]).unwrap();
        // 6 quads fanned into 4 triangles each, coned from the centre
        assert!(s.contains("CELLS 24 120"));
        assert!(s.contains("CELL_DATA 24"));
        assert_eq!(s.matches("2.0000000000000000e0").count(), 24);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
        assert!(format_vtk(&mesh, "x", &[CellArray { name: "u", components: 3, values: &[1.0] }]).is_err());
    }
}
