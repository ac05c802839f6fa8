//! ASCII polyhedral mesh format.
//!
//! ```text
//! # comment
//! $Nodes
//! <count>
//! x y z          (or `x y` for planar meshes)
//! $Faces
//! <count>
//! nv v0 v1 ...   (0-based; ordering fixes the face normal)
//! $Cells
//! <count>
//! nf f0 f1 ...   (0-based face indices)
//! ```

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use core::str::FromStr;

use super::PolyMesh;
use crate::error::MeshError;
use crate::geometry::Vec3;

struct Lines<'a> {
    inner: core::iter::Enumerate<core::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty, non-comment line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            self.last = i + 1;
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), MeshError> {
        let last = self.last;
        self.next().ok_or_else(|| parse_err(last + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_err(line: usize, message: String) -> MeshError {
    MeshError::Parse { line, message }
}

fn parse_num<T: FromStr>(line: usize, tok: &str) -> Result<T, MeshError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))
}

fn section_count(lines: &mut Lines<'_>, header: &str) -> Result<usize, MeshError> {
    let (ln, text) = lines.expect(header)?;
    if text != header {
        return Err(parse_err(ln, format!("expected `{header}`, found `{text}`")));
    }
    let (ln, text) = lines.expect("a count")?;
    parse_num(ln, text)
}

/// Parse a list line `n i0 i1 ... i(n-1)`.
fn index_list(ln: usize, text: &str) -> Result<Vec<usize>, MeshError> {
    let mut toks = text.split_whitespace();
    let n: usize = parse_num(ln, toks.next().unwrap_or(""))?;
    let list = toks.map(|t| parse_num(ln, t)).collect::<Result<Vec<usize>, _>>()?;
    if list.len() != n {
        return Err(parse_err(ln, format!("declared {n} entries, found {}", list.len())));
    }
    Ok(list)
}

/// Parse a mesh file; the dimension is inferred from the node coordinates.
pub fn parse_polymesh(text: &str) -> Result<PolyMesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let n_nodes = section_count(&mut lines, "$Nodes")?;
    let mut dim = 0;
    let mut vertices = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, t) = lines.expect("node coordinates")?;
        let coords = t
            .split_whitespace()
            .map(|tok| parse_num::<f64>(ln, tok))
            .collect::<Result<Vec<_>, _>>()?;
        if dim == 0 {
            dim = coords.len();
        }
        if coords.len() != dim || !(dim == 2 || dim == 3) {
            return Err(parse_err(ln, format!("expected {} coordinates, found {}", dim.max(2), coords.len())));
        }
        let z = if dim == 3 { coords[2] } else { 0.0 };
        vertices.push(Vec3::new(coords[0], coords[1], z));
    }
    let n_faces = section_count(&mut lines, "$Faces")?;
    let mut faces = Vec::with_capacity(n_faces);
    for _ in 0..n_faces {
        let (ln, t) = lines.expect("a face")?;
        faces.push(index_list(ln, t)?);
    }
    let n_cells = section_count(&mut lines, "$Cells")?;
    let mut cells = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let (ln, t) = lines.expect("a cell")?;
        cells.push(index_list(ln, t)?);
    }
    if let Some((ln, t)) = lines.next() {
        return Err(parse_err(ln, format!("trailing content `{t}`")));
    }
    PolyMesh::from_topology(dim.max(2), vertices, faces, cells)
}

/// Serialize a mesh in the same format. Face vertex order is the stored
/// one, so normals survive a round trip.
pub fn write_polymesh(mesh: &PolyMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "$Nodes\n{}", mesh.vertices().len());
    for v in mesh.vertices() {
        if mesh.dim() == 2 {
            let _ = writeln!(out, "{:?} {:?}", v[0], v[1]);
        } else {
            let _ = writeln!(out, "{:?} {:?} {:?}", v[0], v[1], v[2]);
        }
    }
    let join = |ids: &[usize]| {
        let mut s = ids.len().to_string();
        for i in ids {
            let _ = write!(s, " {i}");
        }
        s
    };
    let _ = writeln!(out, "$Faces\n{}", mesh.n_faces());
    for f in mesh.faces() {
        let _ = writeln!(out, "{}", join(&f.vertices));
    }
    let _ = writeln!(out, "$Cells\n{}", mesh.n_elements());
    for e in mesh.elements() {
        let _ = writeln!(out, "{}", join(&e.faces));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cartesian, Extent};

    const CUBE: &str = "# unit cube
$Nodes
8
0 0 0
1 0 0
0 1 0
1 1 0
0 0 1
1 0 1
0 1 1
1 1 1
$Faces
6
4 0 2 6 4
4 1 3 7 5
4 0 1 5 4
4 2 3 7 6
4 0 1 3 2
4 4 5 7 6
$Cells
1
6 0 1 2 3 4 5
";

    #[test]
    fn cube_file_matches_generator() {
        let parsed = parse_polymesh(CUBE).unwrap();
        let generated = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
        assert_eq!(parsed, generated);
    }

    #[test]
    fn round_trip() {
        let mesh = generate_cartesian(2, 2, Extent::unit(2)).unwrap();
        assert_eq!(parse_polymesh(&write_polymesh(&mesh)).unwrap(), mesh);
    }

    #[test]
    fn count_mismatch_reports_line() {
        let bad = CUBE.replace("4 0 1 5 4", "4 0 1 5");
        let err = parse_polymesh(&bad).unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 16, .. }), "{err:?}");
    }
}
