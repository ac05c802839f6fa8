//! Structured mesh generators on axis-aligned boxes.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::PolyMesh;
use crate::error::MeshError;
use crate::geometry::Vec3;

/// Axis-aligned box `[lo, hi]`; unused coordinates are ignored in 2D.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extent {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Extent {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Extent {
        Extent {
            lo: Vec3::new(lo[0], lo[1], lo[2]),
            hi: Vec3::new(hi[0], hi[1], hi[2]),
        }
    }

    /// The unit square or cube.
    pub fn unit(dim: usize) -> Extent {
        let hi = if dim == 2 {
            Vec3::new(1.0, 1.0, 0.0)
        } else {
            Vec3::new(1.0, 1.0, 1.0)
        };
        Extent { lo: Vec3::ZERO, hi }
    }
}

/// Deduplicates faces given as vertex lists, keyed by their sorted vertices.
#[derive(Default)]
struct FaceTable {
    index: BTreeMap<Vec<usize>, usize>,
    faces: Vec<Vec<usize>>,
}

impl FaceTable {
    fn insert(&mut self, verts: Vec<usize>) -> usize {
        let mut key = verts.clone();
        key.sort_unstable();
        let next = self.faces.len();
        let id = *self.index.entry(key).or_insert(next);
        if id == next {
            self.faces.push(verts);
        }
        id
    }
}

struct Grid {
    dim: usize,
    n: usize,
    vertices: Vec<Vec3>,
}

impl Grid {
    fn new(n: usize, dim: usize, extent: Extent) -> Result<Grid, MeshError> {
        if dim != 2 && dim != 3 {
            return Err(MeshError::BadDimension(dim));
        }
        if n == 0 {
            return Err(MeshError::ZeroSubdivisions);
        }
        let nz = if dim == 3 { n + 1 } else { 1 };
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1) * nz);
        let coord = |axis: usize, i: usize| {
            let t = i as f64 / n as f64;
            extent.lo[axis] + (extent.hi[axis] - extent.lo[axis]) * t
        };
        for k in 0..nz {
            for j in 0..=n {
                for i in 0..=n {
                    let z = if dim == 3 { coord(2, k) } else { 0.0 };
                    vertices.push(Vec3::new(coord(0, i), coord(1, j), z));
                }
            }
        }
        Ok(Grid { dim, n, vertices })
    }

    fn vid(&self, i: usize, j: usize, k: usize) -> usize {
        i + (self.n + 1) * (j + (self.n + 1) * k)
    }

    /// Global vertex id of corner `c` (bit `a` = offset along axis `a`) of cell `(i, j, k)`.
    fn corner(&self, (i, j, k): (usize, usize, usize), c: usize) -> usize {
        self.vid(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let n = self.n;
        let nz = if self.dim == 3 { n } else { 1 };
        (0..nz).flat_map(move |k| (0..n).flat_map(move |j| (0..n).map(move |i| (i, j, k))))
    }
}

/// `n^d` quadrilaterals or hexahedra tiling `extent`.
pub fn generate_cartesian(n: usize, dim: usize, extent: Extent) -> Result<PolyMesh, MeshError> {
    let grid = Grid::new(n, dim, extent)?;
    let mut table = FaceTable::default();
    let mut cells = Vec::new();
    // Corner indices of each cell face, ordered around the face.
    let faces_2d: [&[usize]; 4] = [&[0, 1], &[1, 3], &[3, 2], &[2, 0]];
    let faces_3d: [&[usize]; 6] = [
        &[0, 2, 6, 4],
        &[1, 3, 7, 5],
        &[0, 1, 5, 4],
        &[2, 3, 7, 6],
        &[0, 1, 3, 2],
        &[4, 5, 7, 6],
    ];
    let local: &[&[usize]] = if dim == 2 { &faces_2d } else { &faces_3d };
    for cell in grid.cells() {
        let ids = local
            .iter()
            .map(|f| table.insert(f.iter().map(|&c| grid.corner(cell, c)).collect()))
            .collect();
        cells.push(ids);
    }
    PolyMesh::from_topology(dim, grid.vertices, table.faces, cells)
}

/// Cartesian grid with every cell split into `d!` simplices sharing the
/// main diagonal (Kuhn split); the result is conforming.
pub fn generate_simplicial(n: usize, dim: usize, extent: Extent) -> Result<PolyMesh, MeshError> {
    let grid = Grid::new(n, dim, extent)?;
    let mut table = FaceTable::default();
    let mut cells = Vec::new();
    let perms: Vec<Vec<usize>> = if dim == 2 {
        vec![vec![0, 1], vec![1, 0]]
    } else {
        vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ]
    };
    for cell in grid.cells() {
        for perm in &perms {
            // Monotone lattice path from corner 0 to the opposite corner.
            let mut corners = vec![0usize];
            let mut c = 0usize;
            for &axis in perm {
                c |= 1 << axis;
                corners.push(c);
            }
            let verts: Vec<usize> = corners.iter().map(|&c| grid.corner(cell, c)).collect();
            let ids = (0..=dim)
                .map(|skip| {
                    let face = verts
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, v)| *v)
                        .collect();
                    table.insert(face)
                })
                .collect();
            cells.push(ids);
        }
    }
    PolyMesh::from_topology(dim, grid.vertices, table.faces, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_counts() {
        let m = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
        assert_eq!((m.n_elements(), m.n_faces(), m.vertices().len()), (1, 6, 8));
        let m = generate_cartesian(2, 3, Extent::unit(3)).unwrap();
        assert_eq!((m.n_elements(), m.n_faces()), (8, 36));
        assert_eq!(generate_cartesian(0, 3, Extent::unit(3)).unwrap_err(), MeshError::ZeroSubdivisions);
    }

    #[test]
    fn square_diameters() {
        let m = generate_cartesian(4, 2, Extent::unit(2)).unwrap();
        let expected = libm::sqrt(2.0) / 4.0;
        for el in m.elements() {
            assert!((el.diameter - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn kuhn_counts_and_volume() {
        let m = generate_simplicial(1, 3, Extent::unit(3)).unwrap();
        assert_eq!(m.n_elements(), 6);
        let m = generate_simplicial(2, 2, Extent::unit(2)).unwrap();
        assert_eq!(m.n_elements(), 8);
        let area: f64 = m.elements().iter().map(|e| e.volume).sum();
        assert!((area - 1.0).abs() < 1e-14);
        let m = generate_simplicial(3, 3, Extent::unit(3)).unwrap();
        assert_eq!(m.n_faces(), 12 * 27 + 6 * 9);
    }
}
