//! Voronoi meshes of a box: each cell is the box clipped by the bisector
//! half-spaces of its seed against all other seeds.

use std::collections::{BTreeMap, HashMap};

use friedrichs_core::mesh::Extent;
use friedrichs_core::{MeshError, PolyMesh, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which plane a cell face lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Label {
    Box(u8),
    Seed(usize),
}

#[derive(Clone, Debug)]
struct Polygon {
    label: Label,
    points: Vec<Vec3>,
}

/// A convex cell as a list of planar polygons.
#[derive(Clone, Debug)]
struct Cell {
    faces: Vec<Polygon>,
}

fn polygon_area(p: &[Vec3]) -> f64 {
    let mut n = Vec3::ZERO;
    for i in 0..p.len() {
        n += p[i].cross(&p[(i + 1) % p.len()]);
    }
    0.5 * n.norm()
}

impl Cell {
    fn from_box(e: &Extent) -> Cell {
        let (lo, hi) = (e.lo, e.hi);
        let corner = |i: usize| Vec3::new(
            if i & 1 == 0 { lo[0] } else { hi[0] },
            if i & 2 == 0 { lo[1] } else { hi[1] },
            if i & 4 == 0 { lo[2] } else { hi[2] },
        );
        // outward-ordered quads of the box, labelled -x, +x, -y, +y, -z, +z
        let quads: [[usize; 4]; 6] = [
            [0, 4, 6, 2],
            [1, 3, 7, 5],
            [0, 1, 5, 4],
            [2, 6, 7, 3],
            [0, 2, 3, 1],
            [4, 5, 7, 6],
        ];
        let faces = quads
            .iter()
            .enumerate()
            .map(|(i, q)| Polygon {
                label: Label::Box(i as u8),
                points: q.iter().map(|&c| corner(c)).collect(),
            })
            .collect();
        Cell { faces }
    }

    fn max_dist(&self, x: Vec3) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| f.points.iter())
            .fold(0.0, |m: f64, p| m.max(p.dist(&x)))
    }

    /// Keep the part with `n·x ≤ c`; the cut is labelled `label`.
    fn clip(&mut self, n: Vec3, c: f64, label: Label, tol: f64) {
        let outside = self
            .faces
            .iter()
            .flat_map(|f| f.points.iter())
            .any(|p| n.dot(p) - c > tol);
        if !outside {
            return;
        }
        let mut cap: Vec<Vec3> = Vec::new();
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        for f in &self.faces {
            let m = f.points.len();
            let d: Vec<f64> = f.points.iter().map(|p| n.dot(p) - c).collect();
            let mut out = Vec::with_capacity(m + 1);
            for i in 0..m {
                let j = (i + 1) % m;
                let (a, b) = (f.points[i], f.points[j]);
                if d[i] <= tol {
                    out.push(a);
                    if d[i].abs() <= tol {
                        cap.push(a);
                    }
                }
                if (d[i] < -tol && d[j] > tol) || (d[i] > tol && d[j] < -tol) {
                    let s = d[i] / (d[i] - d[j]);
                    let x = a + (b - a) * s;
                    out.push(x);
                    cap.push(x);
                }
            }
            if out.len() >= 3 && polygon_area(&out) > tol * tol {
                faces.push(Polygon { label: f.label, points: out });
            }
        }
        let mut uniq: Vec<Vec3> = Vec::new();
        for p in cap {
            if !uniq.iter().any(|q| q.dist(&p) <= tol) {
                uniq.push(p);
            }
        }
        if uniq.len() >= 3 {
            let centre = uniq.iter().fold(Vec3::ZERO, |s, p| s + *p) * (1.0 / uniq.len() as f64);
            let t1 = (uniq[0] - centre).normalized();
            let t2 = n.cross(&t1);
            uniq.sort_by(|a, b| {
                let (da, db) = (*a - centre, *b - centre);
                let aa = da.dot(&t2).atan2(da.dot(&t1));
                let ab = db.dot(&t2).atan2(db.dot(&t1));
                aa.total_cmp(&ab)
            });
            if polygon_area(&uniq) > tol * tol {
                faces.push(Polygon { label, points: uniq });
            }
        }
        self.faces = faces;
    }
}

/// Points of the body-centred cubic lattice with spacing `1/n` (relative to
/// the box) that lie in the closed box: the grid nodes and the cell centres.
pub fn bcc_seeds(n: usize, extent: &Extent) -> Vec<Vec3> {
    let d = extent.hi - extent.lo;
    let at = |i: f64, j: f64, k: f64| {
        extent.lo + Vec3::new(d[0] * i / n as f64, d[1] * j / n as f64, d[2] * k / n as f64)
    };
    let mut seeds = Vec::new();
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                seeds.push(at(i as f64, j as f64, k as f64));
            }
        }
    }
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                seeds.push(at(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5));
            }
        }
    }
    seeds
}

/// Displace every seed by a uniform random vector of length at most
/// `amplitude`, clamped to the box. Deterministic for a given `seed`.
pub fn jitter(seeds: &mut [Vec3], amplitude: f64, extent: &Extent, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in seeds.iter_mut() {
        let v = loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if v.norm() <= 1.0 {
                break v;
            }
        };
        let mut p = *s + v * amplitude;
        for i in 0..3 {
            p[i] = p[i].clamp(extent.lo[i], extent.hi[i]);
        }
        *s = p;
    }
}

/// Merges points closer than a tolerance by hashing them on a grid.
struct PointSet {
    tol: f64,
    grid: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<Vec3>,
}

impl PointSet {
    fn new(tol: f64) -> Self {
        PointSet { tol, grid: HashMap::new(), points: Vec::new() }
    }

    fn key(&self, p: Vec3, off: [i64; 3]) -> [i64; 3] {
        let h = 4.0 * self.tol;
        [
            (p[0] / h).floor() as i64 + off[0],
            (p[1] / h).floor() as i64 + off[1],
            (p[2] / h).floor() as i64 + off[2],
        ]
    }

    fn insert(&mut self, p: Vec3) -> usize {
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.grid.get(&self.key(p, [dx, dy, dz])) {
                        if let Some(&i) = ids.iter().find(|&&i| self.points[i].dist(&p) <= self.tol) {
                            return i;
                        }
                    }
                }
            }
        }
        let i = self.points.len();
        self.points.push(p);
        let k = self.key(p, [0, 0, 0]);
        self.grid.entry(k).or_default().push(i);
        i
    }
}

/// Voronoi mesh of the box for the given seeds, one cell per seed. Seeds
/// must be distinct and inside the closed box.
pub fn voronoi_mesh(seeds: &[Vec3], extent: &Extent) -> Result<PolyMesh, MeshError> {
    let scale = (extent.hi - extent.lo).norm();
    let tol = 1e-11 * scale;
    let n = seeds.len();

    let mut cells = Vec::with_capacity(n);
    for (i, &s) in seeds.iter().enumerate() {
        let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (s.dist(&seeds[j]), j)).collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut cell = Cell::from_box(extent);
        let mut radius = cell.max_dist(s);
        for (d, j) in others {
            if d > 2.0 * radius + tol {
                break;
            }
            let nrm = (seeds[j] - s) * (1.0 / d);
            let c = nrm.dot(&((s + seeds[j]) * 0.5));
            cell.clip(nrm, c, Label::Seed(j), tol);
            radius = cell.max_dist(s);
        }
        if cell.faces.len() < 4 {
            return Err(MeshError::NonPositiveVolume { element: i, volume: 0.0 });
        }
        cells.push(cell);
    }

    let mut points = PointSet::new(1e3 * tol);
    let mut face_index: BTreeMap<(usize, usize, u8), usize> = BTreeMap::new();
    let mut face_vertices: Vec<Vec<usize>> = Vec::new();
    let mut cell_faces: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (i, cell) in cells.iter().enumerate() {
        let mut list = Vec::with_capacity(cell.faces.len());
        for poly in &cell.faces {
            let mut ids: Vec<usize> = poly.points.iter().map(|p| points.insert(*p)).collect();
            ids.dedup();
            while ids.len() > 1 && ids.first() == ids.last() {
                ids.pop();
            }
            if ids.len() < 3 {
                continue;
            }
            let key = match poly.label {
                Label::Box(b) => (i, usize::MAX, b),
                Label::Seed(j) => (i.min(j), i.max(j), u8::MAX),
            };
            let f = *face_index.entry(key).or_insert_with(|| {
                face_vertices.push(ids.clone());
                face_vertices.len() - 1
            });
            let mut a = face_vertices[f].clone();
            a.sort_unstable();
            ids.sort_unstable();
            if a != ids {
                return Err(MeshError::Incidence { face: f, count: 0 });
            }
            list.push(f);
        }
        cell_faces.push(list);
    }
    PolyMesh::from_topology(3, points.points, face_vertices, cell_faces)
}

/// Voronoi mesh of BCC seeds with spacing `1/n`, optionally jittered by
/// `jitter_ratio / n` (relative to the box edge).
pub fn bcc_voronoi(n: usize, extent: &Extent, jitter_ratio: f64, seed: u64) -> Result<PolyMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::ZeroSubdivisions);
    }
    let mut seeds = bcc_seeds(n, extent);
    if jitter_ratio > 0.0 {
        let edge = (extent.hi - extent.lo).norm_inf();
        jitter(&mut seeds, jitter_ratio * edge / n as f64, extent, seed);
    }
    voronoi_mesh(&seeds, extent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_seed_gives_the_box() {
        let e = Extent::unit(3);
        let m = voronoi_mesh(&[Vec3::new(0.3, 0.4, 0.5)], &e).unwrap();
        assert_eq!(m.n_elements(), 1);
        assert_eq!(m.n_faces(), 6);
        assert!((m.element(0).volume - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_seeds_split_the_box() {
        let e = Extent::unit(3);
        let m = voronoi_mesh(&[Vec3::new(0.25, 0.5, 0.5), Vec3::new(0.75, 0.5, 0.5)], &e).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.n_faces(), 11);
        for t in 0..2 {
            assert!((m.element(t).volume - 0.5).abs() < 1e-14);
        }
    }
}
