//! Polytopal meshes: topology, geometry, orientation and quadrature.
//!
//! Every face carries one fixed unit normal `n_F` obtained from its stored
//! vertex ordering (right-hand rule in 3D; the tangent rotated clockwise in
//! 2D). The orientation `ω_TF ∈ {±1}` of a face relative to an incident
//! element is the sign of `n_F · (x_F − x_T)`. Boundary faces are flipped
//! on construction so that `n_F` points out of the domain.

mod format;
mod generate;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use format::{parse_polymesh, write_polymesh};
pub use generate::{generate_cartesian, generate_simplicial, Extent};

use crate::error::MeshError;
use crate::geometry::{diameter, Vec3};
use crate::quadrature::{simplex_measure, QuadRule, SimplexRules};

/// Relative planarity tolerance for polygonal faces (times `h_F`).
pub const PLANARITY_RTOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub normal: Vec3,
    pub barycenter: Vec3,
    pub measure: f64,
    pub diameter: f64,
    /// `(element, local face index)` for each incident element; the second
    /// slot is `None` on boundary faces.
    pub neighbors: [Option<(usize, usize)>; 2],
}

impl Face {
    #[inline]
    pub fn is_boundary(&self) -> bool {
        self.neighbors[1].is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub faces: Vec<usize>,
    /// `ω_TF` for each entry of `faces`.
    pub orientations: Vec<i8>,
    pub vertices: Vec<usize>,
    pub barycenter: Vec3,
    pub volume: f64,
    pub diameter: f64,
}

/// Either kind of mesh entity carrying polynomial unknowns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Element(usize),
    Face(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMesh {
    dim: usize,
    vertices: Vec<Vec3>,
    faces: Vec<Face>,
    elements: Vec<Element>,
    meshsize: f64,
}

/// Results of [`PolyMesh::check_invariants`].
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    /// `max_T |Σ_F ω_TF |F| n_F| / Σ_F |F|`
    pub closure_residual: f64,
    /// Interior faces whose two orientations do not cancel.
    pub orientation_failures: usize,
    /// Element–face pairs with `ω_TF n_F · (x_F − x_T) ≤ 0`.
    pub outward_failures: usize,
    /// Pairs with `h_F > h_T`.
    pub diameter_failures: usize,
    /// Faces not incident to one or two elements.
    pub incidence_failures: usize,
}

impl InvariantReport {
    pub fn holds(&self, closure_tol: f64) -> bool {
        self.closure_residual <= closure_tol
            && self.orientation_failures == 0
            && self.outward_failures == 0
            && self.diameter_failures == 0
            && self.incidence_failures == 0
    }
}

impl PolyMesh {
    /// Build a mesh from raw topology: faces as ordered vertex lists, cells
    /// as face lists. Computes normals, barycenters, measures, diameters,
    /// incidence and orientations, and validates the input.
    pub fn from_topology(
        dim: usize,
        vertices: Vec<Vec3>,
        face_vertices: Vec<Vec<usize>>,
        cell_faces: Vec<Vec<usize>>,
    ) -> Result<PolyMesh, MeshError> {
        if dim != 2 && dim != 3 {
            return Err(MeshError::BadDimension(dim));
        }
        let mut faces = Vec::with_capacity(face_vertices.len());
        for (fi, fv) in face_vertices.into_iter().enumerate() {
            faces.push(build_face(dim, &vertices, fi, fv)?);
        }

        let mut counts = vec![0usize; faces.len()];
        for (ti, cf) in cell_faces.iter().enumerate() {
            for &f in cf {
                if f >= faces.len() {
                    return Err(MeshError::DanglingFace { element: ti, face: f });
                }
                counts[f] += 1;
            }
        }
        if let Some((face, &count)) = counts.iter().enumerate().find(|(_, c)| **c == 0 || **c > 2) {
            return Err(MeshError::Incidence { face, count });
        }

        let mut elements = Vec::with_capacity(cell_faces.len());
        for (ti, cf) in cell_faces.into_iter().enumerate() {
            elements.push(build_element(dim, &vertices, &faces, ti, cf)?);
        }

        for (ti, el) in elements.iter().enumerate() {
            for (lf, &f) in el.faces.iter().enumerate() {
                let slot = &mut faces[f].neighbors;
                if slot[0].is_none() {
                    slot[0] = Some((ti, lf));
                } else {
                    slot[1] = Some((ti, lf));
                }
            }
        }

        for fi in 0..faces.len() {
            match faces[fi].neighbors {
                [Some((t1, l1)), Some((t2, l2))] => {
                    if elements[t1].orientations[l1] + elements[t2].orientations[l2] != 0 {
                        return Err(MeshError::InconsistentOrientation { face: fi });
                    }
                }
                [Some((t, l)), None] => {
                    if elements[t].orientations[l] < 0 {
                        let face = &mut faces[fi];
                        face.vertices.reverse();
                        face.normal = -face.normal;
                        elements[t].orientations[l] = 1;
                    }
                }
                _ => unreachable!("incidence validated above"),
            }
        }

        let meshsize = elements.iter().fold(0.0_f64, |h, e| h.max(e.diameter));
        Ok(PolyMesh {
            dim,
            vertices,
            faces,
            elements,
            meshsize,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    #[inline]
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    #[inline]
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    #[inline]
    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    #[inline]
    pub fn element(&self, t: usize) -> &Element {
        &self.elements[t]
    }

    #[inline]
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    #[inline]
    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Global meshsize `h = max_T h_T`.
    #[inline]
    pub fn meshsize(&self) -> f64 {
        self.meshsize
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| self.faces[f].is_boundary())
    }

    /// Push the vertices of the face sub-simplices (`dim` points each).
    /// Triangles and segments are their own decomposition; other polygons
    /// are fanned from the face barycenter.
    pub fn face_simplices(&self, f: usize, out: &mut Vec<Vec3>) {
        let face = &self.faces[f];
        let p = |i: usize| self.vertices[face.vertices[i]];
        if self.dim == 2 || face.vertices.len() == 3 {
            out.extend((0..face.vertices.len()).map(p));
            return;
        }
        let nv = face.vertices.len();
        for i in 0..nv {
            out.push(face.barycenter);
            out.push(p(i));
            out.push(p((i + 1) % nv));
        }
    }

    /// Push the vertices of the element sub-simplices (`dim + 1` points
    /// each): simplices are kept whole, other polytopes are coned from the
    /// element barycenter over the face decompositions.
    pub fn element_simplices(&self, t: usize, out: &mut Vec<Vec3>) {
        let el = &self.elements[t];
        if el.vertices.len() == self.dim + 1 && el.faces.len() == self.dim + 1 {
            out.extend(el.vertices.iter().map(|&v| self.vertices[v]));
            return;
        }
        let mut tmp = Vec::new();
        for &f in &el.faces {
            tmp.clear();
            self.face_simplices(f, &mut tmp);
            for chunk in tmp.chunks(self.dim) {
                out.push(el.barycenter);
                out.extend_from_slice(chunk);
            }
        }
    }

    /// Quadrature on an element or a face, exact for polynomials up to
    /// `rules.degree`.
    pub fn quadrature(&self, entity: Entity, rules: &SimplexRules) -> Result<QuadRule, MeshError> {
        let mut simplices = Vec::new();
        let (npts, h, label) = match entity {
            Entity::Element(t) => {
                self.element_simplices(t, &mut simplices);
                (self.dim + 1, self.elements[t].diameter, "element")
            }
            Entity::Face(f) => {
                self.face_simplices(f, &mut simplices);
                (self.dim, self.faces[f].diameter, "face")
            }
        };
        let sdim = npts - 1;
        let reference = rules.for_dim(sdim);
        let mut rule = QuadRule {
            points: Vec::with_capacity(reference.points.len() * simplices.len() / npts),
            weights: Vec::with_capacity(reference.points.len() * simplices.len() / npts),
            degree: rules.degree,
        };
        let tol = 1e-14 * crate::math::powi(h, sdim as u32);
        for chunk in simplices.chunks(npts) {
            let measure = simplex_measure(chunk);
            if measure <= tol {
                let id = match entity {
                    Entity::Element(t) => t,
                    Entity::Face(f) => f,
                };
                return Err(MeshError::DegenerateSubSimplex {
                    entity: format!("{label} {id}"),
                    measure,
                });
            }
            reference.map_onto(chunk, &mut rule);
        }
        Ok(rule)
    }

    /// Convenience wrapper building the reference rules on the fly.
    pub fn subentity_quadrature(&self, entity: Entity, degree: usize) -> Result<QuadRule, MeshError> {
        self.quadrature(entity, &SimplexRules::new(degree))
    }

    pub fn check_invariants(&self) -> InvariantReport {
        let mut report = InvariantReport {
            closure_residual: 0.0,
            orientation_failures: 0,
            outward_failures: 0,
            diameter_failures: 0,
            incidence_failures: 0,
        };
        for el in &self.elements {
            let mut sum = Vec3::ZERO;
            let mut area = 0.0;
            for (&f, &w) in el.faces.iter().zip(&el.orientations) {
                let face = &self.faces[f];
                sum += face.normal * (w as f64 * face.measure);
                area += face.measure;
                if (w as f64) * face.normal.dot(&(face.barycenter - el.barycenter)) <= 0.0 {
                    report.outward_failures += 1;
                }
                if face.diameter > el.diameter * (1.0 + 1e-14) {
                    report.diameter_failures += 1;
                }
            }
            report.closure_residual = report.closure_residual.max(sum.norm() / area);
        }
        let mut counts = vec![0usize; self.faces.len()];
        for el in &self.elements {
            for &f in &el.faces {
                counts[f] += 1;
            }
        }
        for (fi, face) in self.faces.iter().enumerate() {
            let expected = if face.is_boundary() { 1 } else { 2 };
            if counts[fi] != expected {
                report.incidence_failures += 1;
            }
            if let [Some((t1, l1)), Some((t2, l2))] = face.neighbors {
                if self.elements[t1].orientations[l1] + self.elements[t2].orientations[l2] != 0 {
                    report.orientation_failures += 1;
                }
            }
        }
        report
    }

    /// Shape-regularity diagnostic: `min` over element sub-simplices of
    /// inradius / `h_T`. Not enforced anywhere.
    pub fn regularity_proxy(&self) -> f64 {
        let mut worst = f64::INFINITY;
        let mut simplices = Vec::new();
        for t in 0..self.elements.len() {
            simplices.clear();
            self.element_simplices(t, &mut simplices);
            let h = self.elements[t].diameter;
            for s in simplices.chunks(self.dim + 1) {
                let r = inradius(s);
                worst = worst.min(r / h);
            }
        }
        worst
    }
}

fn inradius(s: &[Vec3]) -> f64 {
    match s.len() {
        3 => {
            let per = s[0].dist(&s[1]) + s[1].dist(&s[2]) + s[2].dist(&s[0]);
            2.0 * simplex_measure(s) / per
        }
        4 => {
            let faces = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
            let area: f64 = faces
                .iter()
                .map(|f| simplex_measure(&[s[f[0]], s[f[1]], s[f[2]]]))
                .sum();
            3.0 * simplex_measure(s) / area
        }
        _ => 0.0,
    }
}

fn build_face(dim: usize, vertices: &[Vec3], fi: usize, fv: Vec<usize>) -> Result<Face, MeshError> {
    if let Some(&vertex) = fv.iter().find(|&&v| v >= vertices.len()) {
        return Err(MeshError::DanglingVertex { face: fi, vertex });
    }
    let pts: Vec<Vec3> = fv.iter().map(|&v| vertices[v]).collect();
    let diam = diameter(&pts);
    if dim == 2 {
        if fv.len() != 2 || diam == 0.0 {
            return Err(MeshError::DegenerateFace { face: fi, min: 2 });
        }
        let t = pts[1] - pts[0];
        let len = t.norm();
        return Ok(Face {
            normal: Vec3::new(t[1] / len, -t[0] / len, 0.0),
            barycenter: (pts[0] + pts[1]) * 0.5,
            measure: len,
            diameter: len,
            vertices: fv,
            neighbors: [None, None],
        });
    }
    if fv.len() < 3 || diam == 0.0 {
        return Err(MeshError::DegenerateFace { face: fi, min: 3 });
    }
    // Newell's method: twice the vector area.
    let nv = pts.len();
    let mut area_vec = Vec3::ZERO;
    for i in 0..nv {
        area_vec += pts[i].cross(&pts[(i + 1) % nv]);
    }
    let area2 = area_vec.norm();
    if area2 <= 1e-14 * diam * diam {
        return Err(MeshError::DegenerateFace { face: fi, min: 3 });
    }
    let normal = area_vec * (1.0 / area2);
    let avg = pts.iter().fold(Vec3::ZERO, |s, p| s + *p) * (1.0 / nv as f64);
    let mut bary = Vec3::ZERO;
    let mut area = 0.0;
    for i in 0..nv {
        let a = pts[i];
        let b = pts[(i + 1) % nv];
        let sub = 0.5 * normal.dot(&(a - avg).cross(&(b - avg)));
        bary += (avg + a + b) * (sub / 3.0);
        area += sub;
    }
    bary = bary * (1.0 / area);
    let deviation = pts
        .iter()
        .fold(0.0_f64, |m, p| m.max(normal.dot(&(*p - bary)).abs()));
    let tolerance = PLANARITY_RTOL * diam;
    if deviation > tolerance {
        return Err(MeshError::NonPlanarFace {
            face: fi,
            deviation,
            tolerance,
        });
    }
    Ok(Face {
        vertices: fv,
        normal,
        barycenter: bary,
        measure: area,
        diameter: diam,
        neighbors: [None, None],
    })
}

fn build_element(
    dim: usize,
    vertices: &[Vec3],
    faces: &[Face],
    ti: usize,
    cf: Vec<usize>,
) -> Result<Element, MeshError> {
    let mut vids: Vec<usize> = cf.iter().flat_map(|&f| faces[f].vertices.iter().copied()).collect();
    vids.sort_unstable();
    vids.dedup();
    let pts: Vec<Vec3> = vids.iter().map(|&v| vertices[v]).collect();
    let diam = diameter(&pts);
    let center = pts.iter().fold(Vec3::ZERO, |s, p| s + *p) * (1.0 / pts.len() as f64);

    // Cone decomposition from the vertex average gives volume and centroid.
    let dimf = dim as f64;
    let mut volume = 0.0;
    let mut bary = Vec3::ZERO;
    for &f in &cf {
        let face = &faces[f];
        let height = face.normal.dot(&(face.barycenter - center)).abs();
        let sub = face.measure * height / dimf;
        // centroid of a cone = apex + d/(d+1) (face centroid − apex)
        bary += (center + (face.barycenter - center) * (dimf / (dimf + 1.0))) * sub;
        volume += sub;
    }
    let tol = 1e-14 * crate::math::powi(diam, dim as u32);
    if volume <= tol || !volume.is_finite() {
        return Err(MeshError::NonPositiveVolume { element: ti, volume });
    }
    bary = bary * (1.0 / volume);

    let mut orientations = Vec::with_capacity(cf.len());
    for &f in &cf {
        let face = &faces[f];
        let s = face.normal.dot(&(face.barycenter - bary));
        if s == 0.0 {
            return Err(MeshError::NonPositiveVolume { element: ti, volume: 0.0 });
        }
        orientations.push(if s > 0.0 { 1 } else { -1 });
    }
    Ok(Element {
        faces: cf,
        orientations,
        vertices: vids,
        barycenter: bary,
        volume,
        diameter: diam,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon() -> PolyMesh {
        let pts: Vec<Vec3> = (0..6)
            .map(|i| {
                let a = core::f64::consts::PI / 3.0 * i as f64;
                Vec3::new(1.3 * libm::cos(a) + 0.1 * i as f64, libm::sin(a), 0.0)
            })
            .collect();
        let faces = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        PolyMesh::from_topology(2, pts, faces, vec![vec![0, 1, 2, 3, 4, 5]]).unwrap()
    }

    #[test]
    fn hexagon_area_matches_shoelace() {
        let mesh = hexagon();
        let v = mesh.vertices();
        let shoelace = 0.5
            * (0..6)
                .map(|i| v[i][0] * v[(i + 1) % 6][1] - v[(i + 1) % 6][0] * v[i][1])
                .sum::<f64>()
                .abs();
        let q = mesh.subentity_quadrature(Entity::Element(0), 3).unwrap();
        assert!((q.measure() - shoelace).abs() < 1e-14 * shoelace);
        assert!((mesh.element(0).volume - shoelace).abs() < 1e-14 * shoelace);
        assert!(q.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn boundary_normals_point_outward() {
        let mesh = hexagon();
        for f in mesh.boundary_faces() {
            let face = mesh.face(f);
            assert!(face.normal.dot(&(face.barycenter - mesh.element(0).barycenter)) > 0.0);
            assert_eq!(mesh.element(0).orientations[face.neighbors[0].unwrap().1], 1);
        }
        assert!(mesh.check_invariants().holds(1e-13));
    }

    #[test]
    fn face_with_three_cells_is_rejected() {
        let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
        let verts = mesh.vertices().to_vec();
        let faces: Vec<Vec<usize>> = mesh.faces().iter().map(|f| f.vertices.clone()).collect();
        let cell = mesh.element(0).faces.clone();
        let err = PolyMesh::from_topology(3, verts, faces, vec![cell.clone(), cell.clone(), cell]).unwrap_err();
        assert!(matches!(err, MeshError::Incidence { count: 3, .. }));
    }

    #[test]
    fn dangling_face_reported() {
        let err = PolyMesh::from_topology(2, vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)], vec![vec![0, 1]], vec![vec![0, 3]])
            .unwrap_err();
        assert!(matches!(err, MeshError::DanglingFace { element: 0, face: 3 }));
    }

    #[test]
    fn non_planar_face_reported() {
        let verts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.1),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let err = PolyMesh::from_topology(3, verts, vec![vec![0, 1, 2, 3]], vec![vec![0]]).unwrap_err();
        assert!(matches!(err, MeshError::NonPlanarFace { face: 0, .. }));
    }
}
