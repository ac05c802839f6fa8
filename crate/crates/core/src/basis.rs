//! Scaled monomial bases on elements and faces, L2 projections and the
//! hybrid coefficient vector.
//!
//! Coefficient blocks are component-major: entry `c * nb + i` multiplies
//! basis function `i` in component `c`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{cholesky, lower_inverse, DMat};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::{Entity, PolyMesh};
use crate::quadrature::{QuadRule, SimplexRules};
use crate::small::SmallVec;

/// `C(k + d, d)`, the dimension of `P^k` in `d` variables.
pub fn poly_dim(degree: usize, vars: usize) -> usize {
    (1..=vars).fold(1, |acc, i| acc * (degree + i) / i)
}

/// Monomial exponents in `vars ≤ 3` local coordinates up to total degree
/// `degree`, sorted by degree then lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomials {
    vars: usize,
    degree: usize,
    exps: Vec<[u8; 3]>,
}

impl Monomials {
    pub fn new(vars: usize, degree: usize) -> Self {
        assert!(vars <= 3);
        let mut exps = Vec::with_capacity(poly_dim(degree, vars));
        for total in 0..=degree {
            for a in (0..=total).rev() {
                for b in (0..=total - a).rev() {
                    let c = total - a - b;
                    let e = [a as u8, b as u8, c as u8];
                    if (vars < 3 && c > 0) || (vars < 2 && b > 0) || (vars == 0 && a > 0) {
                        continue;
                    }
                    exps.push(e);
                }
            }
        }
        debug_assert_eq!(exps.len(), poly_dim(degree, vars));
        Monomials { vars, degree, exps }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn powers(&self, xi: &[f64; 3]) -> [[f64; 8]; 3] {
        let mut p = [[1.0; 8]; 3];
        for (j, row) in p.iter_mut().enumerate().take(self.vars) {
            for e in 1..=self.degree {
                row[e] = row[e - 1] * xi[j];
            }
        }
        p
    }

    pub fn eval(&self, xi: &[f64; 3], out: &mut [f64]) {
        let p = self.powers(xi);
        for (o, e) in out.iter_mut().zip(&self.exps) {
            *o = p[0][e[0] as usize] * p[1][e[1] as usize] * p[2][e[2] as usize];
        }
    }

    /// Values and derivatives with respect to the local coordinates.
    pub fn eval_grad(&self, xi: &[f64; 3], vals: &mut [f64], grads: &mut [[f64; 3]]) {
        let p = self.powers(xi);
        for ((v, g), e) in vals.iter_mut().zip(grads.iter_mut()).zip(&self.exps) {
            let [a, b, c] = [e[0] as usize, e[1] as usize, e[2] as usize];
            *v = p[0][a] * p[1][b] * p[2][c];
            g[0] = if a > 0 { a as f64 * p[0][a - 1] * p[1][b] * p[2][c] } else { 0.0 };
            g[1] = if b > 0 { b as f64 * p[0][a] * p[1][b - 1] * p[2][c] } else { 0.0 };
            g[2] = if c > 0 { c as f64 * p[0][a] * p[1][b] * p[2][c - 1] } else { 0.0 };
        }
    }
}

/// Affine local coordinates `ξ_j = a_j · (x − x_Y) / h_Y` on an entity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFrame {
    pub center: Vec3,
    pub scale: f64,
    pub axes: [Vec3; 3],
}

impl LocalFrame {
    pub fn element(mesh: &PolyMesh, t: usize) -> Self {
        let el = mesh.element(t);
        LocalFrame {
            center: el.barycenter,
            scale: 1.0 / el.diameter,
            axes: [Vec3::unit(0), Vec3::unit(1), Vec3::unit(2)],
        }
    }

    /// Orthonormal tangent frame of a face. The first tangent is the
    /// projection of the canonical axis least aligned with `n_F`.
    pub fn face(mesh: &PolyMesh, f: usize) -> Self {
        let face = mesh.face(f);
        let n = face.normal;
        let mut j = 0;
        for i in 1..mesh.dim() {
            if n[i].abs() < n[j].abs() {
                j = i;
            }
        }
        let e = Vec3::unit(j);
        let t1 = (e - n * n.dot(&e)).normalized();
        let t2 = n.cross(&t1);
        LocalFrame {
            center: face.barycenter,
            scale: 1.0 / face.diameter,
            axes: [t1, t2, n],
        }
    }

    #[inline]
    pub fn coords(&self, x: Vec3) -> [f64; 3] {
        let d = (x - self.center) * self.scale;
        [self.axes[0].dot(&d), self.axes[1].dot(&d), self.axes[2].dot(&d)]
    }
}

/// Scalar basis of `P^k(Y)`, optionally orthonormalized.
#[derive(Clone, Copy, Debug)]
pub struct ScalarBasis<'a> {
    mono: &'a Monomials,
    frame: LocalFrame,
    transform: Option<&'a DMat>,
}

impl<'a> ScalarBasis<'a> {
    pub fn new(mono: &'a Monomials, frame: LocalFrame, transform: Option<&'a DMat>) -> Self {
        ScalarBasis { mono, frame, transform }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mono.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.mono.is_empty()
    }

    pub fn eval(&self, x: Vec3, out: &mut [f64]) {
        self.mono.eval(&self.frame.coords(x), out);
        if let Some(t) = self.transform {
            apply_lower(t, out);
        }
    }

    /// Values and physical gradients.
    pub fn eval_grad(&self, x: Vec3, vals: &mut [f64], grads: &mut [Vec3]) {
        let n = self.len();
        let mut local = [[0.0; 3]; 84];
        self.mono.eval_grad(&self.frame.coords(x), vals, &mut local[..n]);
        let ax = &self.frame.axes;
        for (g, l) in grads.iter_mut().zip(&local[..n]) {
            *g = (ax[0] * l[0] + ax[1] * l[1] + ax[2] * l[2]) * self.frame.scale;
        }
        if let Some(t) = self.transform {
            apply_lower(t, vals);
            for c in 0..3 {
                let mut col: Vec<f64> = grads.iter().map(|g| g[c]).collect();
                apply_lower(t, &mut col);
                for (g, v) in grads.iter_mut().zip(col) {
                    g[c] = v;
                }
            }
        }
    }

    /// Mass matrix under `quad`.
    pub fn gram(&self, quad: &QuadRule) -> DMat {
        let n = self.len();
        let mut g = DMat::zeros(n, n);
        let mut phi = vec![0.0; n];
        for (x, w) in quad.points.iter().zip(&quad.weights) {
            self.eval(*x, &mut phi);
            for i in 0..n {
                let wi = w * phi[i];
                let row = g.row_mut(i);
                for j in 0..n {
                    row[j] += wi * phi[j];
                }
            }
        }
        g
    }
}

/// `v ← L v` for lower-triangular `L`, in place.
fn apply_lower(l: &DMat, v: &mut [f64]) {
    for i in (0..v.len()).rev() {
        let row = l.row(i);
        v[i] = (0..=i).map(|j| row[j] * v[j]).sum();
    }
}

/// Evaluate an `m`-vector polynomial from its component-major block.
pub fn eval_block(basis: &ScalarBasis<'_>, block: &[f64], m: usize, x: Vec3, phi: &mut [f64]) -> SmallVec {
    let nb = basis.len();
    basis.eval(x, &mut phi[..nb]);
    let mut out = SmallVec::zeros(m);
    for c in 0..m {
        out[c] = block[c * nb..(c + 1) * nb].iter().zip(&phi[..nb]).map(|(a, b)| a * b).sum();
    }
    out
}

/// L2 projection of an `m`-vector function onto `P^k(Y)^m`: solves
/// `M c = b` with the Gram matrix `M` and quadrature moments `b`.
/// Returns `None` if the Gram matrix is not positive definite.
pub fn l2_project(
    basis: &ScalarBasis<'_>,
    quad: &QuadRule,
    m: usize,
    mut f: impl FnMut(Vec3) -> SmallVec,
) -> Option<Vec<f64>> {
    let nb = basis.len();
    let gram = basis.gram(quad);
    let l = cholesky(&gram)?;
    let mut rhs = vec![0.0; m * nb];
    let mut phi = vec![0.0; nb];
    for (x, w) in quad.points.iter().zip(&quad.weights) {
        basis.eval(*x, &mut phi);
        let val = f(*x);
        for c in 0..m {
            let wc = w * val[c];
            for (r, p) in rhs[c * nb..(c + 1) * nb].iter_mut().zip(&phi) {
                *r += wc * p;
            }
        }
    }
    for c in 0..m {
        cholesky_solve(&l, &mut rhs[c * nb..(c + 1) * nb]);
    }
    Some(rhs)
}

pub(crate) fn cholesky_solve(l: &DMat, b: &mut [f64]) {
    let n = b.len();
    for i in 0..n {
        let row = l.row(i);
        let s: f64 = (0..i).map(|j| row[j] * b[j]).sum();
        b[i] = (b[i] - s) / row[i];
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| l[(j, i)] * b[j]).sum();
        b[i] = (b[i] - s) / l[(i, i)];
    }
}

/// Coefficients of a discrete hybrid field: all element blocks, then all
/// face blocks, each of `m` components.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridField {
    pub degree: usize,
    pub m: usize,
    nb_element: usize,
    nb_face: usize,
    n_elements: usize,
    n_faces: usize,
    pub coeffs: Vec<f64>,
}

impl HybridField {
    pub fn zeros(degree: usize, m: usize, dim: usize, n_elements: usize, n_faces: usize) -> Self {
        let nb_element = poly_dim(degree, dim);
        let nb_face = poly_dim(degree, dim - 1);
        HybridField {
            degree,
            m,
            nb_element,
            nb_face,
            n_elements,
            n_faces,
            coeffs: vec![0.0; m * (nb_element * n_elements + nb_face * n_faces)],
        }
    }

    #[inline]
    pub fn element_block_len(&self) -> usize {
        self.m * self.nb_element
    }

    #[inline]
    pub fn face_block_len(&self) -> usize {
        self.m * self.nb_face
    }

    #[inline]
    pub fn face_offset(&self) -> usize {
        self.n_elements * self.element_block_len()
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_faces(&self) -> usize {
        self.n_faces
    }

    pub fn element_block(&self, t: usize) -> &[f64] {
        let b = self.element_block_len();
        &self.coeffs[t * b..(t + 1) * b]
    }

    pub fn element_block_mut(&mut self, t: usize) -> &mut [f64] {
        let b = self.element_block_len();
        &mut self.coeffs[t * b..(t + 1) * b]
    }

    pub fn face_block(&self, f: usize) -> &[f64] {
        let b = self.face_block_len();
        let o = self.face_offset();
        &self.coeffs[o + f * b..o + (f + 1) * b]
    }

    pub fn face_block_mut(&mut self, f: usize) -> &mut [f64] {
        let b = self.face_block_len();
        let o = self.face_offset();
        &mut self.coeffs[o + f * b..o + (f + 1) * b]
    }

    pub fn face_coeffs(&self) -> &[f64] {
        &self.coeffs[self.face_offset()..]
    }

    pub fn face_coeffs_mut(&mut self) -> &mut [f64] {
        let o = self.face_offset();
        &mut self.coeffs[o..]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn axpy(&mut self, a: f64, x: &HybridField) {
        for (y, x) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * x;
        }
    }
}

/// Discrete space `U_h^k`: bases, quadrature and block layout on a mesh.
#[derive(Clone, Debug)]
pub struct HybridSpace<'m> {
    mesh: &'m PolyMesh,
    degree: usize,
    m: usize,
    rules: SimplexRules,
    element_mono: Monomials,
    face_mono: Monomials,
    element_frames: Vec<LocalFrame>,
    face_frames: Vec<LocalFrame>,
    element_transforms: Option<Vec<DMat>>,
    face_transforms: Option<Vec<DMat>>,
}

impl<'m> HybridSpace<'m> {
    /// `quad_degree` is the exactness degree of every element and face rule.
    pub fn new(mesh: &'m PolyMesh, degree: usize, m: usize, quad_degree: usize, orthonormal: bool) -> Result<Self> {
        let dim = mesh.dim();
        let mut space = HybridSpace {
            mesh,
            degree,
            m,
            rules: SimplexRules::new(quad_degree),
            element_mono: Monomials::new(dim, degree),
            face_mono: Monomials::new(dim - 1, degree),
            element_frames: (0..mesh.n_elements()).map(|t| LocalFrame::element(mesh, t)).collect(),
            face_frames: (0..mesh.n_faces()).map(|f| LocalFrame::face(mesh, f)).collect(),
            element_transforms: None,
            face_transforms: None,
        };
        if orthonormal {
            let mut et = Vec::with_capacity(mesh.n_elements());
            for t in 0..mesh.n_elements() {
                et.push(space.orthonormalizer(Entity::Element(t))?);
            }
            let mut ft = Vec::with_capacity(mesh.n_faces());
            for f in 0..mesh.n_faces() {
                ft.push(space.orthonormalizer(Entity::Face(f))?);
            }
            space.element_transforms = Some(et);
            space.face_transforms = Some(ft);
        }
        Ok(space)
    }

    fn orthonormalizer(&self, entity: Entity) -> Result<DMat> {
        let quad = self.quadrature(entity)?;
        let gram = self.basis(entity).gram(&quad);
        let l = cholesky(&gram).ok_or_else(|| singular_gram(entity))?;
        Ok(lower_inverse(&l))
    }

    #[inline]
    pub fn mesh(&self) -> &'m PolyMesh {
        self.mesh
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of components `m`.
    #[inline]
    pub fn components(&self) -> usize {
        self.m
    }

    pub fn quad_degree(&self) -> usize {
        self.rules.degree
    }

    pub fn rules(&self) -> &SimplexRules {
        &self.rules
    }

    /// Scalar basis size on elements.
    #[inline]
    pub fn nb_element(&self) -> usize {
        self.element_mono.len()
    }

    /// Scalar basis size on faces.
    #[inline]
    pub fn nb_face(&self) -> usize {
        self.face_mono.len()
    }

    pub fn basis(&self, entity: Entity) -> ScalarBasis<'_> {
        match entity {
            Entity::Element(t) => self.element_basis(t),
            Entity::Face(f) => self.face_basis(f),
        }
    }

    pub fn element_basis(&self, t: usize) -> ScalarBasis<'_> {
        let tr = self.element_transforms.as_ref().map(|v| &v[t]);
        ScalarBasis::new(&self.element_mono, self.element_frames[t], tr)
    }

    pub fn face_basis(&self, f: usize) -> ScalarBasis<'_> {
        let tr = self.face_transforms.as_ref().map(|v| &v[f]);
        ScalarBasis::new(&self.face_mono, self.face_frames[f], tr)
    }

    pub fn quadrature(&self, entity: Entity) -> Result<QuadRule> {
        Ok(self.mesh.quadrature(entity, &self.rules)?)
    }

    pub fn zero_field(&self) -> HybridField {
        HybridField::zeros(self.degree, self.m, self.mesh.dim(), self.mesh.n_elements(), self.mesh.n_faces())
    }

    /// L2 projection onto `P^k(Y)^m`.
    pub fn project(&self, entity: Entity, f: impl FnMut(Vec3) -> SmallVec) -> Result<Vec<f64>> {
        let quad = self.quadrature(entity)?;
        l2_project(&self.basis(entity), &quad, self.m, f).ok_or_else(|| singular_gram(entity))
    }

    /// Hybrid interpolant: element and face L2 projections of `u`.
    pub fn interpolate(&self, mut u: impl FnMut(Vec3) -> SmallVec) -> Result<HybridField> {
        let mut field = self.zero_field();
        for t in 0..self.mesh.n_elements() {
            let block = self.project(Entity::Element(t), &mut u)?;
            field.element_block_mut(t).copy_from_slice(&block);
        }
        for f in 0..self.mesh.n_faces() {
            let block = self.project(Entity::Face(f), &mut u)?;
            field.face_block_mut(f).copy_from_slice(&block);
        }
        Ok(field)
    }

    /// Point values of the element polynomial of `field` on element `t`.
    pub fn eval_element(&self, field: &HybridField, t: usize, x: Vec3) -> SmallVec {
        let mut phi = vec![0.0; self.nb_element()];
        eval_block(&self.element_basis(t), field.element_block(t), self.m, x, &mut phi)
    }

    /// Point values of the face polynomial of `field` on face `f`.
    pub fn eval_face(&self, field: &HybridField, f: usize, x: Vec3) -> SmallVec {
        let mut phi = vec![0.0; self.nb_face()];
        eval_block(&self.face_basis(f), field.face_block(f), self.m, x, &mut phi)
    }
}

fn singular_gram(entity: Entity) -> Error {
    Error::SingularGram {
        entity: format!("{entity:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cartesian, Extent};

    #[test]
    fn dimensions() {
        assert_eq!(poly_dim(0, 3), 1);
        assert_eq!(poly_dim(2, 3), 10);
        assert_eq!(poly_dim(3, 2), 10);
        assert_eq!(poly_dim(4, 1), 5);
        for vars in 0..=3 {
            for k in 0..=6 {
                assert_eq!(Monomials::new(vars, k).len(), poly_dim(k, vars));
            }
        }
    }

    #[test]
    fn monomial_gradient_matches_difference() {
        let mono = Monomials::new(3, 4);
        let xi = [0.3, -0.2, 0.45];
        let n = mono.len();
        let mut v = vec![0.0; n];
        let mut g = vec![[0.0; 3]; n];
        mono.eval_grad(&xi, &mut v, &mut g);
        let h = 1e-6;
        for j in 0..3 {
            let mut p = xi;
            let mut q = xi;
            p[j] += h;
            q[j] -= h;
            let mut vp = vec![0.0; n];
            let mut vq = vec![0.0; n];
            mono.eval(&p, &mut vp);
            mono.eval(&q, &mut vq);
            for i in 0..n {
                assert!(((vp[i] - vq[i]) / (2.0 * h) - g[i][j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn orthonormal_basis_has_identity_gram() {
        let mesh = generate_cartesian(1, 3, Extent::unit(3)).unwrap();
        let space = HybridSpace::new(&mesh, 3, 1, 8, true).unwrap();
        for entity in [Entity::Element(0), Entity::Face(2)] {
            let quad = space.quadrature(entity).unwrap();
            let g = space.basis(entity).gram(&quad);
            let n = g.rows();
            for i in 0..n {
                for j in 0..n {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g[(i, j)] - e).abs() < 1e-10, "{entity:?} ({i},{j}) {}", g[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn face_frame_is_orthonormal() {
        let mesh = crate::mesh::generate_simplicial(2, 3, Extent::unit(3)).unwrap();
        for f in 0..mesh.n_faces() {
            let fr = LocalFrame::face(&mesh, f);
            for i in 0..3 {
                for j in 0..3 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((fr.axes[i].dot(&fr.axes[j]) - e).abs() < 1e-14);
                }
            }
        }
    }
}
