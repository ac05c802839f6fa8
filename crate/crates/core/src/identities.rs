//! Slow pointwise evaluators of the discrete form and of the algebraic
//! identities it satisfies. They work directly from quadrature and share
//! nothing with the block assembly beyond the model and the bases, so they
//! serve as independent checks of it.

use crate::basis::HybridField;
use crate::discretization::Discretization;
use crate::error::Result;
use crate::geometry::Vec3;
use crate::mesh::Entity;
use crate::model::interface_stabilizer;
use crate::post::eval_block_grad;
use crate::small::{SmallMat, SmallVec};

/// `(H a1, b1) − (H a2, b2)` and `((a1 + a2)/2, H(b1 − b2)) + (H(a1 − a2), (b1 + b2)/2)`.
pub fn polarization(h: &SmallMat, a1: &SmallVec, b1: &SmallVec, a2: &SmallVec, b2: &SmallVec) -> (f64, f64) {
    let lhs = h.mul_vec(a1).dot(b1) - h.mul_vec(a2).dot(b2);
    let rhs = ((*a1 + *a2) * 0.5).dot(&h.mul_vec(&(*b1 - *b2))) + h.mul_vec(&(*a1 - *a2)).dot(&((*b1 + *b2) * 0.5));
    (lhs, rhs)
}

struct Point {
    x: Vec3,
    w: f64,
}

/// Values of `w_T`, `v_T`, `w_F`, `v_F` at a face point.
struct Traces {
    wt: SmallVec,
    vt: SmallVec,
    wf: SmallVec,
    vf: SmallVec,
}

fn element_points(disc: &Discretization<'_>, t: usize) -> Result<alloc::vec::Vec<Point>> {
    let q = disc.space.quadrature(Entity::Element(t))?;
    Ok(q.points.iter().zip(&q.weights).map(|(&x, &w)| Point { x, w }).collect())
}

fn face_points(disc: &Discretization<'_>, f: usize) -> Result<alloc::vec::Vec<Point>> {
    let q = disc.space.quadrature(Entity::Face(f))?;
    Ok(q.points.iter().zip(&q.weights).map(|(&x, &w)| Point { x, w }).collect())
}

fn traces(disc: &Discretization<'_>, w: &HybridField, v: &HybridField, t: usize, f: usize, x: Vec3) -> Traces {
    let s = &disc.space;
    Traces {
        wt: s.eval_element(w, t, x),
        vt: s.eval_element(v, t, x),
        wf: s.eval_face(w, f, x),
        vf: s.eval_face(v, f, x),
    }
}

/// `(A w, v)_T` and `(w, Ã v)_T` at one point, with `A = K + A_1` and
/// `Ã = Kᵀ − ∇·A − A_1`.
fn volume_terms(disc: &Discretization<'_>, w: &HybridField, v: &HybridField, t: usize, x: Vec3) -> (f64, f64) {
    let model = disc.model;
    let m = disc.space.components();
    let basis = disc.space.element_basis(t);
    let (wv, dw) = eval_block_grad(&basis, w.element_block(t), m, x);
    let (vv, dv) = eval_block_grad(&basis, v.element_block(t), m, x);
    let k = model.reaction(x);
    let mut aw = k.mul_vec(&wv);
    let mut tav = (k.transpose() - model.div_advection(x)).mul_vec(&vv);
    for i in 0..model.dim() {
        let a = model.advection(i, x);
        aw = aw + a.mul_vec(&dw[i]);
        tav = tav - a.mul_vec(&dv[i]);
    }
    (aw.dot(&vv), wv.dot(&tav))
}

/// Sum of a face-point functional over all `(T, F)` pairs.
fn sum_element_faces(
    disc: &Discretization<'_>,
    mut g: impl FnMut(usize, usize, f64, Vec3) -> f64,
) -> Result<f64> {
    let mesh = disc.mesh();
    let mut s = 0.0;
    for (t, el) in mesh.elements().iter().enumerate() {
        for (&f, &o) in el.faces.iter().zip(&el.orientations) {
            for p in face_points(disc, f)? {
                s += p.w * g(t, f, o as f64, p.x);
            }
        }
    }
    Ok(s)
}

fn sum_elements(disc: &Discretization<'_>, mut g: impl FnMut(usize, Vec3) -> f64) -> Result<f64> {
    let mut s = 0.0;
    for t in 0..disc.mesh().n_elements() {
        for p in element_points(disc, t)? {
            s += p.w * g(t, p.x);
        }
    }
    Ok(s)
}

/// `½ ((M_F + S^b_F + sign N_F) w_F, v_F)` over boundary faces.
fn boundary_sum(disc: &Discretization<'_>, w: &HybridField, v: &HybridField, sign: f64) -> Result<f64> {
    let mesh = disc.mesh();
    let model = disc.model;
    let mut s = 0.0;
    for f in mesh.boundary_faces() {
        let face = mesh.face(f);
        let t = face.neighbors[0].or(face.neighbors[1]).map(|n| n.0).unwrap_or(0);
        let kind = model.boundary_kind(face.barycenter);
        let pr = disc.refs.elements[t].penalty_ref;
        for p in face_points(disc, f)? {
            let n = face.normal;
            let op = model.boundary_operator(kind, p.x, n)
                + model.boundary_penalty(kind, p.x, n, pr)
                + model.normal_matrix(p.x, n).scaled(sign);
            let wf = disc.space.eval_face(w, f, p.x);
            let vf = disc.space.eval_face(v, f, p.x);
            s += 0.5 * p.w * op.mul_vec(&wf).dot(&vf);
        }
    }
    Ok(s)
}

/// `r_flat Σ_T h_T Σ_F (w_F − w_T, v_F − v_T)_F + j_h(w, v)`, with the
/// floored jump weight in place of `r_flat`.
fn jump_terms(disc: &Discretization<'_>, w: &HybridField, v: &HybridField) -> Result<f64> {
    let weight = disc.refs.jump_weight;
    sum_element_faces(disc, |t, f, _, x| {
        let tr = traces(disc, w, v, t, f, x);
        let (jw, jv) = (tr.wf - tr.wt, tr.vf - tr.vt);
        let n = disc.mesh().face(f).normal;
        let s = interface_stabilizer(
            disc.model,
            disc.options.stabilization,
            x,
            n,
            disc.refs.elements[t].penalty_ref,
        );
        weight * disc.mesh().element(t).diameter * jw.dot(&jv) + s.mul_vec(&jw).dot(&jv)
    })
}

/// `a_h(w, v)` term by term from its definition.
pub fn ah_direct(disc: &Discretization<'_>, w: &HybridField, v: &HybridField) -> Result<f64> {
    let vol = sum_elements(disc, |t, x| volume_terms(disc, w, v, t, x).0)?;
    let consistency = sum_element_faces(disc, |t, f, o, x| {
        let tr = traces(disc, w, v, t, f, x);
        let n = disc.model.normal_matrix(x, disc.mesh().face(f).normal);
        o * n.mul_vec(&(tr.wf - tr.wt)).dot(&((tr.vf + tr.vt) * 0.5))
    })?;
    Ok(vol + consistency + jump_terms(disc, w, v)? + boundary_sum(disc, w, v, -1.0)?)
}

/// `a_h(w, v)` from its reformulation with the averaged volume term
/// `½[(A w, v) + (w, Ã v)]` and the skew face term.
pub fn ah_reformulated(disc: &Discretization<'_>, w: &HybridField, v: &HybridField) -> Result<f64> {
    let vol = sum_elements(disc, |t, x| {
        let (a, b) = volume_terms(disc, w, v, t, x);
        0.5 * (a + b)
    })?;
    let skew = sum_element_faces(disc, |t, f, o, x| {
        let tr = traces(disc, w, v, t, f, x);
        let n = disc.model.normal_matrix(x, disc.mesh().face(f).normal);
        0.5 * o * (n.mul_vec(&tr.wf).dot(&tr.vt) - n.mul_vec(&tr.wt).dot(&tr.vf))
    })?;
    Ok(vol + skew + jump_terms(disc, w, v)? + boundary_sum(disc, w, v, 0.0)?)
}

/// Left and right sides of the global discrete integration by parts
/// formula, and the sum of the magnitudes of its four terms. The right side
/// is a sum of volume, face and boundary contributions that cancel to the
/// left side, so rounding errors scale with the terms rather than with the
/// result; use the third value as the floor of [`relative_gap`].
pub fn ibp_sides(disc: &Discretization<'_>, w: &HybridField, v: &HybridField) -> Result<(f64, f64, f64)> {
    let lhs = sum_elements(disc, |t, x| volume_terms(disc, w, v, t, x).0)?;
    let vol = sum_elements(disc, |t, x| volume_terms(disc, w, v, t, x).1)?;
    let faces = sum_element_faces(disc, |t, f, o, x| {
        let tr = traces(disc, w, v, t, f, x);
        let n = disc.model.normal_matrix(x, disc.mesh().face(f).normal);
        -o * (((tr.wf + tr.wt) * 0.5).dot(&n.mul_vec(&(tr.vf - tr.vt)))
            + n.mul_vec(&(tr.wf - tr.wt)).dot(&((tr.vf + tr.vt) * 0.5)))
    })?;
    let mut bnd = 0.0;
    let mesh = disc.mesh();
    for f in mesh.boundary_faces() {
        for p in face_points(disc, f)? {
            let n = disc.model.normal_matrix(p.x, mesh.face(f).normal);
            bnd += p.w * n.mul_vec(&disc.space.eval_face(w, f, p.x)).dot(&disc.space.eval_face(v, f, p.x));
        }
    }
    let scale = lhs.abs() + vol.abs() + faces.abs() + bnd.abs();
    Ok((lhs, vol + faces + bnd, scale))
}

/// `½((K + Kᵀ − ∇·A) v, v) + r_flat Σ_T |v|²_0,∂T + ½|v|²_b + |v|²_j`,
/// which equals `a_h(v, v)`.
pub fn coercivity_rhs(disc: &Discretization<'_>, v: &HybridField) -> Result<f64> {
    let vol = sum_elements(disc, |t, x| {
        let vt = disc.space.eval_element(v, t, x);
        disc.model.coercivity_field(x).mul_vec(&vt).dot(&vt)
    })?;
    Ok(vol + jump_terms(disc, v, v)? + boundary_sum(disc, v, v, 0.0)?)
}

/// Maximum over the listed identities of `|lhs − rhs| / max(|lhs|, |rhs|, floor)`.
pub fn relative_gap(lhs: f64, rhs: f64, floor: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarization_on_fixed_data() {
        let h = SmallMat::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, -1.0, 0.5], &[0.0, 0.5, 3.0]]);
        let a1 = SmallVec::from_slice(&[1.0, 2.0, 3.0]);
        let b1 = SmallVec::from_slice(&[-1.0, 0.5, 2.0]);
        let a2 = SmallVec::from_slice(&[0.3, -0.2, 1.0]);
        let b2 = SmallVec::from_slice(&[4.0, 1.0, -2.0]);
        let (l, r) = polarization(&h, &a1, &b1, &a2, &b2);
        assert!((l - r).abs() < 1e-13);
    }
}
