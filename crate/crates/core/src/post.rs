//! Numerical fluxes, conservation residuals, norms and errors.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{eval_block, HybridField, ScalarBasis};
use crate::discretization::Discretization;
use crate::error::Result;
use crate::geometry::Vec3;
use crate::math::sqrt;
use crate::mesh::Entity;
use crate::model::{interface_stabilizer, ExactSolution};
use crate::small::{SmallMat, SmallVec};

/// Values and partial derivatives of an `m`-vector block at `x`.
pub fn eval_block_grad(basis: &ScalarBasis<'_>, block: &[f64], m: usize, x: Vec3) -> (SmallVec, [SmallVec; 3]) {
    let nb = basis.len();
    let mut vals = vec![0.0; nb];
    let mut grads = vec![Vec3::ZERO; nb];
    basis.eval_grad(x, &mut vals, &mut grads);
    let mut v = SmallVec::zeros(m);
    let mut d = [SmallVec::zeros(m); 3];
    for c in 0..m {
        let b = &block[c * nb..(c + 1) * nb];
        for j in 0..nb {
            v[c] += b[j] * vals[j];
            for (l, dl) in d.iter_mut().enumerate() {
                dl[c] += b[j] * grads[j][l];
            }
        }
    }
    (v, d)
}

/// `A_1 v_T = Σ_i A^i ∂_i v_T` at `x` for the element block of `field` on `t`.
pub fn apply_a1(disc: &Discretization<'_>, field: &HybridField, t: usize, x: Vec3) -> SmallVec {
    let model = disc.model;
    let m = disc.space.components();
    let (_, d) = eval_block_grad(&disc.space.element_basis(t), field.element_block(t), m, x);
    let mut out = SmallVec::zeros(m);
    for (i, di) in d.iter().enumerate().take(model.dim()) {
        out = out + model.advection(i, x).mul_vec(di);
    }
    out
}

/// `Σ_T ‖v_T‖²_T`, square-rooted.
pub fn element_l2_norm(disc: &Discretization<'_>, field: &HybridField) -> Result<f64> {
    let mut s = 0.0;
    for t in 0..disc.mesh().n_elements() {
        let quad = disc.space.quadrature(Entity::Element(t))?;
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            let v = disc.space.eval_element(field, t, x);
            s += w * v.dot(&v);
        }
    }
    Ok(sqrt(s))
}

/// `‖f‖_Ω` of the model source.
pub fn source_l2_norm(disc: &Discretization<'_>) -> Result<f64> {
    let mut s = 0.0;
    for t in 0..disc.mesh().n_elements() {
        let quad = disc.space.quadrature(Entity::Element(t))?;
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            let f = disc.model.source(x);
            s += w * f.dot(&f);
        }
    }
    Ok(sqrt(s))
}

/// `r_flat h_T I + S^i_TF` at a face point of `t` (with the floored weight).
fn jump_operator(disc: &Discretization<'_>, t: usize, x: Vec3, n: Vec3) -> SmallMat {
    let m = disc.space.components();
    let h = disc.mesh().element(t).diameter;
    let s = interface_stabilizer(
        disc.model,
        disc.options.stabilization,
        x,
        n,
        disc.refs.elements[t].penalty_ref,
    );
    s + SmallMat::identity(m).scaled(disc.refs.jump_weight * h)
}

/// `½(M_F + S^b_F + sign N_F)` at a boundary face point.
fn boundary_operator(disc: &Discretization<'_>, t: usize, f: usize, x: Vec3, sign: f64) -> SmallMat {
    let model = disc.model;
    let face = disc.mesh().face(f);
    let (kind, n) = (model.boundary_kind(face.barycenter), face.normal);
    let pr = disc.refs.elements[t].penalty_ref;
    (model.boundary_operator(kind, x, n) + model.boundary_penalty(kind, x, n, pr) + model.normal_matrix(x, n).scaled(sign))
        .scaled(0.5)
}

/// The numerical flux `Φ_TF` of `field` on the `lf`-th face of `t`, as a
/// face block. Boundary faces include `−½(M_F + N_F + S^b_F) v_F`.
pub fn numerical_flux(disc: &Discretization<'_>, field: &HybridField, t: usize, lf: usize) -> Result<Vec<f64>> {
    let mesh = disc.mesh();
    let el = mesh.element(t);
    let f = el.faces[lf];
    let face = mesh.face(f);
    let omega = el.orientations[lf] as f64;
    let n = face.normal;
    let boundary = face.is_boundary();
    let space = &disc.space;
    space.project(Entity::Face(f), |x| {
        let vt = space.eval_element(field, t, x);
        let vf = space.eval_face(field, f, x);
        let nn = disc.model.normal_matrix(x, n);
        let mut phi = nn.mul_vec(&(vf + vt)) * (0.5 * omega)
            - jump_operator(disc, t, x, n).mul_vec(&(vf - vt));
        if boundary {
            phi = phi - boundary_operator(disc, t, f, x, 1.0).mul_vec(&vf);
        }
        phi
    })
}

/// L2 norm of a face block on face `f`.
fn face_block_norm(disc: &Discretization<'_>, f: usize, block: &[f64]) -> Result<f64> {
    let quad = disc.space.quadrature(Entity::Face(f))?;
    let basis = disc.space.face_basis(f);
    let mut phi = vec![0.0; basis.len()];
    let mut s = 0.0;
    for (&x, &w) in quad.points.iter().zip(&quad.weights) {
        let v = eval_block(&basis, block, disc.space.components(), x, &mut phi);
        s += w * v.dot(&v);
    }
    Ok(sqrt(s))
}

/// Residuals of the flux formulation, each divided by `scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationReport {
    /// `max_F ‖Φ_T1F + Φ_T2F‖_F` over interior faces.
    pub interface: f64,
    /// Largest local balance residual over elements and basis functions.
    pub balance: f64,
    /// `max_F ‖Φ_TF F + π_F ½(M_F + S^b_F − N_F) g‖_F` over boundary faces.
    pub boundary: f64,
    /// `max(‖u_h‖, ‖f‖)`; 1 if both vanish.
    pub scale: f64,
}

impl ConservationReport {
    pub fn max(&self) -> f64 {
        self.interface.max(self.balance).max(self.boundary)
    }
}

/// Check the local balance, flux continuity and boundary conditions of a
/// discrete solution. In the local balance the boundary faces enter with
/// the interior flux expression, whose extra `½(M_F + N_F + S^b_F) u_F`
/// part is tested against face functions only.
pub fn check_conservation(disc: &Discretization<'_>, u: &HybridField) -> Result<ConservationReport> {
    let mesh = disc.mesh();
    let model = disc.model;
    let space = &disc.space;
    let m = space.components();
    let nbt = space.nb_element();
    let scale = {
        let s = element_l2_norm(disc, u)?.max(source_l2_norm(disc)?);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    };

    let mut fluxes: Vec<Vec<Vec<f64>>> = Vec::with_capacity(mesh.n_elements());
    for (t, el) in mesh.elements().iter().enumerate() {
        let mut per = Vec::with_capacity(el.faces.len());
        for lf in 0..el.faces.len() {
            per.push(numerical_flux(disc, u, t, lf)?);
        }
        fluxes.push(per);
    }

    let mut interface = 0.0_f64;
    let mut boundary = 0.0_f64;
    for (f, face) in mesh.faces().iter().enumerate() {
        match face.neighbors {
            [Some((t1, l1)), Some((t2, l2))] => {
                let sum: Vec<f64> = fluxes[t1][l1].iter().zip(&fluxes[t2][l2]).map(|(a, b)| a + b).collect();
                interface = interface.max(face_block_norm(disc, f, &sum)?);
            }
            [Some((t, l)), None] | [None, Some((t, l))] => {
                let lift = space.project(Entity::Face(f), |x| {
                    boundary_operator(disc, t, f, x, -1.0).mul_vec(&model.boundary_datum(x))
                })?;
                let r: Vec<f64> = fluxes[t][l].iter().zip(&lift).map(|(a, b)| a + b).collect();
                boundary = boundary.max(face_block_norm(disc, f, &r)?);
            }
            [None, None] => {}
        }
    }

    // (u_T, Ã v_T)_T + Σ_F (Φ_TF, v_T)_F − (f, v_T)_T with Ã = Kᵀ − ∇·A − A_1
    let mut balance = 0.0_f64;
    let mut psi = vec![0.0; nbt];
    let mut grads = vec![Vec3::ZERO; nbt];
    for (t, el) in mesh.elements().iter().enumerate() {
        let basis = space.element_basis(t);
        let mut res = vec![0.0; m * nbt];
        let quad = space.quadrature(Entity::Element(t))?;
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            basis.eval_grad(x, &mut psi, &mut grads);
            let ut = eval_block(&basis, u.element_block(t), m, x, &mut vec![0.0; nbt]);
            let f = model.source(x);
            // Ã v for v = ψ_j e_c: rows of (Kᵀ − ∇·A) times ψ_j, minus Σ_i A^i e_c ∂_i ψ_j
            let kt = model.reaction(x).transpose() - model.div_advection(x);
            let ku = kt.transpose().mul_vec(&ut);
            let mut au = [SmallVec::zeros(m); 3];
            for (i, a) in au.iter_mut().enumerate().take(model.dim()) {
                *a = model.advection(i, x).transpose().mul_vec(&ut);
            }
            for c in 0..m {
                for j in 0..nbt {
                    let mut v = ku[c] * psi[j] - f[c] * psi[j];
                    for (i, a) in au.iter().enumerate().take(model.dim()) {
                        v -= a[c] * grads[j][i];
                    }
                    res[c * nbt + j] += w * v;
                }
            }
        }
        for (lf, &f) in el.faces.iter().enumerate() {
            let face = mesh.face(f);
            let fb = space.face_basis(f);
            let mut chi = vec![0.0; fb.len()];
            let quad = space.quadrature(Entity::Face(f))?;
            for (&x, &w) in quad.points.iter().zip(&quad.weights) {
                basis.eval(x, &mut psi);
                let mut phi = eval_block(&fb, &fluxes[t][lf], m, x, &mut chi);
                if face.is_boundary() {
                    let vf = space.eval_face(u, f, x);
                    phi = phi + boundary_operator(disc, t, f, x, 1.0).mul_vec(&vf);
                }
                for c in 0..m {
                    for j in 0..nbt {
                        res[c * nbt + j] += w * phi[c] * psi[j];
                    }
                }
            }
        }
        balance = res.iter().fold(balance, |a, r| a.max(r.abs()));
    }

    Ok(ConservationReport {
        interface: interface / scale,
        balance: balance / scale,
        boundary: boundary / scale,
        scale,
    })
}

/// The two triple norms of a discrete field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleNorm {
    /// `|||v|||_♭,h`.
    pub flat: f64,
    /// `|||v|||_h`, adding the `τ_T`-weighted `‖A_1 v_T‖²`.
    pub full: f64,
}

/// Squared contributions of the triple norm, kept separate for tests.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TripleNormParts {
    /// `r_flat Σ_T (‖v_T‖² + h_T Σ_F ‖v_F − v_T‖²)`.
    pub reaction: f64,
    /// `½ Σ_F ((M_F + S^b_F) v_F, v_F)_F` over boundary faces.
    pub boundary: f64,
    /// `j_h(v, v)`.
    pub jump: f64,
    /// `Σ_T τ_T ‖A_1 v_T‖²`.
    pub advective: f64,
}

pub fn triple_norm_parts(disc: &Discretization<'_>, v: &HybridField) -> Result<TripleNormParts> {
    let mesh = disc.mesh();
    let model = disc.model;
    let space = &disc.space;
    let r_flat = disc.refs.r_flat;
    let mut parts = TripleNormParts::default();
    for (t, el) in mesh.elements().iter().enumerate() {
        let refs = disc.refs.elements[t];
        let quad = space.quadrature(Entity::Element(t))?;
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            let vt = space.eval_element(v, t, x);
            parts.reaction += r_flat * w * vt.dot(&vt);
            let a1 = apply_a1(disc, v, t, x);
            parts.advective += refs.tau * w * a1.dot(&a1);
        }
        for &f in &el.faces {
            let face = mesh.face(f);
            let n = face.normal;
            let quad = space.quadrature(Entity::Face(f))?;
            for (&x, &w) in quad.points.iter().zip(&quad.weights) {
                let vt = space.eval_element(v, t, x);
                let vf = space.eval_face(v, f, x);
                let jump = vf - vt;
                parts.reaction += r_flat * el.diameter * w * jump.dot(&jump);
                let s = interface_stabilizer(model, disc.options.stabilization, x, n, refs.penalty_ref);
                parts.jump += w * s.mul_vec(&jump).dot(&jump);
                if face.is_boundary() {
                    let kind = model.boundary_kind(face.barycenter);
                    let b = model.boundary_operator(kind, x, n) + model.boundary_penalty(kind, x, n, refs.penalty_ref);
                    parts.boundary += 0.5 * w * b.mul_vec(&vf).dot(&vf);
                }
            }
        }
    }
    Ok(parts)
}

pub fn triple_norm(disc: &Discretization<'_>, v: &HybridField) -> Result<TripleNorm> {
    let p = triple_norm_parts(disc, v)?;
    let flat = p.reaction + p.boundary + p.jump;
    Ok(TripleNorm {
        flat: sqrt(flat.max(0.0)),
        full: sqrt((flat + p.advective).max(0.0)),
    })
}

/// Errors of a discrete solution against an exact solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    /// `|||I_h u − u_h|||_♭,h`.
    pub flat: f64,
    /// `|||I_h u − u_h|||_h`, the reported convergence quantity.
    pub energy: f64,
    /// `‖u − u_h‖_Ω` on the element unknowns.
    pub l2: f64,
}

pub fn error_vs_interpolant(disc: &Discretization<'_>, exact: &dyn ExactSolution, u_h: &HybridField) -> Result<ErrorReport> {
    let mut diff = disc.space.interpolate(|x| exact.value(x))?;
    diff.axpy(-1.0, u_h);
    let norm = triple_norm(disc, &diff)?;
    Ok(ErrorReport {
        flat: norm.flat,
        energy: norm.full,
        l2: l2_error(disc, exact, u_h)?,
    })
}

/// `‖u − u_h‖_Ω` using the element unknowns.
pub fn l2_error(disc: &Discretization<'_>, exact: &dyn ExactSolution, u_h: &HybridField) -> Result<f64> {
    let mut s = 0.0;
    for t in 0..disc.mesh().n_elements() {
        let quad = disc.space.quadrature(Entity::Element(t))?;
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            let e = exact.value(x) - disc.space.eval_element(u_h, t, x);
            s += w * e.dot(&e);
        }
    }
    Ok(sqrt(s))
}

/// Element averages `|T|⁻¹ ∫_T v_T` of every element.
pub fn cell_averages(disc: &Discretization<'_>, v: &HybridField) -> Result<Vec<SmallVec>> {
    let mesh = disc.mesh();
    let mut out = Vec::with_capacity(mesh.n_elements());
    for t in 0..mesh.n_elements() {
        let quad = disc.space.quadrature(Entity::Element(t))?;
        let mut s = SmallVec::zeros(disc.space.components());
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            s = s + disc.space.eval_element(v, t, x) * w;
        }
        out.push(s * (1.0 / mesh.element(t).volume));
    }
    Ok(out)
}
