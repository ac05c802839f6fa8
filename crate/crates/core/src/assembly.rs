//! Element-local assembly of the discrete form, static condensation and
//! the global face system.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::HybridField;
use crate::dense::{DMat, Lu};
use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::mesh::Entity;
use crate::model::interface_stabilizer;
use crate::small::{SmallMat, SmallVec};
use crate::sparse::BlockSparse;
use crate::geometry::Vec3;

/// Dense blocks of the discrete form restricted to one element. Rows are
/// test functions, columns trial functions. Face unknowns are ordered by
/// the element's local face list.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSystem {
    pub element: usize,
    pub faces: Vec<usize>,
    pub a_tt: DMat,
    pub a_tf: DMat,
    pub a_ft: DMat,
    pub a_ff: DMat,
    pub b_t: Vec<f64>,
    pub b_f: Vec<f64>,
}

/// `a[r0 + i][c0 + j] += s u_i v_j`.
#[inline]
fn add_outer(a: &mut DMat, r0: usize, c0: usize, u: &[f64], v: &[f64], s: f64) {
    for (i, ui) in u.iter().enumerate() {
        let f = s * ui;
        if f == 0.0 {
            continue;
        }
        let row = &mut a.row_mut(r0 + i)[c0..c0 + v.len()];
        for (x, vj) in row.iter_mut().zip(v) {
            *x += f * vj;
        }
    }
}

/// Add the `m × m` coefficient matrix `c` coupling the scalar bases `u`
/// (rows) and `v` (columns) into component-major blocks.
#[inline]
fn add_coupling(a: &mut DMat, r0: usize, c0: usize, u: &[f64], v: &[f64], c: &SmallMat, w: f64) {
    let m = c.dim();
    for r in 0..m {
        for s in 0..m {
            let k = c[(r, s)];
            if k != 0.0 {
                add_outer(a, r0 + r * u.len(), c0 + s * v.len(), u, v, w * k);
            }
        }
    }
}

#[inline]
fn add_load(b: &mut [f64], phi: &[f64], g: &SmallVec, w: f64) {
    let nb = phi.len();
    for r in 0..g.len() {
        let s = w * g[r];
        if s != 0.0 {
            for (x, p) in b[r * nb..(r + 1) * nb].iter_mut().zip(phi) {
                *x += s * p;
            }
        }
    }
}

/// Quadrature assembly of all terms of the discrete form on element `t`.
///
/// The volume term is assembled integrated by parts, as
/// `(w_T, Ã v_T)_T + Σ_F ω_TF (N_F w_T, v_T)_F` with `Ã = Kᵀ − ∇·A − A_1`.
/// This equals `(A w_T, v_T)_T` under exact integration, and with variable
/// coefficients it keeps the local flux balance exact under quadrature.
pub fn local_system(disc: &Discretization<'_>, t: usize) -> Result<LocalSystem> {
    let space = &disc.space;
    let model = disc.model;
    let mesh = disc.mesh();
    let el = mesh.element(t);
    let m = space.components();
    let dim = mesh.dim();
    let (nbt, nbf) = (space.nb_element(), space.nb_face());
    let (nt, nfb) = (m * nbt, m * nbf);
    let nfl = el.faces.len() * nfb;
    let refs = disc.refs.elements[t];
    let jump_weight = disc.refs.jump_weight * el.diameter;

    let mut a_tt = DMat::zeros(nt, nt);
    let mut a_tf = DMat::zeros(nt, nfl);
    let mut a_ft = DMat::zeros(nfl, nt);
    let mut a_ff = DMat::zeros(nfl, nfl);
    let mut b_t = vec![0.0; nt];
    let mut b_f = vec![0.0; nfl];

    let basis = space.element_basis(t);
    let mut psi = vec![0.0; nbt];
    let mut grads = vec![Vec3::ZERO; nbt];
    let mut dpsi = vec![0.0; nbt];
    let quad = space.quadrature(Entity::Element(t))?;
    for (&x, &w) in quad.points.iter().zip(&quad.weights) {
        basis.eval_grad(x, &mut psi, &mut grads);
        let kd = model.reaction(x) - model.div_advection(x);
        add_coupling(&mut a_tt, 0, 0, &psi, &psi, &kd, w);
        for l in 0..dim {
            for (d, g) in dpsi.iter_mut().zip(&grads) {
                *d = g[l];
            }
            add_coupling(&mut a_tt, 0, 0, &dpsi, &psi, &model.advection(l, x), -w);
        }
        add_load(&mut b_t, &psi, &model.source(x), w);
    }

    let mut chi = vec![0.0; nbf];
    for (lf, (&f, &orient)) in el.faces.iter().zip(&el.orientations).enumerate() {
        let face = mesh.face(f);
        let omega = orient as f64;
        let n = face.normal;
        let fbasis = space.face_basis(f);
        let quad = space.quadrature(Entity::Face(f))?;
        let kind = face.is_boundary().then(|| model.boundary_kind(face.barycenter));
        let o = lf * nfb;
        for (&x, &w) in quad.points.iter().zip(&quad.weights) {
            basis.eval(x, &mut psi);
            fbasis.eval(x, &mut chi);
            let mut p = interface_stabilizer(model, disc.options.stabilization, x, n, refs.penalty_ref);
            p += SmallMat::identity(m).scaled(jump_weight);
            let half_n = model.normal_matrix(x, n).scaled(0.5 * omega);
            let mut ff = p + half_n;
            if let Some(kind) = kind {
                let bnd = (model.boundary_operator(kind, x, n) + model.boundary_penalty(kind, x, n, refs.penalty_ref)
                    - model.normal_matrix(x, n))
                .scaled(0.5);
                ff += bnd;
                add_load(&mut b_f[o..o + nfb], &chi, &bnd.mul_vec(&model.boundary_datum(x)), w);
            }
            add_coupling(&mut a_ff, o, o, &chi, &chi, &ff, w);
            add_coupling(&mut a_ft, o, 0, &chi, &psi, &(-p - half_n), w);
            add_coupling(&mut a_tf, 0, o, &psi, &chi, &(half_n - p), w);
            add_coupling(&mut a_tt, 0, 0, &psi, &psi, &(p + half_n), w);
        }
    }

    Ok(LocalSystem {
        element: t,
        faces: el.faces.clone(),
        a_tt,
        a_tf,
        a_ft,
        a_ff,
        b_t,
        b_f,
    })
}

/// Data to rebuild element unknowns from face unknowns:
/// `u_T = y − X u_F` with `X = A_TT⁻¹ A_TF`, `y = A_TT⁻¹ b_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub element: usize,
    x: DMat,
    y: Vec<f64>,
}

impl Recovery {
    pub fn recover(&self, u_faces: &[f64]) -> Vec<f64> {
        let mut u = self.y.clone();
        let xu = self.x.mul_vec(u_faces);
        for (a, b) in u.iter_mut().zip(xu) {
            *a -= b;
        }
        u
    }
}

/// Per-element Schur complement and recovery data.
#[derive(Clone, Debug, PartialEq)]
pub struct Condensed {
    /// `A_FF − A_FT A_TT⁻¹ A_TF`.
    pub schur: DMat,
    /// `b_F − A_FT A_TT⁻¹ b_T`.
    pub rhs: Vec<f64>,
    pub recovery: Recovery,
}

/// Eliminate the element unknowns of a local system.
pub fn condense(local: LocalSystem) -> Result<Condensed> {
    let LocalSystem {
        element,
        a_tt,
        a_tf,
        a_ft,
        mut a_ff,
        b_t,
        mut b_f,
        ..
    } = local;
    let lu = Lu::factor(a_tt).map_err(|e| Error::SingularElementBlock {
        element,
        column: e.column,
    })?;
    let x = lu.solve_mat(&a_tf);
    let y = lu.solve(&b_t);
    let prod = a_ft.matmul(&x);
    for (s, p) in a_ff.as_mut_slice().iter_mut().zip(prod.as_slice()) {
        *s -= p;
    }
    let fy = a_ft.mul_vec(&y);
    for (r, v) in b_f.iter_mut().zip(fy) {
        *r -= v;
    }
    Ok(Condensed {
        schur: a_ff,
        rhs: b_f,
        recovery: Recovery { element, x, y },
    })
}

/// Global system in the face unknowns.
#[derive(Clone, Debug)]
pub struct CondensedSystem {
    pub matrix: BlockSparse,
    pub rhs: Vec<f64>,
    pub recovery: Vec<Recovery>,
}

impl CondensedSystem {
    /// Hybrid field from a face solution, by element back-substitution.
    pub fn recover(&self, disc: &Discretization<'_>, u_faces: &[f64]) -> HybridField {
        let mut field = disc.space.zero_field();
        let nfb = field.face_block_len();
        field.face_coeffs_mut().copy_from_slice(u_faces);
        let mut local = Vec::new();
        for rec in &self.recovery {
            local.clear();
            for &f in &disc.mesh().element(rec.element).faces {
                local.extend_from_slice(&u_faces[f * nfb..(f + 1) * nfb]);
            }
            let ut = rec.recover(&local);
            field.element_block_mut(rec.element).copy_from_slice(&ut);
        }
        field
    }
}

/// Face-to-face pattern: faces coupled through a shared element.
pub fn face_pattern(disc: &Discretization<'_>) -> Vec<Vec<usize>> {
    let mesh = disc.mesh();
    let mut rows = vec![Vec::new(); mesh.n_faces()];
    for el in mesh.elements() {
        for &a in &el.faces {
            rows[a].extend_from_slice(&el.faces);
        }
    }
    for r in &mut rows {
        r.sort_unstable();
        r.dedup();
    }
    rows
}

/// Assemble and condense element by element, in mesh order.
pub fn assemble_global(disc: &Discretization<'_>) -> Result<CondensedSystem> {
    let mesh = disc.mesh();
    let nfb = disc.space.components() * disc.space.nb_face();
    let mut matrix = BlockSparse::from_pattern(nfb, &face_pattern(disc));
    let mut rhs = vec![0.0; mesh.n_faces() * nfb];
    let mut recovery = Vec::with_capacity(mesh.n_elements());
    for t in 0..mesh.n_elements() {
        let c = condense(local_system(disc, t)?)?;
        let faces = &mesh.element(t).faces;
        for (a, &fa) in faces.iter().enumerate() {
            for (b, &fb) in faces.iter().enumerate() {
                matrix.add_from(fa, fb, &c.schur, a * nfb, b * nfb);
            }
            for (r, v) in rhs[fa * nfb..(fa + 1) * nfb].iter_mut().zip(&c.rhs[a * nfb..(a + 1) * nfb]) {
                *r += v;
            }
        }
        recovery.push(c.recovery);
    }
    Ok(CondensedSystem { matrix, rhs, recovery })
}

/// Uncondensed dense matrix and right-hand side over all unknowns, in the
/// layout of [`HybridField`]. Only meant for small meshes.
pub fn assemble_monolithic(disc: &Discretization<'_>) -> Result<(DMat, Vec<f64>)> {
    let mesh = disc.mesh();
    let layout = disc.space.zero_field();
    let (nt, nfb) = (layout.element_block_len(), layout.face_block_len());
    let off = layout.face_offset();
    let n = layout.coeffs.len();
    let mut a = DMat::zeros(n, n);
    let mut b = vec![0.0; n];
    for t in 0..mesh.n_elements() {
        let loc = local_system(disc, t)?;
        let mut idx: Vec<usize> = (t * nt..(t + 1) * nt).collect();
        for &f in &loc.faces {
            idx.extend(off + f * nfb..off + (f + 1) * nfb);
        }
        let nl = loc.faces.len() * nfb;
        for i in 0..nt + nl {
            for j in 0..nt + nl {
                let v = match (i < nt, j < nt) {
                    (true, true) => loc.a_tt[(i, j)],
                    (true, false) => loc.a_tf[(i, j - nt)],
                    (false, true) => loc.a_ft[(i - nt, j)],
                    (false, false) => loc.a_ff[(i - nt, j - nt)],
                };
                a[(idx[i], idx[j])] += v;
            }
            b[idx[i]] += if i < nt { loc.b_t[i] } else { loc.b_f[i - nt] };
        }
    }
    Ok((a, b))
}
