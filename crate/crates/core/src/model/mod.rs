//! Friedrichs-system models: pointwise coefficient fields, boundary
//! operators and penalty fields.
//!
//! A model describes the operator `A u = K u + Σ_i A^i ∂_i u` together with
//! a boundary field `M` and the interface and boundary penalty fields used
//! by the discrete form.

mod exact;
mod scalar;
mod vector;

use alloc::boxed::Box;

pub use exact::{ConstantSolution, ScalarDarSolution, VectorDarSolution};
pub use scalar::ScalarDar;
pub use vector::{InductionParams, RotatingCylinder, VectorDar};

use crate::geometry::Vec3;
use crate::small::{SmallMat, SmallVec};

/// Type of boundary condition on a boundary face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// Assignment of boundary kinds to boundary faces, evaluated at face
/// barycenters.
pub enum BoundaryCondition {
    AllDirichlet,
    AllNeumann,
    ByPosition(Box<dyn Fn(Vec3) -> BoundaryKind + Send + Sync>),
}

impl BoundaryCondition {
    pub fn kind_at(&self, x: Vec3) -> BoundaryKind {
        match self {
            BoundaryCondition::AllDirichlet => BoundaryKind::Dirichlet,
            BoundaryCondition::AllNeumann => BoundaryKind::Neumann,
            BoundaryCondition::ByPosition(f) => f(x),
        }
    }
}

impl core::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BoundaryCondition::AllDirichlet => f.write_str("AllDirichlet"),
            BoundaryCondition::AllNeumann => f.write_str("AllNeumann"),
            BoundaryCondition::ByPosition(_) => f.write_str("ByPosition(..)"),
        }
    }
}

/// Advection field `β` with its Jacobian `J_ij = ∂_j β_i`.
pub trait Velocity: Send + Sync {
    fn value(&self, x: Vec3) -> Vec3;
    fn jacobian(&self, x: Vec3) -> [[f64; 3]; 3];

    fn divergence(&self, x: Vec3) -> f64 {
        let j = self.jacobian(x);
        j[0][0] + j[1][1] + j[2][2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantVelocity(pub Vec3);

impl Velocity for ConstantVelocity {
    fn value(&self, _: Vec3) -> Vec3 {
        self.0
    }

    fn jacobian(&self, _: Vec3) -> [[f64; 3]; 3] {
        [[0.0; 3]; 3]
    }
}

/// Closed-form solution with analytic first derivatives, used to build
/// manufactured sources, boundary data and error norms.
pub trait ExactSolution: Send + Sync {
    fn value(&self, x: Vec3) -> SmallVec;
    /// `∂_i u(x)`.
    fn partial(&self, i: usize, x: Vec3) -> SmallVec;
}

/// Pointwise description of a Friedrichs system.
pub trait FriedrichsModel: Send + Sync {
    /// Space dimension `d`.
    fn dim(&self) -> usize;
    /// System size `m`.
    fn size(&self) -> usize;
    /// Reaction field `K(x)`.
    fn reaction(&self, x: Vec3) -> SmallMat;
    /// Advection field `A^i(x)`, symmetric.
    fn advection(&self, i: usize, x: Vec3) -> SmallMat;
    /// `Σ_i ∂_i A^i(x)`.
    fn div_advection(&self, x: Vec3) -> SmallMat;
    fn boundary_kind(&self, x: Vec3) -> BoundaryKind;
    /// Boundary field `M(x)` for outward normal `n`.
    fn boundary_operator(&self, kind: BoundaryKind, x: Vec3, n: Vec3) -> SmallMat;
    /// Pointwise contribution to the penalty scale `A_ref,T` of the
    /// interface and boundary penalty fields.
    fn penalty_scale(&self, x: Vec3) -> f64;
    /// Interface penalty field `S^i_TF(x)`.
    fn interface_penalty(&self, x: Vec3, n: Vec3, a_ref: f64) -> SmallMat;
    /// Boundary penalty field `S^b_F(x)`.
    fn boundary_penalty(&self, kind: BoundaryKind, x: Vec3, n: Vec3, a_ref: f64) -> SmallMat;
    /// Source `f(x)`.
    fn source(&self, x: Vec3) -> SmallVec;
    /// Boundary datum `g(x)`, lifted into the right-hand side.
    fn boundary_datum(&self, x: Vec3) -> SmallVec;

    /// A fixed `r_flat` overriding the sampled lower bound.
    fn prescribed_r_flat(&self) -> Option<f64> {
        None
    }

    fn exact_solution(&self) -> Option<&dyn ExactSolution> {
        None
    }

    /// `N(x) = Σ_i n_i A^i(x)`.
    fn normal_matrix(&self, x: Vec3, n: Vec3) -> SmallMat {
        let mut out = SmallMat::zeros(self.size());
        for i in 0..self.dim() {
            out += self.advection(i, x).scaled(n[i]);
        }
        out
    }

    /// `A u = K u + Σ_i A^i ∂_i u` from point values and partials.
    fn apply(&self, x: Vec3, u: &SmallVec, du: &[SmallVec]) -> SmallVec {
        let mut out = self.reaction(x).mul_vec(u);
        for (i, d) in du.iter().enumerate().take(self.dim()) {
            out = out + self.advection(i, x).mul_vec(d);
        }
        out
    }

    /// `½(K + Kᵀ − ∇·A)`, whose smallest eigenvalue bounds `r_flat`.
    fn coercivity_field(&self, x: Vec3) -> SmallMat {
        let k = self.reaction(x);
        (k + k.transpose() - self.div_advection(x)).scaled(0.5)
    }
}

/// Source `f = A u` of a manufactured solution.
pub fn manufactured_source(model: &dyn FriedrichsModel, exact: &dyn ExactSolution, x: Vec3) -> SmallVec {
    let u = exact.value(x);
    let mut du = [SmallVec::zeros(model.size()); 3];
    for (i, d) in du.iter_mut().enumerate().take(model.dim()) {
        *d = exact.partial(i, x);
    }
    model.apply(x, &u, &du[..model.dim()])
}

/// Which interface stabilizer the discrete form uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stabilization {
    /// The model's penalty fields.
    #[default]
    Penalty,
    /// `S^i = |N_F|`, the upwind choice.
    Upwind,
}

/// Interface stabilizer at a face point.
pub fn interface_stabilizer(
    model: &dyn FriedrichsModel,
    kind: Stabilization,
    x: Vec3,
    n: Vec3,
    a_ref: f64,
) -> SmallMat {
    match kind {
        Stabilization::Penalty => model.interface_penalty(x, n, a_ref),
        Stabilization::Upwind => upwind_stabilizer(model, x, n),
    }
}

/// `|N_F(x)|` through the eigendecomposition of the symmetric `N_F`.
pub fn upwind_stabilizer(model: &dyn FriedrichsModel, x: Vec3, n: Vec3) -> SmallMat {
    model.normal_matrix(x, n).symmetric_abs()
}

/// `V_nᵀ V_n = |n|² I − n nᵀ`.
pub(crate) fn cross_gram(n: Vec3) -> [[f64; 3]; 3] {
    let mut g = [[0.0; 3]; 3];
    let nn = n.dot(&n);
    for (i, row) in g.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = if i == j { nn } else { 0.0 } - n[i] * n[j];
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::small::cross_matrix;

    #[test]
    fn cross_gram_matches_product() {
        let n = Vec3::new(0.3, -0.5, 0.81).normalized();
        let v = cross_matrix(n);
        let g = cross_gram(n);
        for i in 0..3 {
            for j in 0..3 {
                let p: f64 = (0..3).map(|k| v[k][i] * v[k][j]).sum();
                assert!((p - g[i][j]).abs() < 1e-15);
            }
        }
    }
}
