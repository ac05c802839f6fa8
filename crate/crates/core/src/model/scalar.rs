//! Scalar diffusion-advection-reaction as a first-order system in the
//! unknowns `u = (σ, p)`, `m = d + 1`.

use alloc::boxed::Box;

use super::{
    manufactured_source, BoundaryCondition, BoundaryKind, ConstantVelocity, ExactSolution, FriedrichsModel,
    ScalarDarSolution, Velocity,
};
use crate::dense::{cholesky, lower_inverse, DMat};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::small::{SmallMat, SmallVec};

/// `κ⁻¹σ + ∇p = 0`, `∇·σ + β·∇p + μp = f_p`, with `p = 0` on Dirichlet
/// faces and `(σ + βp)·n = 0` on Neumann faces.
pub struct ScalarDar {
    dim: usize,
    kappa_inv: [[f64; 3]; 3],
    beta: Box<dyn Velocity>,
    mu: f64,
    bc: BoundaryCondition,
    exact: Option<Box<dyn ExactSolution>>,
}

impl ScalarDar {
    /// `kappa` must be symmetric positive definite on its leading `dim×dim` block.
    pub fn new(dim: usize, kappa: [[f64; 3]; 3], beta: Box<dyn Velocity>, mu: f64, bc: BoundaryCondition) -> Result<Self> {
        let mut k = DMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                k[(i, j)] = kappa[i][j];
            }
        }
        let asym = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .fold(0.0_f64, |m, (i, j)| m.max((kappa[i][j] - kappa[j][i]).abs()));
        let l = cholesky(&k)
            .filter(|_| asym <= 1e-12 * k.max_abs())
            .ok_or_else(|| Error::Config("diffusion tensor must be symmetric positive definite".into()))?;
        let li = lower_inverse(&l);
        let mut kappa_inv = [[0.0; 3]; 3];
        for i in 0..dim {
            for j in 0..dim {
                kappa_inv[i][j] = (0..dim).map(|r| li[(r, i)] * li[(r, j)]).sum();
            }
        }
        Ok(ScalarDar {
            dim,
            kappa_inv,
            beta,
            mu,
            bc,
            exact: None,
        })
    }

    /// The manufactured test: `κ = I`, `β = (1, …, 1)`, `μ = 1`, Dirichlet
    /// boundary, exact potential `Π sin(πx_j)`.
    pub fn manufactured(dim: usize) -> Self {
        let mut id = [[0.0; 3]; 3];
        let mut beta = Vec3::ZERO;
        for i in 0..dim {
            id[i][i] = 1.0;
            beta[i] = 1.0;
        }
        ScalarDar::new(dim, id, Box::new(ConstantVelocity(beta)), 1.0, BoundaryCondition::AllDirichlet)
            .expect("identity is SPD")
            .with_exact(Box::new(ScalarDarSolution::new(dim, id)))
    }

    /// Use `exact` for the source and the boundary datum.
    pub fn with_exact(mut self, exact: Box<dyn ExactSolution>) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn velocity(&self) -> &dyn Velocity {
        self.beta.as_ref()
    }
}

impl FriedrichsModel for ScalarDar {
    fn dim(&self) -> usize {
        self.dim
    }

    fn size(&self) -> usize {
        self.dim + 1
    }

    fn reaction(&self, _: Vec3) -> SmallMat {
        let d = self.dim;
        let mut k = SmallMat::zeros(d + 1);
        for i in 0..d {
            for j in 0..d {
                k[(i, j)] = self.kappa_inv[i][j];
            }
        }
        k[(d, d)] = self.mu;
        k
    }

    fn advection(&self, i: usize, x: Vec3) -> SmallMat {
        let d = self.dim;
        let mut a = SmallMat::zeros(d + 1);
        a[(i, d)] = 1.0;
        a[(d, i)] = 1.0;
        a[(d, d)] = self.beta.value(x)[i];
        a
    }

    fn div_advection(&self, x: Vec3) -> SmallMat {
        let d = self.dim;
        let mut a = SmallMat::zeros(d + 1);
        a[(d, d)] = self.beta.divergence(x);
        a
    }

    fn boundary_kind(&self, x: Vec3) -> BoundaryKind {
        self.bc.kind_at(x)
    }

    fn boundary_operator(&self, kind: BoundaryKind, _: Vec3, n: Vec3) -> SmallMat {
        let d = self.dim;
        let s = match kind {
            BoundaryKind::Dirichlet => 1.0,
            BoundaryKind::Neumann => -1.0,
        };
        let mut m = SmallMat::zeros(d + 1);
        for j in 0..d {
            m[(j, d)] = -s * n[j];
            m[(d, j)] = s * n[j];
        }
        m
    }

    fn penalty_scale(&self, x: Vec3) -> f64 {
        self.beta.value(x).norm_inf().max(1.0)
    }

    fn interface_penalty(&self, x: Vec3, n: Vec3, a_ref: f64) -> SmallMat {
        let d = self.dim;
        let mut s = SmallMat::zeros(d + 1);
        for i in 0..d {
            for j in 0..d {
                s[(i, j)] = a_ref * n[i] * n[j];
            }
        }
        s[(d, d)] = self.beta.value(x).dot(&n).abs();
        s
    }

    fn boundary_penalty(&self, kind: BoundaryKind, _: Vec3, _: Vec3, a_ref: f64) -> SmallMat {
        let d = self.dim;
        let mut s = SmallMat::zeros(d + 1);
        // On Neumann faces any nonzero penalty would leave Ker(M − N).
        if kind == BoundaryKind::Dirichlet {
            s[(d, d)] = a_ref;
        }
        s
    }

    fn source(&self, x: Vec3) -> SmallVec {
        match &self.exact {
            Some(u) => manufactured_source(self, u.as_ref(), x),
            None => SmallVec::zeros(self.size()),
        }
    }

    fn boundary_datum(&self, x: Vec3) -> SmallVec {
        match &self.exact {
            Some(u) => u.value(x),
            None => SmallVec::zeros(self.size()),
        }
    }

    fn exact_solution(&self) -> Option<&dyn ExactSolution> {
        self.exact.as_deref()
    }
}
