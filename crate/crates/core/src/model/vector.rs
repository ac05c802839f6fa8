//! Vector diffusion-advection-reaction in the unknowns `u = (b, p)`,
//! `m = 6`, and its induction-equation variant.

use alloc::boxed::Box;

use super::{
    cross_gram, manufactured_source, BoundaryCondition, BoundaryKind, ConstantSolution, ConstantVelocity,
    ExactSolution, FriedrichsModel, Velocity, VectorDarSolution,
};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::math;
use crate::small::{cross_matrix, levi_civita_matrix, SmallMat, SmallVec};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Reaction {
    /// `∇β − V_{∇×β} + γI`, the Lie-derivative form.
    Lie { gamma: f64 },
    /// `−∇β`, the induction form.
    Induction,
}

/// `∇×(ε∇×p) + L_β p + γp = f_p` written for `(b, p)` with `b = ε∇×p`.
pub struct VectorDar {
    eps: f64,
    beta: Box<dyn Velocity>,
    reaction: Reaction,
    bc: BoundaryCondition,
    exact: Option<Box<dyn ExactSolution>>,
    datum: SmallVec,
    r_flat: Option<f64>,
}

impl VectorDar {
    pub fn new(eps: f64, beta: Box<dyn Velocity>, gamma: f64, bc: BoundaryCondition) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Config("diffusion coefficient must be positive".into()));
        }
        Ok(VectorDar {
            eps,
            beta,
            reaction: Reaction::Lie { gamma },
            bc,
            exact: None,
            datum: SmallVec::zeros(6),
            r_flat: None,
        })
    }

    /// The manufactured test: `ε = 1`, `β = (1, 1, 1)`, `γ = 1`, Dirichlet
    /// boundary, exact potential `(sin πz, sin πx, sin πy)`.
    pub fn manufactured() -> Self {
        VectorDar::new(1.0, Box::new(ConstantVelocity(Vec3::new(1.0, 1.0, 1.0))), 1.0, BoundaryCondition::AllDirichlet)
            .expect("positive diffusion")
            .with_exact(Box::new(VectorDarSolution { eps: 1.0 }))
    }

    /// Steady induction equation for the magnetic field `p = B` in a fluid
    /// rotating about the `z` axis, with `B = B0` on the whole boundary.
    /// The coercivity constant is set to zero: the reaction block `−∇β`
    /// is indefinite.
    pub fn induction(params: &InductionParams) -> Result<Self> {
        if !(params.sigma_mu > 0.0) || !(params.lambda > 0.0) || !(params.radius > 0.0) {
            return Err(Error::Config("induction parameters σμ, λ and R must be positive".into()));
        }
        let beta = RotatingCylinder {
            omega: params.omega,
            radius: params.radius,
            lambda: params.lambda,
        };
        let mut datum = SmallVec::zeros(6);
        datum.set_segment3(3, params.b0);
        let mut model = VectorDar {
            eps: 1.0 / params.sigma_mu,
            beta: Box::new(beta),
            reaction: Reaction::Induction,
            bc: BoundaryCondition::AllDirichlet,
            exact: None,
            datum,
            r_flat: Some(0.0),
        };
        if params.omega == 0.0 {
            model.exact = Some(Box::new(ConstantSolution(datum)));
        }
        Ok(model)
    }

    pub fn with_exact(mut self, exact: Box<dyn ExactSolution>) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn velocity(&self) -> &dyn Velocity {
        self.beta.as_ref()
    }
}

fn block(m: &mut SmallMat, r0: usize, c0: usize, b: &[[f64; 3]; 3], s: f64) {
    for i in 0..3 {
        for j in 0..3 {
            m[(r0 + i, c0 + j)] = s * b[i][j];
        }
    }
}

fn diag3(m: &mut SmallMat, r0: usize, v: f64) {
    for i in 0..3 {
        m[(r0 + i, r0 + i)] = v;
    }
}

impl FriedrichsModel for VectorDar {
    fn dim(&self) -> usize {
        3
    }

    fn size(&self) -> usize {
        6
    }

    fn reaction(&self, x: Vec3) -> SmallMat {
        let mut k = SmallMat::zeros(6);
        diag3(&mut k, 0, 1.0 / self.eps);
        let j = self.beta.jacobian(x);
        match self.reaction {
            Reaction::Lie { gamma } => {
                let curl = Vec3::new(j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]);
                let v = cross_matrix(curl);
                for r in 0..3 {
                    for c in 0..3 {
                        k[(3 + r, 3 + c)] = j[r][c] - v[r][c] + if r == c { gamma } else { 0.0 };
                    }
                }
            }
            Reaction::Induction => block(&mut k, 3, 3, &j, -1.0),
        }
        k
    }

    fn advection(&self, i: usize, x: Vec3) -> SmallMat {
        let mut a = SmallMat::zeros(6);
        let r = levi_civita_matrix(i);
        block(&mut a, 0, 3, &r, -1.0);
        // −(R^i)ᵀ = R^i by antisymmetry
        block(&mut a, 3, 0, &r, 1.0);
        diag3(&mut a, 3, self.beta.value(x)[i]);
        a
    }

    fn div_advection(&self, x: Vec3) -> SmallMat {
        let mut a = SmallMat::zeros(6);
        diag3(&mut a, 3, self.beta.divergence(x));
        a
    }

    fn boundary_kind(&self, x: Vec3) -> BoundaryKind {
        self.bc.kind_at(x)
    }

    fn boundary_operator(&self, kind: BoundaryKind, x: Vec3, n: Vec3) -> SmallMat {
        let s = match kind {
            BoundaryKind::Dirichlet => 1.0,
            BoundaryKind::Neumann => -1.0,
        };
        let v = cross_matrix(n);
        let mut m = SmallMat::zeros(6);
        block(&mut m, 0, 3, &v, s);
        block(&mut m, 3, 0, &v, s);
        diag3(&mut m, 3, self.beta.value(x).dot(&n).abs());
        m
    }

    fn penalty_scale(&self, x: Vec3) -> f64 {
        self.beta.value(x).norm_inf().max(1.0)
    }

    fn interface_penalty(&self, _: Vec3, n: Vec3, a_ref: f64) -> SmallMat {
        let g = cross_gram(n);
        let mut s = SmallMat::zeros(6);
        block(&mut s, 0, 0, &g, a_ref);
        block(&mut s, 3, 3, &g, a_ref);
        s
    }

    fn boundary_penalty(&self, kind: BoundaryKind, _: Vec3, n: Vec3, a_ref: f64) -> SmallMat {
        let mut s = SmallMat::zeros(6);
        // On Neumann faces any nonzero penalty would leave Ker(M − N).
        if kind == BoundaryKind::Dirichlet {
            block(&mut s, 3, 3, &cross_gram(n), a_ref);
        }
        s
    }

    fn source(&self, x: Vec3) -> SmallVec {
        match &self.exact {
            Some(u) => manufactured_source(self, u.as_ref(), x),
            None => SmallVec::zeros(6),
        }
    }

    fn boundary_datum(&self, x: Vec3) -> SmallVec {
        match &self.exact {
            Some(u) => u.value(x),
            None => self.datum,
        }
    }

    fn prescribed_r_flat(&self) -> Option<f64> {
        self.r_flat
    }

    fn exact_solution(&self) -> Option<&dyn ExactSolution> {
        self.exact.as_deref()
    }
}

/// Parameters of the rotating-cylinder induction benchmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InductionParams {
    /// Product of conductivity and permeability; `ε = 1/(σμ)`.
    pub sigma_mu: f64,
    pub omega: f64,
    pub radius: f64,
    pub lambda: f64,
    /// Boundary value of the magnetic field.
    pub b0: Vec3,
}

impl Default for InductionParams {
    /// `σμ = 1`, `R = 0.3`, `λ = 100`, `B0 = ê_x`, at rest.
    fn default() -> Self {
        InductionParams {
            sigma_mu: 1.0,
            omega: 0.0,
            radius: 0.3,
            lambda: 100.0,
            b0: Vec3::new(1.0, 0.0, 0.0),
        }
    }
}

/// `β = ω r φ(r) ê_θ` about the `z` axis with `φ(r) = 1/(1 + e^{λ(r−R)})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotatingCylinder {
    pub omega: f64,
    pub radius: f64,
    pub lambda: f64,
}

impl RotatingCylinder {
    pub fn sigmoid(&self, r: f64) -> f64 {
        let t = self.lambda * (r - self.radius);
        if t > 0.0 {
            let e = math::exp(-t);
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + math::exp(t))
        }
    }

    /// `max_{0 ≤ r ≤ r_max} r φ(r)`; the profile is unimodal.
    pub fn max_profile(&self, r_max: f64) -> f64 {
        let f = |r: f64| r * self.sigmoid(r);
        let (mut a, mut b) = (0.0, r_max);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if f(m1) < f(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        f(0.5 * (a + b)).max(f(r_max))
    }

    /// Angular velocity giving magnetic Reynolds number
    /// `Rm = σμ ‖β‖_∞ L` on a box of side `L` centered on the axis.
    pub fn omega_for_reynolds(rm: f64, sigma_mu: f64, side: f64, radius: f64, lambda: f64) -> f64 {
        let unit = RotatingCylinder {
            omega: 1.0,
            radius,
            lambda,
        };
        let speed = unit.max_profile(side * core::f64::consts::FRAC_1_SQRT_2);
        rm / (sigma_mu * speed * side)
    }
}

impl Velocity for RotatingCylinder {
    fn value(&self, x: Vec3) -> Vec3 {
        let r = math::sqrt(x[0] * x[0] + x[1] * x[1]);
        let g = self.omega * self.sigmoid(r);
        Vec3::new(-g * x[1], g * x[0], 0.0)
    }

    fn jacobian(&self, x: Vec3) -> [[f64; 3]; 3] {
        let r = math::sqrt(x[0] * x[0] + x[1] * x[1]);
        let phi = self.sigmoid(r);
        let g = self.omega * phi;
        let mut j = [[0.0, -g, 0.0], [g, 0.0, 0.0], [0.0; 3]];
        if r > 0.0 {
            let dg = -self.omega * self.lambda * phi * (1.0 - phi) / r;
            let u = [-x[1], x[0]];
            let grad = [x[0], x[1]];
            for a in 0..2 {
                for b in 0..2 {
                    j[a][b] += dg * u[a] * grad[b];
                }
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_matrix_block_form() {
        let model = VectorDar::manufactured();
        let n = Vec3::new(1.0, 0.0, 0.0);
        let nm = model.normal_matrix(Vec3::ZERO, n);
        let v = cross_matrix(n);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(nm[(i, 3 + j)], -v[i][j]);
                assert_eq!(nm[(3 + i, j)], v[i][j]);
                assert_eq!(nm[(i, j)], 0.0);
                assert_eq!(nm[(3 + i, 3 + j)], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn cylinder_jacobian_and_divergence() {
        let beta = RotatingCylinder {
            omega: 2.0,
            radius: 0.3,
            lambda: 100.0,
        };
        assert!((beta.sigmoid(0.3) - 0.5).abs() < 1e-15);
        let x = Vec3::new(0.21, -0.17, 0.4);
        let j = beta.jacobian(x);
        let h = 1e-7;
        for c in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            let d = (beta.value(xp) - beta.value(xm)) * (0.5 / h);
            for r in 0..3 {
                assert!((d[r] - j[r][c]).abs() < 1e-6 * (1.0 + j[r][c].abs()));
            }
        }
        assert!(beta.divergence(x).abs() < 1e-12);
    }

    #[test]
    fn reynolds_scaling() {
        let omega = RotatingCylinder::omega_for_reynolds(0.5, 1.0, 1.0, 0.3, 100.0);
        let beta = RotatingCylinder {
            omega,
            radius: 0.3,
            lambda: 100.0,
        };
        let mut vmax = 0.0_f64;
        for i in 0..=20000 {
            let r = i as f64 / 20000.0 * core::f64::consts::FRAC_1_SQRT_2;
            vmax = vmax.max(beta.value(Vec3::new(r, 0.0, 0.0)).norm());
        }
        assert!((vmax - 0.5).abs() < 1e-6);
    }
}
