//! Manufactured solutions.

use crate::geometry::Vec3;
use crate::math::{cos, sin};
use crate::small::SmallVec;

use super::ExactSolution;

use core::f64::consts::PI;

/// A constant field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantSolution(pub SmallVec);

impl ExactSolution for ConstantSolution {
    fn value(&self, _: Vec3) -> SmallVec {
        self.0
    }

    fn partial(&self, _: usize, _: Vec3) -> SmallVec {
        SmallVec::zeros(self.0.len())
    }
}

/// `p = Π_j sin(π x_j)` with flux `σ = −κ ∇p`, stored as `u = (σ, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarDarSolution {
    pub dim: usize,
    pub kappa: [[f64; 3]; 3],
}

impl ScalarDarSolution {
    pub fn new(dim: usize, kappa: [[f64; 3]; 3]) -> Self {
        ScalarDarSolution { dim, kappa }
    }

    fn factors(&self, x: Vec3) -> ([f64; 3], [f64; 3]) {
        let mut s = [1.0; 3];
        let mut c = [0.0; 3];
        for j in 0..self.dim {
            s[j] = sin(PI * x[j]);
            c[j] = cos(PI * x[j]);
        }
        (s, c)
    }

    /// `∂_a ∂_b p` for `a, b < dim`; `usize::MAX` stands for no derivative.
    fn derivative(&self, s: &[f64; 3], c: &[f64; 3], a: usize, b: usize) -> f64 {
        let mut v = 1.0;
        for j in 0..self.dim {
            let order = (a == j) as u32 + (b == j) as u32;
            v *= match order {
                0 => s[j],
                1 => PI * c[j],
                _ => -PI * PI * s[j],
            };
        }
        v
    }
}

impl ExactSolution for ScalarDarSolution {
    fn value(&self, x: Vec3) -> SmallVec {
        let d = self.dim;
        let (s, c) = self.factors(x);
        let mut u = SmallVec::zeros(d + 1);
        for a in 0..d {
            u[a] = -(0..d)
                .map(|b| self.kappa[a][b] * self.derivative(&s, &c, b, usize::MAX))
                .sum::<f64>();
        }
        u[d] = self.derivative(&s, &c, usize::MAX, usize::MAX);
        u
    }

    fn partial(&self, i: usize, x: Vec3) -> SmallVec {
        let d = self.dim;
        let mut u = SmallVec::zeros(d + 1);
        if i >= d {
            return u;
        }
        let (s, c) = self.factors(x);
        for a in 0..d {
            u[a] = -(0..d)
                .map(|b| self.kappa[a][b] * self.derivative(&s, &c, b, i))
                .sum::<f64>();
        }
        u[d] = self.derivative(&s, &c, i, usize::MAX);
        u
    }
}

/// `p = (sin πz, sin πx, sin πy)` with `b = ε ∇×p`, stored as `u = (b, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorDarSolution {
    pub eps: f64,
}

impl ExactSolution for VectorDarSolution {
    fn value(&self, x: Vec3) -> SmallVec {
        let e = self.eps * PI;
        SmallVec::from_slice(&[
            e * cos(PI * x[1]),
            e * cos(PI * x[2]),
            e * cos(PI * x[0]),
            sin(PI * x[2]),
            sin(PI * x[0]),
            sin(PI * x[1]),
        ])
    }

    fn partial(&self, i: usize, x: Vec3) -> SmallVec {
        let e = self.eps * PI * PI;
        let mut u = SmallVec::zeros(6);
        let t = x[i] * PI;
        // b_{(i+2)%3} = επ cos(π x_i) and p_{(i+1)%3} = sin(π x_i)
        u[(i + 2) % 3] = -e * sin(t);
        u[3 + (i + 1) % 3] = PI * cos(t);
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partials(u: &dyn ExactSolution, m: usize, x: Vec3) {
        let h = 1e-6;
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (u.value(xp) - u.value(xm)) * (0.5 / h);
            let an = u.partial(i, x);
            for c in 0..m {
                assert!((fd[c] - an[c]).abs() < 1e-7, "∂_{i} component {c}: {} vs {}", fd[c], an[c]);
            }
        }
    }

    #[test]
    fn partials_match_differences() {
        let x = Vec3::new(0.31, 0.72, 0.45);
        let kappa = [[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 1.5]];
        check_partials(&ScalarDarSolution::new(3, kappa), 4, x);
        check_partials(&ScalarDarSolution::new(2, kappa), 3, Vec3::new(0.31, 0.72, 0.0));
        check_partials(&VectorDarSolution { eps: 0.7 }, 6, x);
    }

    #[test]
    fn vector_flux_is_scaled_curl() {
        let u = VectorDarSolution { eps: 2.0 };
        let x = Vec3::new(0.2, 0.4, 0.9);
        let d: [SmallVec; 3] = [u.partial(0, x), u.partial(1, x), u.partial(2, x)];
        // ∇×p from the p partials
        let curl = [d[1][5] - d[2][4], d[2][3] - d[0][5], d[0][4] - d[1][3]];
        let v = u.value(x);
        for c in 0..3 {
            assert!((v[c] - 2.0 * curl[c]).abs() < 1e-14);
        }
    }
}
