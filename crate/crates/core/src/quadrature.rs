//! Quadrature on reference simplices (collapsed Gauss–Jacobi products)
//! and physical rules on simplices embedded in 3D.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::jacobi_eigen_in_place;
use crate::geometry::{tet_volume, triangle_area, Vec3};
use crate::math;

/// Quadrature rule on a physical entity.
#[derive(Clone, Debug, Default)]
pub struct QuadRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly on affine images.
    pub degree: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, mut f: impl FnMut(Vec3) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// Gauss–Jacobi rule with `q` nodes on `[0, 1]` for the weight `(1 − u)^alpha`.
pub fn gauss_jacobi_unit(q: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let a = alpha as f64;
    // Jacobi matrix for the weight (1 − x)^a on [−1, 1] (β = 0).
    let mut diag = vec![0.0; q];
    let mut off = vec![0.0; q.saturating_sub(1)];
    for (n, d) in diag.iter_mut().enumerate() {
        let nf = n as f64;
        *d = if n == 0 {
            -a / (a + 2.0)
        } else {
            let s = 2.0 * nf + a;
            -(a * a) / (s * (s + 2.0))
        };
    }
    for (idx, o) in off.iter_mut().enumerate() {
        let nf = (idx + 1) as f64;
        let s = 2.0 * nf + a;
        *o = math::sqrt(4.0 * nf * (nf + a) * nf * (nf + a) / (s * s * (s + 1.0) * (s - 1.0)));
    }
    let mut mat = vec![0.0; q * q];
    for i in 0..q {
        mat[i * q + i] = diag[i];
        if i + 1 < q {
            mat[i * q + i + 1] = off[i];
            mat[(i + 1) * q + i] = off[i];
        }
    }
    let mut vecs = vec![0.0; q * q];
    jacobi_eigen_in_place(&mut mat, &mut vecs, q);
    // ∫_{-1}^{1} (1 − x)^a dx
    let mu0 = math::powi(2.0, alpha + 1) / (a + 1.0);
    let mut nodes: Vec<(f64, f64)> = (0..q)
        .map(|i| {
            let x = mat[i * q + i];
            let w = mu0 * vecs[i] * vecs[i];
            ((1.0 + x) / 2.0, w / math::powi(2.0, alpha + 1))
        })
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.into_iter().unzip()
}

/// Reference rule on the unit simplex of dimension `dim ∈ {1, 2, 3}`
/// (vertices `0, e_1, …, e_dim`), exact for total degree `degree`.
#[derive(Clone, Debug)]
pub struct ReferenceRule {
    pub dim: usize,
    pub degree: usize,
    /// Reference coordinates (unused components are zero).
    pub points: Vec<[f64; 3]>,
    /// Weights summing to the reference measure `1/dim!`.
    pub weights: Vec<f64>,
}

impl ReferenceRule {
    pub fn new(dim: usize, degree: usize) -> Self {
        let q = degree / 2 + 1;
        let (legendre_x, legendre_w) = gauss_jacobi_unit(q, 0);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        match dim {
            1 => {
                for (x, w) in legendre_x.iter().zip(&legendre_w) {
                    points.push([*x, 0.0, 0.0]);
                    weights.push(*w);
                }
            }
            2 => {
                let (ux, uw) = gauss_jacobi_unit(q, 1);
                for (u, wu) in ux.iter().zip(&uw) {
                    for (v, wv) in legendre_x.iter().zip(&legendre_w) {
                        points.push([*u, (1.0 - u) * v, 0.0]);
                        weights.push(wu * wv);
                    }
                }
            }
            3 => {
                let (ux, uw) = gauss_jacobi_unit(q, 2);
                let (vx, vw) = gauss_jacobi_unit(q, 1);
                for (u, wu) in ux.iter().zip(&uw) {
                    for (v, wv) in vx.iter().zip(&vw) {
                        for (w, ww) in legendre_x.iter().zip(&legendre_w) {
                            points.push([*u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * w]);
                            weights.push(wu * wv * ww);
                        }
                    }
                }
            }
            _ => panic!("reference simplex dimension must be 1, 2 or 3"),
        }
        ReferenceRule {
            dim,
            degree,
            points,
            weights,
        }
    }

    /// Map onto the simplex with the given vertices (`dim + 1` of them),
    /// appending to `out`. Returns the simplex measure.
    pub fn map_onto(&self, vertices: &[Vec3], out: &mut QuadRule) -> f64 {
        assert_eq!(vertices.len(), self.dim + 1);
        let v0 = vertices[0];
        let measure = simplex_measure(vertices);
        let factor = measure * factorial(self.dim);
        for (p, w) in self.points.iter().zip(&self.weights) {
            let mut x = v0;
            for (j, vj) in vertices[1..].iter().enumerate() {
                x += (*vj - v0) * p[j];
            }
            out.points.push(x);
            out.weights.push(w * factor);
        }
        measure
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Unsigned measure of a simplex given by its `dim + 1` vertices.
pub fn simplex_measure(vertices: &[Vec3]) -> f64 {
    match vertices.len() {
        2 => vertices[0].dist(&vertices[1]),
        3 => triangle_area(vertices[0], vertices[1], vertices[2]),
        4 => tet_volume(vertices[0], vertices[1], vertices[2], vertices[3]).abs(),
        _ => panic!("simplex must have 2, 3 or 4 vertices"),
    }
}

/// Reference rules for segments, triangles and tetrahedra at one degree.
#[derive(Clone, Debug)]
pub struct SimplexRules {
    pub degree: usize,
    rules: [ReferenceRule; 3],
}

impl SimplexRules {
    pub fn new(degree: usize) -> Self {
        SimplexRules {
            degree,
            rules: [
                ReferenceRule::new(1, degree),
                ReferenceRule::new(2, degree),
                ReferenceRule::new(3, degree),
            ],
        }
    }

    pub fn for_dim(&self, dim: usize) -> &ReferenceRule {
        &self.rules[dim - 1]
    }
}
