//! Scheme options and the per-element reference quantities `A_ref,T`,
//! `τ_T`, together with the global constants `r_flat` and `r_sharp`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::basis::HybridSpace;
use crate::error::{Error, Result};
use crate::mesh::{Entity, PolyMesh};
use crate::model::{FriedrichsModel, Stabilization};

/// Tolerance of the pointwise checks on the model fields.
pub const FIELD_CHECK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeOptions {
    pub degree: usize,
    pub stabilization: Stabilization,
    /// Quadrature exactness degree; `2k + 2` when `None`.
    pub quad_degree: Option<usize>,
    pub orthonormal_basis: bool,
    /// Lower bound on the coefficient of the `h_T`-weighted jump term.
    /// When `r_flat = 0` the face components seen by neither `N_F` nor the
    /// stabilizers would otherwise be undetermined.
    pub jump_floor: f64,
}

impl SchemeOptions {
    pub fn new(degree: usize) -> Self {
        SchemeOptions {
            degree,
            stabilization: Stabilization::Penalty,
            quad_degree: None,
            orthonormal_basis: false,
            jump_floor: 1e-6,
        }
    }

    pub fn with_stabilization(mut self, s: Stabilization) -> Self {
        self.stabilization = s;
        self
    }

    pub fn quad_degree(&self) -> usize {
        self.quad_degree.unwrap_or(2 * self.degree + 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementReference {
    /// `max_i sup_T ‖A^i‖₂`, sampled at volume quadrature points.
    pub a_ref: f64,
    /// Scale of the interface and boundary penalty fields.
    pub penalty_ref: f64,
    /// `min(h_T / A_ref,T, 1 / r_flat)`.
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceQuantities {
    /// Coercivity constant used by the scheme.
    pub r_flat: f64,
    /// Coefficient of the `h_T`-weighted jump term: `max(r_flat, jump_floor)`.
    pub jump_weight: f64,
    /// Sampled `min λ(½(K + Kᵀ − ∇·A))` before flooring or prescription.
    pub sampled_lower_bound: f64,
    /// `sup ‖K‖ + sup ‖∇·A‖`, sampled.
    pub r_sharp: f64,
    pub elements: Vec<ElementReference>,
    /// Largest relative asymmetry of the sampled `A^i`.
    pub max_asymmetry: f64,
    pub warnings: Vec<String>,
}

impl ReferenceQuantities {
    /// `r_sharp / r_flat`; infinite when `r_flat = 0`.
    pub fn rho(&self) -> f64 {
        if self.r_flat > 0.0 {
            self.r_sharp / self.r_flat
        } else {
            f64::INFINITY
        }
    }
}

/// `τ_T = min(h_T / A_ref,T, 1 / r_flat)`, reducing to `h_T / A_ref,T`
/// when `r_flat = 0`.
pub fn tau(h: f64, a_ref: f64, r_flat: f64) -> f64 {
    let advective = if a_ref > 0.0 { h / a_ref } else { f64::INFINITY };
    let reactive = if r_flat > 0.0 { 1.0 / r_flat } else { f64::INFINITY };
    advective.min(reactive)
}

/// Sample the model at the volume quadrature points of `space`.
pub fn reference_quantities(
    space: &HybridSpace<'_>,
    model: &dyn FriedrichsModel,
    jump_floor: f64,
) -> Result<ReferenceQuantities> {
    let mesh: &PolyMesh = space.mesh();
    let mut lower = f64::INFINITY;
    let mut k_norm = 0.0_f64;
    let mut div_norm = 0.0_f64;
    let mut max_asym = 0.0_f64;
    let mut raw = Vec::with_capacity(mesh.n_elements());
    for t in 0..mesh.n_elements() {
        let quad = space.quadrature(Entity::Element(t))?;
        let mut a_ref = 0.0_f64;
        let mut penalty = 0.0_f64;
        for &x in &quad.points {
            for i in 0..model.dim() {
                let a = model.advection(i, x);
                let norm = a.symmetric_spectral_norm();
                a_ref = a_ref.max(norm);
                max_asym = max_asym.max(a.asymmetry() / norm.max(f64::MIN_POSITIVE));
            }
            penalty = penalty.max(model.penalty_scale(x));
            lower = lower.min(model.coercivity_field(x).min_symmetric_eigenvalue());
            k_norm = k_norm.max(model.reaction(x).spectral_norm());
            div_norm = div_norm.max(model.div_advection(x).spectral_norm());
        }
        raw.push((a_ref, penalty));
    }

    let mut warnings = Vec::new();
    let r_flat = match model.prescribed_r_flat() {
        Some(r) => {
            if lower < r - FIELD_CHECK_TOL {
                warnings.push(format!(
                    "prescribed r_flat = {r} exceeds the sampled lower bound {lower:.3e}; \
                     well-posedness is not covered by the coercivity assumption"
                ));
            }
            r
        }
        None if lower > 0.0 => lower,
        None => {
            warnings.push(format!("sampled lower bound {lower:.3e} is not positive; r_flat floored at 0"));
            0.0
        }
    };
    let jump_weight = r_flat.max(jump_floor);
    if r_flat == 0.0 {
        warnings.push(format!(
            "r_flat = 0: coercivity is not guaranteed; jump term weighted by the floor {jump_weight:e}"
        ));
    }
    if max_asym > 1e-12 {
        warnings.push(format!("advection fields are not symmetric (relative asymmetry {max_asym:.3e})"));
    }

    let mut elements = Vec::with_capacity(raw.len());
    for (t, (a_ref, penalty_ref)) in raw.into_iter().enumerate() {
        if a_ref == 0.0 && r_flat == 0.0 {
            return Err(Error::DegenerateModel { element: t });
        }
        elements.push(ElementReference {
            a_ref,
            penalty_ref,
            tau: tau(mesh.element(t).diameter, a_ref, r_flat),
        });
    }
    Ok(ReferenceQuantities {
        r_flat,
        jump_weight,
        sampled_lower_bound: lower,
        r_sharp: k_norm + div_norm,
        elements,
        max_asymmetry: max_asym,
        warnings,
    })
}

/// A mesh, a model, the discrete space and the derived constants.
pub struct Discretization<'a> {
    pub space: HybridSpace<'a>,
    pub model: &'a dyn FriedrichsModel,
    pub options: SchemeOptions,
    pub refs: ReferenceQuantities,
}

impl<'a> Discretization<'a> {
    pub fn new(mesh: &'a PolyMesh, model: &'a dyn FriedrichsModel, options: SchemeOptions) -> Result<Self> {
        if mesh.dim() != model.dim() {
            return Err(Error::Config(format!(
                "mesh dimension {} does not match model dimension {}",
                mesh.dim(),
                model.dim()
            )));
        }
        let space = HybridSpace::new(mesh, options.degree, model.size(), options.quad_degree(), options.orthonormal_basis)?;
        let refs = reference_quantities(&space, model, options.jump_floor)?;
        Ok(Discretization {
            space,
            model,
            options,
            refs,
        })
    }

    #[inline]
    pub fn mesh(&self) -> &'a PolyMesh {
        self.space.mesh()
    }
}
