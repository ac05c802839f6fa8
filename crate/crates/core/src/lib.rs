//! Arbitrary-order hybrid discretization of Friedrichs systems on
//! polytopal meshes.
//!
//! Unknowns live on mesh elements and faces. The crate covers mesh
//! geometry and quadrature, polynomial bases, the model abstraction with
//! scalar and vector diffusion-advection-reaction models, local assembly
//! with static condensation, iterative and dense solvers, numerical fluxes
//! and error norms. It only needs `alloc`; file IO and the command-line
//! driver live in the `friedrichs` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dense;
pub mod error;
pub mod geometry;
pub mod math;
pub mod mesh;
pub mod model;
pub mod basis;
pub mod discretization;
pub mod sparse;
pub mod assembly;
pub mod solve;
pub mod post;
pub mod identities;
pub mod quadrature;
pub mod small;

pub use error::{Error, MeshError, Result};
pub use geometry::Vec3;
pub use mesh::{Entity, PolyMesh};
