//! File formats, a sparse direct solver and the study driver for
//! `friedrichs-core`.

pub mod config;
pub mod dat;
pub mod direct;
pub mod harness;
pub mod io;
pub mod voronoi;
pub mod vtk;

pub use config::StudyConfig;
