//! Isogeometric 3D analysis of cross-ply laminated plates.
//!
//! The pipeline solves 3D linear elasticity on a simply supported plate with
//! B-spline displacements, either with one C⁰-joined element per ply
//! (layerwise) or with a single high-order element through the thickness
//! integrated ply by ply. The coarse single-element solution is then
//! post-processed: out-of-plane stresses are rebuilt by integrating the
//! equilibrium equations through the thickness, using in-plane stress
//! derivatives taken from the smooth spline displacement. An exact
//! elasticity solution of the same plate serves as the reference.

pub mod bench;
pub mod bspline;
pub mod config;
pub mod error;
pub mod iga;
pub mod laminate;
pub mod pagano;
pub mod quadrature;
pub mod recovery;

pub use error::{Error, Result};
