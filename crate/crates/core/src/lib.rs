//! Shape studies for clamped elastic roof cross-sections.
//!
//! The crate solves the mixed Dirichlet/Neumann linear elasticity system on
//! polygonal cross-sections with P1 triangles, evaluates the quadratic energy
//! of the displacement field, and searches a constrained family of roof
//! profiles for energy-minimizing shapes. Around that pipeline it provides
//! the certification and study tooling the shape class calls for:
//!
//! * sampled set metrics and cone/uniformity/regularity checks ([`geometry`]),
//! * structured roof meshing with tagged boundaries and lumped boundary
//!   measures ([`mesh`], [`measure`]),
//! * assembly, solvers and discrete Korn/Poincare constants ([`elasticity`]),
//! * the target functional ([`functional`]),
//! * a projected Nelder-Mead driver over admissible profiles ([`shapeopt`]),
//! * Robin-form convergence indicators on domain sequences ([`mosco`]).
//!
//! Heavy inner loops run data-parallel on rayon when the default `parallel`
//! feature is enabled and fall back to plain iterators without it; results
//! are bit-identical either way.

pub mod error;
pub mod exec;
pub mod geometry;
pub mod measure;
pub mod mesh;
pub mod elasticity;
pub mod functional;
pub mod shapeopt;
pub mod mosco;
pub mod report;

pub use error::{Error, Result};
pub use geometry::Point2;
