//! Computational geometry for the admissible domain classes: set metrics,
//! cone and uniformity certification, boundary-measure regularity checks and
//! prefractal boundary generators.
//!
//! All checks here are sampled approximations on explicit deterministic
//! grids; a pass is a certificate at the sampling resolution recorded in the
//! report, never an exact proof.

mod cone;
mod koch;
mod metrics;
mod point;
mod polygon;
mod regularity;
mod uniform;

pub use cone::{check_eps_cone, near_tangent_disks, ConeCheckReport, ConeSampling, ConeWitness};
pub use koch::koch_prefractal;
pub use metrics::{char_fn_distance, hausdorff_distance, GridSpec};
pub use point::Point2;
pub use polygon::{read_points, write_points, PointCloud, Polygon};
pub use regularity::{check_lower_regularity, check_upper_regularity, RegularityReport};
pub use uniform::{check_uniform_domain, UniformityReport};
