//! Explicit 2-coverings, the functions `f_j` on them, local points and
//! second-descent equations.

pub mod conic;
pub mod ftriple;
pub mod model;
pub mod points;
pub mod poly;
pub mod second;

pub use ftriple::{construct_f, FTriple};
pub use model::{make_covering, trivial_point, Cone, CoveringModel};
pub use points::{
    default_precision, delta_f_consistency, evaluate_f, local_point, local_points, local_points_auto, trivial_preimage,
    verify_f_properties, FReport, LocalPoint, PointCertificate,
};
pub use poly::Poly;
pub use second::{second_covering, SecondCovering};
