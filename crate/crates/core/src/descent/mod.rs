//! Curves with full rational 2-torsion, the descent map and complete
//! 2-descent.

pub mod corpus;
pub mod curve;
pub mod local_image;
pub mod search;
pub mod selmer;

pub use corpus::corpus;
pub use curve::{new_curve, Curve2T, CurvePoint};
pub use local_image::{local_image, local_image_auto, local_x_witnesses, LocalImage, Witness};
pub use search::point_search;
pub use selmer::{
    descent_map, local_solvable, selmer2, selmer_candidates, selmer_places, CandidateSpace, SelmerElement,
    SelmerGroup, SelmerStatus,
};
