//! Sub-Riemannian geometry of the k+p structure on SU(2), its lens-space
//! quotient L(4,1), and the resulting planner for curves on the sphere that
//! minimize length plus squared geodesic curvature between points with
//! (unoriented) directions.

pub mod angle;
pub mod cutlocus;
pub mod distance;
pub mod error;
pub mod geodesic;
pub mod lens;
pub mod oracle;
pub mod sphere;
pub mod su2;

pub use cutlocus::{sample_cut_locus, CutGrid, CutSample, Stratum};
pub use distance::{distance, distance_from_id, solve_geodesic, GeodesicSolution, Multiplicity};
pub use error::{Error, Result};
pub use lens::{canonicalize, lens_distance, LensPoint};
pub use geodesic::{cut_time, exp_map, sample_geodesic, Covector, GeodesicSample};
pub use sphere::{plan, PlanResult, SpherePose};
pub use su2::{AbcCoords, AlgebraVector, GroupElement};
