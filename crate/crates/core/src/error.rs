use thiserror::Error;

use crate::su2::AbcCoords;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The (a, b, c) chart degenerates at a = 0 or a = pi; `fallback` uses b = 0.
    #[error("(a,b,c) chart is degenerate at a = {}; only c -/+ b is defined", fallback.a)]
    DegenerateChart { fallback: AbcCoords },

    #[error("group element drifted off the unit sphere (|norm - 1| = {drift:e})")]
    NormDrift { drift: f64 },

    #[error("target is the identity; no geodesic to solve for")]
    IdentityTarget,

    #[error("geodesic solver failed: {0}")]
    SolverFailure(String),

    #[error("brute-force oracle did not reach the target (best mismatch {best_mismatch:e})")]
    NotReached { best_mismatch: f64 },

    #[error("lens-space curve is discontinuous at sample {index} (gap {gap:e})")]
    DiscontinuousInput { index: usize, gap: f64 },

    #[error("orbit check and S^3 lens relation disagree for the given pair")]
    RelationMismatch,

    #[error("sample {index} sits at a chart pole (a = {a:e})")]
    DegenerateSegment { index: usize, a: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
