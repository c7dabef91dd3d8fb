use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `q = 0`: the point lies on the collision plane, outside `T_*R^4`.
    #[error("q = 0 lies outside the domain of ks (collision plane)")]
    CollisionPoint,

    /// `x = 0`: Kepler state at the singularity.
    #[error("x = 0: Kepler state at collision")]
    KeplerCollision,

    #[error("point is off the level set (H2, Xi) = ({h2}, {xi}): |dH2| = {dh2:e}, |dXi| = {dxi:e}")]
    OffLevelSet {
        h2: f64,
        xi: f64,
        dh2: f64,
        dxi: f64,
    },

    #[error("wedge violation: |xi| = {xi} exceeds h = {h}")]
    OutsideWedge { h: f64, xi: f64 },

    #[error("not on the orbit space: max relation residual {0:e}")]
    OffOrbitSpace(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("paired boundary expressions disagree by {0:e}")]
    InconsistentBoundaryPair(f64),

    #[error("quadratic form is not in the span of the invariant generators")]
    NotInGeneratorSpan,

    #[error("radial start r0 = {0} outside (0, 2]")]
    RadialOutOfRange(f64),

    #[error("invalid trajectory: {0}")]
    Trajectory(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
