use thiserror::Error;

use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),

    #[error("degenerate box on axis {axis}: lower {lower} is not below upper {upper}")]
    DegenerateBox { axis: usize, lower: f64, upper: f64 },

    #[error("point is not strictly inside the domain")]
    NotInterior,

    #[error("point lies outside the domain")]
    Outside,

    #[error("segment endpoints must straddle the boundary (inside: {inside_in}, outside: {outside_in})")]
    NoCrossing { inside_in: bool, outside_in: bool },

    #[error("point is off the boundary by a relative {0:e}")]
    OffBoundary(f64),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("brownian path did not exit within {max_steps} steps (elapsed time {elapsed}); dt too small or domain too large")]
    MaxStepsExceeded {
        max_steps: u64,
        elapsed: f64,
        position: Point,
    },

    #[error("walk-on-spheres did not reach the absorption shell within {max_hops} hops (boundary distance {distance:e}); epsilon too small")]
    MaxHopsExceeded {
        max_hops: u64,
        distance: f64,
        position: Point,
    },

    #[error("start point too close to the boundary for rejection sampling (rho/r = {0}); use walk-on-spheres instead")]
    NearBoundary(f64),

    #[error("{0} requires a ball domain")]
    RequiresBall(&'static str),

    #[error("empty sample")]
    EmptySample,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
