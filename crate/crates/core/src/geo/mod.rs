//! Route geometry and the per-route attribute record.
//!
//! All coordinates are planar metres (easting, northing). Nothing here does
//! geodesic math or reprojection.

mod attributes;
mod grid;
pub mod io;
mod proximity;
mod route;
mod types;

pub use attributes::{
    compute_attributes, compute_attributes_batch, AttributeName, AttributeParams, ContextLayers,
    RouteAttributes,
};
pub use grid::{sample_elevation, ElevationGrid};
pub use proximity::{nearest_place, point_in_ring, point_segment_distance, proximity_percent};
pub use route::{
    compute_grade, elevation_gain_loss, elevation_profile, filter_route, is_circular,
    is_out_and_back, buffer_overlap_ratio, route_length, sample_points, FilterOutcome,
    RejectReason, DEFAULT_STEP_M,
};
pub use types::{FeatureLayer, Geometry, LayerClass, NamedPlace, Point2D, RoutePolyline};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("coordinate is not finite")]
    NonFiniteCoordinate,
    #[error("route {0:?} has fewer than 2 distinct points")]
    TooFewPoints(String),
    #[error("route {0:?} has zero length")]
    DegenerateRoute(String),
    #[error("point ({easting}, {northing}) is outside the elevation grid")]
    OutOfExtent { easting: f64, northing: f64 },
    #[error("no-data cell at column {col}, row {row}")]
    NoDataCell { col: usize, row: usize },
    #[error("profile needs at least 2 samples, got {0}")]
    InsufficientProfile(usize),
    #[error("route length must be positive")]
    ZeroLength,
    #[error("sampling step must be positive")]
    InvalidStep,
    #[error("invalid elevation grid: {0}")]
    InvalidGrid(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("place name is empty")]
    EmptyPlaceName,
}
