use super::{sample_elevation, ElevationGrid, GeoError, Point2D, RoutePolyline};

/// Arc-length spacing of elevation and proximity samples.
pub const DEFAULT_STEP_M: f64 = 10.0;

pub fn route_length(route: &RoutePolyline) -> Result<f64, GeoError> {
    let len: f64 = route.points().windows(2).map(|w| w[0].distance(&w[1])).sum();
    if len > 0.0 {
        Ok(len)
    } else {
        Err(GeoError::DegenerateRoute(route.id().to_string()))
    }
}

/// Points at arc-length 0, step, 2*step, ... plus the exact route end.
pub fn sample_points(route: &RoutePolyline, step: f64) -> Result<Vec<Point2D>, GeoError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(GeoError::InvalidStep);
    }
    let total = route_length(route)?;
    let tol = 1e-9 * total.max(1.0);
    let mut out = Vec::with_capacity((total / step) as usize + 2);

    let pts = route.points();
    let mut seg = 0;
    let mut seg_start = 0.0;
    let mut seg_len = pts[0].distance(&pts[1]);
    let mut k = 0u64;
    loop {
        let s = k as f64 * step;
        if s >= total - tol {
            break;
        }
        while s > seg_start + seg_len && seg + 2 < pts.len() {
            seg_start += seg_len;
            seg += 1;
            seg_len = pts[seg].distance(&pts[seg + 1]);
        }
        let (a, b) = (pts[seg], pts[seg + 1]);
        let t = (s - seg_start).clamp(0.0, seg_len);
        // multiply before dividing keeps integer geometry exact
        out.push(Point2D::new(
            a.easting + (b.easting - a.easting) * t / seg_len,
            a.northing + (b.northing - a.northing) * t / seg_len,
        ));
        k += 1;
    }
    out.push(route.last());
    Ok(out)
}

pub fn elevation_profile(
    route: &RoutePolyline,
    grid: &ElevationGrid,
    step: f64,
) -> Result<Vec<f64>, GeoError> {
    sample_points(route, step)?
        .into_iter()
        .map(|p| sample_elevation(grid, p))
        .collect()
}

/// Sums of positive and negative consecutive differences, unsmoothed.
pub fn elevation_gain_loss(profile: &[f64]) -> Result<(f64, f64), GeoError> {
    if profile.len() < 2 {
        return Err(GeoError::InsufficientProfile(profile.len()));
    }
    Ok(profile.windows(2).fold((0.0, 0.0), |(gain, loss), w| {
        let d = w[1] - w[0];
        if d > 0.0 {
            (gain + d, loss)
        } else {
            (gain, loss - d)
        }
    }))
}

/// Total gain per hundred metres of route, unrounded.
pub fn compute_grade(total_gain: f64, length_m: f64) -> Result<f64, GeoError> {
    if length_m > 0.0 {
        Ok(total_gain / length_m * 100.0)
    } else {
        Err(GeoError::ZeroLength)
    }
}

/// Start and end within `threshold` metres (inclusive).
pub fn is_circular(route: &RoutePolyline, threshold: f64) -> bool {
    route.first().distance(&route.last()) <= threshold
}

/// Area of the route's buffer divided by the area of a non-overlapping
/// buffer of the same length (`2 * buffer * length`).
///
/// The buffer is the union of per-segment capsules, measured by counting
/// `raster` metre cells whose centres lie inside it. The raster is anchored
/// at the coordinate origin; covered cells are tracked in a bitmap over the
/// route's bounding box.
pub fn buffer_overlap_ratio(
    route: &RoutePolyline,
    buffer: f64,
    raster: f64,
) -> Result<f64, GeoError> {
    let length = route_length(route)?;
    let r2 = buffer * buffer;
    let pts = route.points();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.easting);
        y0 = y0.min(p.northing);
        x1 = x1.max(p.easting);
        y1 = y1.max(p.northing);
    }
    let i_min = ((x0 - buffer) / raster).floor() as i64;
    let j_min = ((y0 - buffer) / raster).floor() as i64;
    let width = (((x1 + buffer) / raster).ceil() as i64 - i_min + 1) as usize;
    let height = (((y1 + buffer) / raster).ceil() as i64 - j_min + 1) as usize;
    let mut covered = vec![0u64; (width * height).div_ceil(64)];
    let mut count = 0usize;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let i0 = ((a.easting.min(b.easting) - buffer) / raster).floor() as i64;
        let i1 = ((a.easting.max(b.easting) + buffer) / raster).ceil() as i64;
        let j0 = ((a.northing.min(b.northing) - buffer) / raster).floor() as i64;
        let j1 = ((a.northing.max(b.northing) + buffer) / raster).ceil() as i64;
        for j in j0..=j1 {
            let row = (j - j_min) as usize * width;
            for i in i0..=i1 {
                let bit = row + (i - i_min) as usize;
                let (word, mask) = (bit / 64, 1u64 << (bit % 64));
                if covered[word] & mask != 0 {
                    continue;
                }
                let c = Point2D::new((i as f64 + 0.5) * raster, (j as f64 + 0.5) * raster);
                if super::proximity::segment_distance_sq(c, a, b) <= r2 {
                    covered[word] |= mask;
                    count += 1;
                }
            }
        }
    }
    let area = count as f64 * raster * raster;
    Ok(area / (2.0 * buffer * length))
}

/// Circular routes whose buffer overlaps itself enough to push the area
/// ratio below `max_ratio`.
pub fn is_out_and_back(
    route: &RoutePolyline,
    circular_threshold: f64,
    buffer: f64,
    raster: f64,
    max_ratio: f64,
) -> Result<bool, GeoError> {
    if !is_circular(route, circular_threshold) {
        return Ok(false);
    }
    Ok(buffer_overlap_ratio(route, buffer, raster)? < max_ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    TooShort,
    TooLong,
    GpsAnomaly,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::TooShort => "TooShort",
            RejectReason::TooLong => "TooLong",
            RejectReason::GpsAnomaly => "GpsAnomaly",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterOutcome {
    Keep,
    Reject(RejectReason),
}

/// Corpus filter: 1 km to 50 km inclusive, and no vertex-to-vertex jump
/// longer than 500 m.
pub fn filter_route(route: &RoutePolyline) -> FilterOutcome {
    const MIN_LENGTH: f64 = 1_000.0;
    const MAX_LENGTH: f64 = 50_000.0;
    const MAX_JUMP: f64 = 500.0;

    let length: f64 = route.points().windows(2).map(|w| w[0].distance(&w[1])).sum();
    if length < MIN_LENGTH {
        return FilterOutcome::Reject(RejectReason::TooShort);
    }
    if length > MAX_LENGTH {
        return FilterOutcome::Reject(RejectReason::TooLong);
    }
    if route.points().windows(2).any(|w| w[0].distance(&w[1]) > MAX_JUMP) {
        return FilterOutcome::Reject(RejectReason::GpsAnomaly);
    }
    FilterOutcome::Keep
}
