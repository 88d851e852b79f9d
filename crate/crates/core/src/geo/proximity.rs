use super::{route::sample_points, FeatureLayer, GeoError, Geometry, NamedPlace, Point2D, RoutePolyline};

pub(crate) fn segment_distance_sq(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    let (dx, dy) = (b.easting - a.easting, b.northing - a.northing);
    let len_sq = dx * dx + dy * dy;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((p.easting - a.easting) * dx + (p.northing - a.northing) * dy) / len_sq).clamp(0.0, 1.0)
    };
    let (ex, ey) = (a.easting + t * dx - p.easting, a.northing + t * dy - p.northing);
    ex * ex + ey * ey
}

pub fn point_segment_distance(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    segment_distance_sq(p, a, b).sqrt()
}

/// Even-odd containment for a closed ring. Boundary points count as inside.
pub fn point_in_ring(p: Point2D, ring: &[Point2D]) -> bool {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if segment_distance_sq(p, a, b) == 0.0 {
            return true;
        }
        if (a.northing > p.northing) != (b.northing > p.northing) {
            let x = a.easting
                + (p.northing - a.northing) * (b.easting - a.easting) / (b.northing - a.northing);
            if p.easting < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn near_polyline(p: Point2D, pts: &[Point2D], r2: f64) -> bool {
    pts.windows(2).any(|w| segment_distance_sq(p, w[0], w[1]) <= r2)
}

fn hits(p: Point2D, g: &Geometry, buffer: f64) -> bool {
    let r2 = buffer * buffer;
    match g {
        Geometry::Polygon(ring) => point_in_ring(p, ring) || (buffer > 0.0 && near_polyline(p, ring, r2)),
        Geometry::LineString(line) => near_polyline(p, line, r2),
    }
}

/// Percentage of route samples (spaced `step` along the route) that lie
/// within `buffer` metres of any geometry in `layer`. With `buffer == 0`
/// this is the share of samples inside the layer's polygons.
pub fn proximity_percent(
    route: &RoutePolyline,
    layer: &FeatureLayer,
    buffer: f64,
    step: f64,
) -> Result<f64, GeoError> {
    if !(buffer >= 0.0) {
        return Err(GeoError::InvalidGeometry(format!("negative buffer {buffer}")));
    }
    let samples = sample_points(route, step)?;
    if layer.is_empty() {
        return Ok(0.0);
    }
    let (rmin_e, rmin_n, rmax_e, rmax_n) = samples.iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.easting), b.min(p.northing), c.max(p.easting), d.max(p.northing)),
    );
    let candidates: Vec<(&Geometry, (f64, f64, f64, f64))> = layer
        .geometries()
        .iter()
        .zip(layer.bboxes().iter().copied())
        .filter(|(_, (a, b, c, d))| {
            *a - buffer <= rmax_e && *c + buffer >= rmin_e && *b - buffer <= rmax_n && *d + buffer >= rmin_n
        })
        .collect();

    let inside = samples
        .iter()
        .filter(|p| {
            candidates.iter().any(|(g, (a, b, c, d))| {
                p.easting >= a - buffer
                    && p.easting <= c + buffer
                    && p.northing >= b - buffer
                    && p.northing <= d + buffer
                    && hits(**p, g, buffer)
            })
        })
        .count();
    Ok((100.0 * inside as f64 / samples.len() as f64).clamp(0.0, 100.0))
}

/// Name of the closest place within 1 km; equal distances resolve to the
/// lexicographically smallest name.
pub fn nearest_place(p: Point2D, places: &[NamedPlace]) -> Option<String> {
    const MAX_DISTANCE: f64 = 1_000.0;
    places
        .iter()
        .map(|pl| (pl.location.distance(&p), pl))
        .filter(|(d, _)| *d <= MAX_DISTANCE)
        .min_by(|(da, a), (db, b)| da.total_cmp(db).then_with(|| a.name.cmp(&b.name)))
        .map(|(_, pl)| pl.name.clone())
}
