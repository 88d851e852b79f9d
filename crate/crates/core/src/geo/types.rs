use std::fmt;

use serde::{Deserialize, Serialize};

use super::GeoError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub easting: f64,
    pub northing: f64,
}

impl Point2D {
    pub const fn new(easting: f64, northing: f64) -> Self {
        Self { easting, northing }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.easting - other.easting).hypot(self.northing - other.northing)
    }

    pub fn is_finite(&self) -> bool {
        self.easting.is_finite() && self.northing.is_finite()
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Point2D {
        Point2D::new(self.easting + dx, self.northing + dy)
    }
}

impl From<(f64, f64)> for Point2D {
    fn from((e, n): (f64, f64)) -> Self {
        Point2D::new(e, n)
    }
}

/// One hike as an ordered polyline.
///
/// Construction drops consecutive duplicate points and requires at least two
/// distinct points to remain.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutePolyline {
    id: String,
    points: Vec<Point2D>,
}

impl RoutePolyline {
    pub fn new(id: impl Into<String>, points: Vec<Point2D>) -> Result<Self, GeoError> {
        let id = id.into();
        if points.iter().any(|p| !p.is_finite()) {
            return Err(GeoError::NonFiniteCoordinate);
        }
        if points.len() < 2 {
            return Err(GeoError::TooFewPoints(id));
        }
        let mut deduped: Vec<Point2D> = Vec::with_capacity(points.len());
        for p in points {
            if deduped.last() != Some(&p) {
                deduped.push(p);
            }
        }
        if deduped.len() < 2 {
            return Err(GeoError::DegenerateRoute(id));
        }
        Ok(Self { id, points: deduped })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn first(&self) -> Point2D {
        self.points[0]
    }

    pub fn last(&self) -> Point2D {
        self.points[self.points.len() - 1]
    }

    pub fn reversed(&self) -> RoutePolyline {
        let mut points = self.points.clone();
        points.reverse();
        Self { id: self.id.clone(), points }
    }

    pub fn map_points(&self, f: impl Fn(Point2D) -> Point2D) -> Result<RoutePolyline, GeoError> {
        RoutePolyline::new(self.id.clone(), self.points.iter().copied().map(f).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayerClass {
    SurfaceWater,
    Coastline,
    NationalPark,
    Greenspace,
    Woodland,
    Urban,
}

impl LayerClass {
    pub const ALL: [LayerClass; 6] = [
        LayerClass::SurfaceWater,
        LayerClass::Coastline,
        LayerClass::NationalPark,
        LayerClass::Greenspace,
        LayerClass::Woodland,
        LayerClass::Urban,
    ];

    /// Stable snake-case name, also used as the layer file stem.
    pub fn as_str(self) -> &'static str {
        match self {
            LayerClass::SurfaceWater => "surface_water",
            LayerClass::Coastline => "coastline",
            LayerClass::NationalPark => "national_park",
            LayerClass::Greenspace => "greenspace",
            LayerClass::Woodland => "woodland",
            LayerClass::Urban => "urban",
        }
    }

    pub fn parse(s: &str) -> Option<LayerClass> {
        LayerClass::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for LayerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Closed outer ring: first point equals last point.
    Polygon(Vec<Point2D>),
    LineString(Vec<Point2D>),
}

impl Geometry {
    pub fn points(&self) -> &[Point2D] {
        match self {
            Geometry::Polygon(p) | Geometry::LineString(p) => p,
        }
    }

    /// (min_e, min_n, max_e, max_n)
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        self.points().iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.easting), b.min(p.northing), c.max(p.easting), d.max(p.northing)),
        )
    }

    fn validate(&self) -> Result<(), GeoError> {
        let pts = self.points();
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(GeoError::NonFiniteCoordinate);
        }
        match self {
            Geometry::LineString(p) if p.len() < 2 => Err(GeoError::InvalidGeometry(
                "linestring needs at least 2 points".into(),
            )),
            Geometry::LineString(_) => Ok(()),
            Geometry::Polygon(ring) => {
                if ring.len() < 4 {
                    return Err(GeoError::InvalidGeometry("ring needs at least 4 points".into()));
                }
                if ring.first() != ring.last() {
                    return Err(GeoError::InvalidGeometry("ring is not closed".into()));
                }
                if ring_self_intersects(ring) {
                    return Err(GeoError::InvalidGeometry("ring self-intersects".into()));
                }
                Ok(())
            }
        }
    }
}

fn orient(a: Point2D, b: Point2D, c: Point2D) -> f64 {
    (b.easting - a.easting) * (c.northing - a.northing)
        - (b.northing - a.northing) * (c.easting - a.easting)
}

fn on_segment(a: Point2D, b: Point2D, p: Point2D) -> bool {
    p.easting >= a.easting.min(b.easting)
        && p.easting <= a.easting.max(b.easting)
        && p.northing >= a.northing.min(b.northing)
        && p.northing <= a.northing.max(b.northing)
}

fn segments_intersect(a: Point2D, b: Point2D, c: Point2D, d: Point2D) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Pairwise test of non-adjacent ring edges. Quadratic; context rings are small.
fn ring_self_intersects(ring: &[Point2D]) -> bool {
    let n = ring.len() - 1;
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1]) {
                return true;
            }
        }
    }
    false
}

/// All geometries of one context class.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureLayer {
    class: LayerClass,
    geometries: Vec<Geometry>,
    bboxes: Vec<(f64, f64, f64, f64)>,
}

impl FeatureLayer {
    pub fn new(class: LayerClass, geometries: Vec<Geometry>) -> Result<Self, GeoError> {
        for g in &geometries {
            g.validate()?;
        }
        let bboxes = geometries.iter().map(Geometry::bbox).collect();
        Ok(Self { class, geometries, bboxes })
    }

    pub fn empty(class: LayerClass) -> Self {
        Self { class, geometries: Vec::new(), bboxes: Vec::new() }
    }

    pub fn class(&self) -> LayerClass {
        self.class
    }

    pub fn geometries(&self) -> &[Geometry] {
        &self.geometries
    }

    /// Bounding boxes parallel to [`FeatureLayer::geometries`].
    pub fn bboxes(&self) -> &[(f64, f64, f64, f64)] {
        &self.bboxes
    }

    pub fn is_empty(&self) -> bool {
        self.geometries.is_empty()
    }

    pub fn map_points(&self, f: impl Fn(Point2D) -> Point2D) -> FeatureLayer {
        let geometries = self
            .geometries
            .iter()
            .map(|g| match g {
                Geometry::Polygon(r) => Geometry::Polygon(r.iter().copied().map(&f).collect()),
                Geometry::LineString(l) => Geometry::LineString(l.iter().copied().map(&f).collect()),
            })
            .collect::<Vec<_>>();
        let bboxes = geometries.iter().map(Geometry::bbox).collect();
        FeatureLayer { class: self.class, geometries, bboxes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPlace {
    pub name: String,
    pub location: Point2D,
}

impl NamedPlace {
    pub fn new(name: impl Into<String>, location: Point2D) -> Result<Self, GeoError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(GeoError::EmptyPlaceName);
        }
        if !location.is_finite() {
            return Err(GeoError::NonFiniteCoordinate);
        }
        Ok(Self { name, location })
    }
}
