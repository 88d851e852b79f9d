//! Text formats for routes, context layers, places and attribute tables.
//!
//! * routes: one GeoJSON `Feature` per line with a `LineString` geometry and
//!   the route id in `id` (or `properties.route_id`)
//! * layers: one GeoJSON `FeatureCollection` per class with `Polygon`
//!   (outer ring only) or `LineString` geometries
//! * places: CSV with header `name,easting,northing`
//! * attributes: CSV with one column per [`RouteAttributes`] field

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FeatureLayer, GeoError, Geometry, LayerClass, NamedPlace, Point2D, RoutePolyline, RouteAttributes};

#[derive(Debug, Error)]
pub enum GeoIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Json { line: usize, msg: String },
    #[error("record {record}: {source}")]
    Geometry {
        record: String,
        #[source]
        source: GeoError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct FeatureJson {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<serde_json::Value>,
    #[serde(default)]
    properties: Option<serde_json::Map<String, serde_json::Value>>,
    geometry: GeometryJson,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type")]
enum GeometryJson {
    LineString { coordinates: Vec<Vec<f64>> },
    Polygon { coordinates: Vec<Vec<Vec<f64>>> },
}

#[derive(Debug, Serialize, Deserialize)]
struct CollectionJson {
    #[serde(rename = "type")]
    kind: String,
    features: Vec<FeatureJson>,
}

fn to_points(coords: &[Vec<f64>]) -> Result<Vec<Point2D>, String> {
    coords
        .iter()
        .map(|c| match c.as_slice() {
            [e, n, ..] => Ok(Point2D::new(*e, *n)),
            _ => Err("position needs two coordinates".to_string()),
        })
        .collect()
}

fn from_points(pts: &[Point2D]) -> Vec<Vec<f64>> {
    pts.iter().map(|p| vec![p.easting, p.northing]).collect()
}

fn feature_id(f: &FeatureJson) -> Option<String> {
    let as_text = |v: &serde_json::Value| match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    };
    f.id.as_ref()
        .and_then(as_text)
        .or_else(|| f.properties.as_ref()?.get("route_id").and_then(as_text))
}

pub fn parse_route_line(line: &str, line_no: usize) -> Result<RoutePolyline, GeoIoError> {
    let json_err = |msg: String| GeoIoError::Json { line: line_no, msg };
    let f: FeatureJson = serde_json::from_str(line).map_err(|e| json_err(e.to_string()))?;
    if f.kind != "Feature" {
        return Err(json_err(format!("expected a Feature, got {:?}", f.kind)));
    }
    let id = feature_id(&f).ok_or_else(|| json_err("route has no id".into()))?;
    let GeometryJson::LineString { coordinates } = &f.geometry else {
        return Err(json_err(format!("route {id}: only LineString geometries are accepted")));
    };
    let pts = to_points(coordinates).map_err(json_err)?;
    RoutePolyline::new(id.clone(), pts).map_err(|source| GeoIoError::Geometry { record: id, source })
}

pub fn route_to_line(route: &RoutePolyline) -> String {
    let mut props = serde_json::Map::new();
    props.insert("route_id".into(), route.id().into());
    let f = FeatureJson {
        kind: "Feature".into(),
        id: Some(route.id().into()),
        properties: Some(props),
        geometry: GeometryJson::LineString { coordinates: from_points(route.points()) },
    };
    serde_json::to_string(&f).expect("feature serializes")
}

/// Reads every route; the first malformed record aborts.
pub fn read_routes<R: BufRead>(reader: R) -> Result<Vec<RoutePolyline>, GeoIoError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_route_line(&line, i + 1)?);
    }
    Ok(out)
}

pub fn write_routes<W: Write>(mut w: W, routes: &[RoutePolyline]) -> std::io::Result<()> {
    for r in routes {
        writeln!(w, "{}", route_to_line(r))?;
    }
    Ok(())
}

pub fn read_routes_file(path: &Path) -> Result<Vec<RoutePolyline>, GeoIoError> {
    read_routes(BufReader::new(File::open(path)?))
}

pub fn write_routes_file(path: &Path, routes: &[RoutePolyline]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_routes(&mut w, routes)?;
    w.flush()
}

pub fn read_layer<R: std::io::Read>(class: LayerClass, reader: R) -> Result<FeatureLayer, GeoIoError> {
    let json_err = |msg: String| GeoIoError::Json { line: 0, msg };
    let c: CollectionJson = serde_json::from_reader(reader).map_err(|e| json_err(e.to_string()))?;
    if c.kind != "FeatureCollection" {
        return Err(json_err(format!("expected a FeatureCollection, got {:?}", c.kind)));
    }
    let mut geoms = Vec::with_capacity(c.features.len());
    for f in &c.features {
        geoms.push(match &f.geometry {
            GeometryJson::LineString { coordinates } => Geometry::LineString(to_points(coordinates).map_err(json_err)?),
            GeometryJson::Polygon { coordinates } => match coordinates.as_slice() {
                [outer] => Geometry::Polygon(to_points(outer).map_err(json_err)?),
                [] => return Err(json_err("polygon without rings".into())),
                _ => return Err(json_err("polygon holes are not supported".into())),
            },
        });
    }
    FeatureLayer::new(class, geoms)
        .map_err(|source| GeoIoError::Geometry { record: class.to_string(), source })
}

pub fn write_layer<W: Write>(w: W, layer: &FeatureLayer) -> std::io::Result<()> {
    let features = layer
        .geometries()
        .iter()
        .map(|g| FeatureJson {
            kind: "Feature".into(),
            id: None,
            properties: Some(serde_json::Map::new()),
            geometry: match g {
                Geometry::LineString(l) => GeometryJson::LineString { coordinates: from_points(l) },
                Geometry::Polygon(r) => GeometryJson::Polygon { coordinates: vec![from_points(r)] },
            },
        })
        .collect();
    let c = CollectionJson { kind: "FeatureCollection".into(), features };
    serde_json::to_writer(w, &c).map_err(std::io::Error::other)
}

#[derive(Debug, Serialize, Deserialize)]
struct PlaceRow {
    name: String,
    easting: f64,
    northing: f64,
}

pub fn read_places<R: std::io::Read>(reader: R) -> Result<Vec<NamedPlace>, GeoIoError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: PlaceRow = row?;
        let place = NamedPlace::new(row.name.clone(), Point2D::new(row.easting, row.northing))
            .map_err(|source| GeoIoError::Geometry { record: row.name, source })?;
        out.push(place);
    }
    Ok(out)
}

pub fn write_places<W: Write>(w: W, places: &[NamedPlace]) -> Result<(), GeoIoError> {
    let mut wtr = csv::Writer::from_writer(w);
    for p in places {
        wtr.serialize(PlaceRow {
            name: p.name.clone(),
            easting: p.location.easting,
            northing: p.location.northing,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_attributes<R: std::io::Read>(reader: R) -> Result<Vec<RouteAttributes>, GeoIoError> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(GeoIoError::from)).collect()
}

pub fn write_attributes<W: Write>(w: W, attrs: &[RouteAttributes]) -> Result<(), GeoIoError> {
    let mut wtr = csv::Writer::from_writer(w);
    for a in attrs {
        wtr.serialize(a)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_line_round_trip() {
        let r = RoutePolyline::new(
            "r-17",
            vec![Point2D::new(1.5, 2.0), Point2D::new(100.25, -3.0), Point2D::new(7.0, 8.0)],
        )
        .unwrap();
        let line = route_to_line(&r);
        assert_eq!(parse_route_line(&line, 1).unwrap(), r);
    }

    #[test]
    fn route_id_from_properties_and_rejections() {
        let line = r#"{"type":"Feature","properties":{"route_id":42},"geometry":{"type":"LineString","coordinates":[[0,0],[1,1,5]]}}"#;
        assert_eq!(parse_route_line(line, 1).unwrap().id(), "42");

        let poly = r#"{"type":"Feature","id":"p","geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}"#;
        assert!(matches!(parse_route_line(poly, 3), Err(GeoIoError::Json { line: 3, .. })));

        let degenerate = r#"{"type":"Feature","id":"d","geometry":{"type":"LineString","coordinates":[[0,0],[0,0]]}}"#;
        assert!(matches!(parse_route_line(degenerate, 1), Err(GeoIoError::Geometry { .. })));
    }

    #[test]
    fn layer_round_trip() {
        let ring = vec![
            Point2D::new(0., 0.),
            Point2D::new(10., 0.),
            Point2D::new(10., 10.),
            Point2D::new(0., 0.),
        ];
        let layer = FeatureLayer::new(
            LayerClass::Coastline,
            vec![
                Geometry::Polygon(ring),
                Geometry::LineString(vec![Point2D::new(0., 0.), Point2D::new(5., 5.)]),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_layer(&mut buf, &layer).unwrap();
        assert_eq!(read_layer(LayerClass::Coastline, &buf[..]).unwrap(), layer);
    }

    #[test]
    fn places_with_commas_round_trip() {
        let places = vec![
            NamedPlace::new("Priddy, Somerset", Point2D::new(1.0, 2.0)).unwrap(),
            NamedPlace::new("Wells", Point2D::new(-3.5, 4.0)).unwrap(),
        ];
        let mut buf = Vec::new();
        write_places(&mut buf, &places).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("name,easting,northing\n"));
        assert_eq!(read_places(&buf[..]).unwrap(), places);
    }
}
