use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    compute_grade, elevation_gain_loss, elevation_profile, is_circular, is_out_and_back,
    nearest_place, proximity_percent, route_length, ElevationGrid, FeatureLayer, GeoError,
    LayerClass, NamedPlace, RoutePolyline, DEFAULT_STEP_M,
};
use crate::Execution;

/// Thresholds used when deriving attributes. Defaults follow the attribute
/// definitions; every distance is in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttributeParams {
    pub step: f64,
    pub circular_threshold: f64,
    pub out_and_back_buffer: f64,
    pub out_and_back_raster: f64,
    pub out_and_back_max_ratio: f64,
    pub water_buffer: f64,
    pub coast_buffer: f64,
    pub coastal_min_percent: f64,
}

impl Default for AttributeParams {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP_M,
            circular_threshold: 500.0,
            out_and_back_buffer: 25.0,
            out_and_back_raster: 5.0,
            out_and_back_max_ratio: 0.6,
            water_buffer: 50.0,
            coast_buffer: 150.0,
            coastal_min_percent: 50.0,
        }
    }
}

impl AttributeParams {
    /// Every distance multiplied by `s`. Ratios and percentages are unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            step: self.step * s,
            circular_threshold: self.circular_threshold * s,
            out_and_back_buffer: self.out_and_back_buffer * s,
            out_and_back_raster: self.out_and_back_raster * s,
            water_buffer: self.water_buffer * s,
            coast_buffer: self.coast_buffer * s,
            ..*self
        }
    }
}

/// One layer per class; missing classes behave as empty layers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContextLayers {
    layers: BTreeMap<LayerClass, FeatureLayer>,
}

impl ContextLayers {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, layer: FeatureLayer) {
        self.layers.insert(layer.class(), layer);
    }

    pub fn get(&self, class: LayerClass) -> Option<&FeatureLayer> {
        self.layers.get(&class)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeatureLayer> {
        self.layers.values()
    }

    fn percent(
        &self,
        route: &RoutePolyline,
        class: LayerClass,
        buffer: f64,
        step: f64,
    ) -> Result<f64, GeoError> {
        match self.get(class) {
            Some(layer) => proximity_percent(route, layer, buffer, step),
            None => Ok(0.0),
        }
    }

    pub fn map_points(&self, f: impl Fn(super::Point2D) -> super::Point2D) -> ContextLayers {
        ContextLayers {
            layers: self.layers.iter().map(|(c, l)| (*c, l.map_points(&f))).collect(),
        }
    }
}

impl FromIterator<FeatureLayer> for ContextLayers {
    fn from_iter<T: IntoIterator<Item = FeatureLayer>>(iter: T) -> Self {
        let mut out = ContextLayers::new();
        for l in iter {
            out.insert(l);
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteAttributes {
    pub route_id: String,
    pub length_m: f64,
    pub total_gain: f64,
    pub total_loss: f64,
    pub grade: f64,
    pub is_circular: bool,
    pub is_out_and_back: bool,
    pub start_place: Option<String>,
    pub end_place: Option<String>,
    pub along_surfacewater: f64,
    pub along_coast: f64,
    pub is_coastal: bool,
    pub in_national_parks: f64,
    pub in_greenspace: f64,
    pub in_woodland: f64,
    pub in_urban: f64,
}

/// Numeric (or 0/1 boolean) attribute columns that curves can be built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeName {
    LengthM,
    TotalGain,
    TotalLoss,
    Grade,
    IsCircular,
    IsOutAndBack,
    AlongSurfacewater,
    AlongCoast,
    IsCoastal,
    InNationalParks,
    InGreenspace,
    InWoodland,
    InUrban,
}

impl AttributeName {
    pub const ALL: [AttributeName; 13] = [
        AttributeName::LengthM,
        AttributeName::TotalGain,
        AttributeName::TotalLoss,
        AttributeName::Grade,
        AttributeName::IsCircular,
        AttributeName::IsOutAndBack,
        AttributeName::AlongSurfacewater,
        AttributeName::AlongCoast,
        AttributeName::IsCoastal,
        AttributeName::InNationalParks,
        AttributeName::InGreenspace,
        AttributeName::InWoodland,
        AttributeName::InUrban,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AttributeName::LengthM => "length_m",
            AttributeName::TotalGain => "total_gain",
            AttributeName::TotalLoss => "total_loss",
            AttributeName::Grade => "grade",
            AttributeName::IsCircular => "is_circular",
            AttributeName::IsOutAndBack => "is_out_and_back",
            AttributeName::AlongSurfacewater => "along_surfacewater",
            AttributeName::AlongCoast => "along_coast",
            AttributeName::IsCoastal => "is_coastal",
            AttributeName::InNationalParks => "in_national_parks",
            AttributeName::InGreenspace => "in_greenspace",
            AttributeName::InWoodland => "in_woodland",
            AttributeName::InUrban => "in_urban",
        }
    }

    pub fn parse(s: &str) -> Option<AttributeName> {
        AttributeName::ALL.into_iter().find(|a| a.as_str() == s.trim())
    }
}

impl fmt::Display for AttributeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl RouteAttributes {
    /// Attribute value with booleans as 0/1.
    pub fn value(&self, name: AttributeName) -> f64 {
        let b = |v: bool| if v { 1.0 } else { 0.0 };
        match name {
            AttributeName::LengthM => self.length_m,
            AttributeName::TotalGain => self.total_gain,
            AttributeName::TotalLoss => self.total_loss,
            AttributeName::Grade => self.grade,
            AttributeName::IsCircular => b(self.is_circular),
            AttributeName::IsOutAndBack => b(self.is_out_and_back),
            AttributeName::AlongSurfacewater => self.along_surfacewater,
            AttributeName::AlongCoast => self.along_coast,
            AttributeName::IsCoastal => b(self.is_coastal),
            AttributeName::InNationalParks => self.in_national_parks,
            AttributeName::InGreenspace => self.in_greenspace,
            AttributeName::InWoodland => self.in_woodland,
            AttributeName::InUrban => self.in_urban,
        }
    }
}

pub fn compute_attributes(
    route: &RoutePolyline,
    layers: &ContextLayers,
    grid: &ElevationGrid,
    places: &[NamedPlace],
    params: &AttributeParams,
) -> Result<RouteAttributes, GeoError> {
    let length_m = route_length(route)?;
    let profile = elevation_profile(route, grid, params.step)?;
    let (total_gain, total_loss) = elevation_gain_loss(&profile)?;
    let grade = compute_grade(total_gain, length_m)?;
    let circular = is_circular(route, params.circular_threshold);
    let out_and_back = is_out_and_back(
        route,
        params.circular_threshold,
        params.out_and_back_buffer,
        params.out_and_back_raster,
        params.out_and_back_max_ratio,
    )?;
    let along_coast = layers.percent(route, LayerClass::Coastline, params.coast_buffer, params.step)?;
    Ok(RouteAttributes {
        route_id: route.id().to_string(),
        length_m,
        total_gain,
        total_loss,
        grade,
        is_circular: circular,
        is_out_and_back: out_and_back,
        start_place: nearest_place(route.first(), places),
        end_place: nearest_place(route.last(), places),
        along_surfacewater: layers.percent(
            route,
            LayerClass::SurfaceWater,
            params.water_buffer,
            params.step,
        )?,
        along_coast,
        is_coastal: along_coast >= params.coastal_min_percent,
        in_national_parks: layers.percent(route, LayerClass::NationalPark, 0.0, params.step)?,
        in_greenspace: layers.percent(route, LayerClass::Greenspace, 0.0, params.step)?,
        in_woodland: layers.percent(route, LayerClass::Woodland, 0.0, params.step)?,
        in_urban: layers.percent(route, LayerClass::Urban, 0.0, params.step)?,
    })
}

/// [`compute_attributes`] over many routes; output order follows `routes`.
pub fn compute_attributes_batch(
    routes: &[RoutePolyline],
    layers: &ContextLayers,
    grid: &ElevationGrid,
    places: &[NamedPlace],
    params: &AttributeParams,
    exec: Execution,
) -> Vec<Result<RouteAttributes, GeoError>> {
    exec.map(routes, |r| compute_attributes(r, layers, grid, places, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{Geometry, Point2D};

    #[test]
    fn urban_flat_route() {
        let ring = vec![
            Point2D::new(-1000., -1000.),
            Point2D::new(5000., -1000.),
            Point2D::new(5000., 1000.),
            Point2D::new(-1000., 1000.),
            Point2D::new(-1000., -1000.),
        ];
        let layers: ContextLayers =
            [FeatureLayer::new(LayerClass::Urban, vec![Geometry::Polygon(ring)]).unwrap()]
                .into_iter()
                .collect();
        let grid = ElevationGrid::from_fn(Point2D::new(-2000., -2000.), 100.0, 80, 40, |_| 12.0).unwrap();
        let route = RoutePolyline::new(
            "u",
            vec![Point2D::new(0., 0.), Point2D::new(2000., 0.), Point2D::new(2000., 300.)],
        )
        .unwrap();
        let a = compute_attributes(&route, &layers, &grid, &[], &AttributeParams::default()).unwrap();
        assert_eq!(a.in_urban, 100.0);
        assert_eq!(a.total_gain, 0.0);
        assert_eq!(a.grade, 0.0);
        assert_eq!(a.length_m, 2300.0);
        assert!(!a.is_circular && !a.is_out_and_back && !a.is_coastal);
        assert_eq!(a.in_woodland, 0.0);
        assert_eq!(a.start_place, None);
    }

    #[test]
    fn attribute_names_round_trip() {
        for a in AttributeName::ALL {
            assert_eq!(AttributeName::parse(a.as_str()), Some(a));
        }
        assert_eq!(AttributeName::parse("start_place"), None);
    }
}
