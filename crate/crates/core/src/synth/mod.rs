//! Deterministic synthetic corpora with known attributes.
//!
//! The world is a stack of 1 km east-west bands. Area classes (national
//! park, green space, woodland, urban) are full-height blocks inside a band,
//! coastlines run along a band's centre line and rivers along one of the two
//! leg lines 90 m either side of it. Every route stays inside one band and
//! is built from axis-aligned legs on those leg lines, so the length of
//! route inside each class is an exact interval computation. Leg ends sit on
//! a 10 m lattice and zone edges at 5 mod 10, which keeps sampled
//! percentages within a point of the continuous truth.

mod shape;
mod world;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::geo::io::{write_layer, write_places, write_routes, GeoIoError};
use crate::geo::{
    AttributeName, ContextLayers, ElevationGrid, FeatureLayer, GeoError, Geometry, LayerClass,
    NamedPlace, Point2D, RoutePolyline,
};
use crate::rng::{stream, unit_f64, StreamRng};
use crate::Execution;
use shape::{coverage, subdivide, zone_boundaries, Coverage, Path as LegPath};
use world::{build_places, build_world, Band, LineFeature, World, BAND_HEIGHT, LEG_OFFSET};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSpec(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    GeoIo(#[from] GeoIoError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LengthSpec {
    pub mean_m: f64,
    /// Log-space standard deviation before truncation.
    pub sigma: f64,
    pub min_m: f64,
    pub max_m: f64,
}

impl Default for LengthSpec {
    fn default() -> Self {
        Self { mean_m: 11_289.0, sigma: 0.6, min_m: 1_100.0, max_m: 49_000.0 }
    }
}

/// Fraction of each band's width occupied by a class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverageSpec {
    pub national_park: f64,
    pub greenspace: f64,
    pub woodland: f64,
    pub urban: f64,
    pub coastline: f64,
    pub surface_water: f64,
}

impl Default for CoverageSpec {
    fn default() -> Self {
        Self {
            national_park: 0.12,
            greenspace: 0.15,
            woodland: 0.25,
            urban: 0.15,
            coastline: 0.2,
            surface_water: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerrainSpec {
    pub base_elevation: f64,
    /// Peak east-west slope of the regional ramp, m per m.
    pub ramp_slope: f64,
    pub bump_count: usize,
    /// Bumps get a uniform amplitude in `[-a, a]`.
    pub bump_amplitude: f64,
    pub bump_sigma: f64,
}

impl Default for TerrainSpec {
    fn default() -> Self {
        Self { base_elevation: 150.0, ramp_slope: 0.004, bump_count: 120, bump_amplitude: 150.0, bump_sigma: 1500.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_routes: usize,
    pub length: LengthSpec,
    /// Loops plus out-and-back routes.
    pub circular_fraction: f64,
    pub out_and_back_fraction: f64,
    /// Routes placed to run at least half their length along a coast.
    pub coastal_fraction: f64,
    /// Routes with |gain - loss| >= 100 m.
    pub predominant_fraction: f64,
    pub coverage: CoverageSpec,
    pub terrain: TerrainSpec,
    pub bands: usize,
    pub n_places: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            n_routes: 1000,
            length: LengthSpec::default(),
            circular_fraction: 0.55,
            out_and_back_fraction: 0.15,
            coastal_fraction: 0.08,
            predominant_fraction: 0.08,
            coverage: CoverageSpec::default(),
            terrain: TerrainSpec::default(),
            bands: 16,
            n_places: 400,
        }
    }
}

impl SynthSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_routes(mut self, n: usize) -> Self {
        self.n_routes = n;
        self
    }

    pub(crate) fn world_width(&self) -> f64 {
        (self.length.max_m + 2_000.0).max(10_000.0)
    }

    fn open_fraction(&self) -> f64 {
        1.0 - self.circular_fraction
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InfeasibleSpec(m));
        let l = &self.length;
        if !(l.min_m > 1_000.0 && l.min_m < l.mean_m && l.mean_m < l.max_m && l.max_m < 50_000.0) {
            return bad(format!(
                "need 1000 < min ({}) < mean ({}) < max ({}) < 50000",
                l.min_m, l.mean_m, l.max_m
            ));
        }
        if !(l.sigma.is_finite() && l.sigma > 0.0) {
            return bad("length sigma must be positive".into());
        }
        let c = &self.coverage;
        let fractions = [
            ("circular_fraction", self.circular_fraction),
            ("out_and_back_fraction", self.out_and_back_fraction),
            ("coastal_fraction", self.coastal_fraction),
            ("predominant_fraction", self.predominant_fraction),
            ("coverage.national_park", c.national_park),
            ("coverage.greenspace", c.greenspace),
            ("coverage.woodland", c.woodland),
            ("coverage.urban", c.urban),
            ("coverage.coastline", c.coastline),
            ("coverage.surface_water", c.surface_water),
        ];
        for (name, f) in fractions {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("{name} = {f} is not in [0, 1]"));
            }
        }
        if self.out_and_back_fraction > self.circular_fraction {
            return bad("out-and-back routes are circular, so their fraction cannot exceed circular_fraction".into());
        }
        if self.predominant_fraction > self.open_fraction() + 1e-12 {
            return bad(format!(
                "only non-circular routes can climb or descend overall; {} predominant > {} open",
                self.predominant_fraction,
                self.open_fraction()
            ));
        }
        if self.coastal_fraction > 0.0 && c.coastline == 0.0 {
            return bad("coastal routes requested but coastline coverage is zero".into());
        }
        if self.bands == 0 {
            return bad("at least one band is required".into());
        }
        let t = &self.terrain;
        if ![t.base_elevation, t.ramp_slope, t.bump_amplitude, t.bump_sigma].iter().all(|v| v.is_finite())
            || t.bump_sigma <= 0.0
        {
            return bad("terrain parameters must be finite with positive bump sigma".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteFamily {
    Loop,
    OutAndBack,
    Open,
}

/// Attribute values known from construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub route_id: String,
    pub family: RouteFamily,
    pub length_m: f64,
    pub is_circular: bool,
    pub is_out_and_back: bool,
    pub along_surfacewater: f64,
    pub along_coast: f64,
    pub is_coastal: bool,
    pub in_national_parks: f64,
    pub in_greenspace: f64,
    pub in_woodland: f64,
    pub in_urban: f64,
    /// Terrain height at the end minus at the start.
    pub net_elevation: f64,
    pub predominant: bool,
}

impl GroundTruth {
    /// Known value of `name`; `None` for the elevation-derived attributes,
    /// which depend on the sampled profile.
    pub fn value(&self, name: AttributeName) -> Option<f64> {
        let b = |v: bool| if v { 1.0 } else { 0.0 };
        Some(match name {
            AttributeName::LengthM => self.length_m,
            AttributeName::IsCircular => b(self.is_circular),
            AttributeName::IsOutAndBack => b(self.is_out_and_back),
            AttributeName::AlongSurfacewater => self.along_surfacewater,
            AttributeName::AlongCoast => self.along_coast,
            AttributeName::IsCoastal => b(self.is_coastal),
            AttributeName::InNationalParks => self.in_national_parks,
            AttributeName::InGreenspace => self.in_greenspace,
            AttributeName::InWoodland => self.in_woodland,
            AttributeName::InUrban => self.in_urban,
            AttributeName::TotalGain | AttributeName::TotalLoss | AttributeName::Grade => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub routes: Vec<RoutePolyline>,
    pub layers: ContextLayers,
    pub grid: ElevationGrid,
    pub places: Vec<NamedPlace>,
    pub truth: Vec<GroundTruth>,
}

/// Log-normal truncated to `[min, max]` with its location solved so the
/// truncated mean equals the requested mean.
#[derive(Debug, Clone)]
pub struct LengthModel {
    mu: f64,
    sigma: f64,
    p_lo: f64,
    p_hi: f64,
}

impl LengthModel {
    pub fn new(spec: &LengthSpec) -> Self {
        let sigma = spec.sigma;
        let (la, lb) = (spec.min_m.ln(), spec.max_m.ln());
        let (mut lo, mut hi) = (la - 10.0 * sigma, lb + 10.0 * sigma);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if truncated_mean(mid, sigma, la, lb) < spec.mean_m {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu = 0.5 * (lo + hi);
        let n = std_normal();
        Self { mu, sigma, p_lo: n.cdf((la - mu) / sigma), p_hi: n.cdf((lb - mu) / sigma) }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mean(&self) -> f64 {
        let n = std_normal();
        let (a, b) = (n.inverse_cdf(self.p_lo), n.inverse_cdf(self.p_hi));
        truncated_mean(self.mu, self.sigma, self.mu + self.sigma * a, self.mu + self.sigma * b)
    }

    /// Inverse-CDF draw, in metres.
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        let p = self.p_lo + unit_f64(rng) * (self.p_hi - self.p_lo);
        let z = std_normal().inverse_cdf(p.clamp(1e-300, 1.0 - 1e-16));
        (self.mu + self.sigma * z).exp()
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid normal")
}

fn truncated_mean(mu: f64, sigma: f64, la: f64, lb: f64) -> f64 {
    let n = std_normal();
    let (a, b) = ((la - mu) / sigma, (lb - mu) / sigma);
    let mass = n.cdf(b) - n.cdf(a);
    if mass <= 0.0 {
        // all mass beyond one bound
        return if a > 0.0 { la.exp() } else { lb.exp() };
    }
    (mu + sigma * sigma / 2.0).exp() * (n.cdf(b - sigma) - n.cdf(a - sigma)) / mass
}

fn round10(v: f64) -> f64 {
    (v / 10.0).round() * 10.0
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Loop { leg: f64 },
    OutAndBack { leg: f64, excursions: usize },
    Open { first: f64, second: f64, hairpin: bool },
}

impl Shape {
    fn family(&self) -> RouteFamily {
        match self {
            Shape::Loop { .. } => RouteFamily::Loop,
            Shape::OutAndBack { .. } => RouteFamily::OutAndBack,
            Shape::Open { .. } => RouteFamily::Open,
        }
    }

    /// East-west extent of the route.
    fn extent(&self) -> f64 {
        match *self {
            Shape::Loop { leg } | Shape::OutAndBack { leg, .. } => leg,
            Shape::Open { first, second, hairpin } => {
                if hairpin {
                    first
                } else {
                    first + second
                }
            }
        }
    }
}

const CONNECTOR: f64 = 2.0 * LEG_OFFSET;
const EXCURSION_MARGIN: f64 = 20.0;
const SOFT_ATTEMPTS: usize = 200;
const HARD_ATTEMPTS: usize = 5_000;

fn draw_shape(spec: &SynthSpec, rng: &mut StreamRng, target: f64) -> Shape {
    let u = unit_f64(rng);
    if u < spec.out_and_back_fraction {
        let excursions = if target >= 2_400.0 {
            4
        } else if target >= 1_600.0 {
            2
        } else {
            1
        };
        let leg = round10((target - 10.0 * excursions as f64) / 2.0).max(510.0);
        Shape::OutAndBack { leg, excursions }
    } else if u < spec.circular_fraction {
        Shape::Loop { leg: round10((target - 2.0 * CONNECTOR) / 2.0).max(330.0) }
    } else {
        let rest = (target - CONNECTOR).max(840.0);
        let hairpin = rest >= 2_000.0 && unit_f64(rng) < 0.4;
        let t = if hairpin { 0.65 + 0.2 * unit_f64(rng) } else { 0.2 + 0.6 * unit_f64(rng) };
        let first = round10(rest * t);
        Shape::Open { first, second: round10(rest) - first, hairpin }
    }
}

struct Plan {
    band: usize,
    path: LegPath,
}

fn connector_clear(band: &Band, x: f64) -> bool {
    let water_ok = band.water.iter().all(|w| x < w.x0 - 60.0 || x > w.x1 + 60.0);
    let coast_ok = band.coast.iter().all(|c| {
        let dx = (c.x0 - x).max(x - c.x1).max(0.0);
        !(110.0..=160.0).contains(&dx)
    });
    water_ok && coast_ok
}

fn place_excursions(
    rng: &mut StreamRng,
    band: &Band,
    y: f64,
    x0: f64,
    leg: f64,
    n: usize,
) -> Option<Vec<(f64, f64, f64, f64)>> {
    let bounds = zone_boundaries(band, y, 50.0, 150.0);
    let mut out: Vec<(f64, f64, f64, f64)> = Vec::new();
    for _ in 0..n {
        let mut placed = false;
        for _ in 0..60 {
            let r1 = 20.0 + 10.0 * (unit_f64(rng) * 5.0).floor();
            let r2 = 20.0 + 10.0 * (unit_f64(rng) * 5.0).floor();
            let k = 1.0 + (unit_f64(rng) * 4.0).floor();
            let lo_allowed = x0 + 30.0 + r1 + r2;
            let hi_allowed = x0 + leg - 30.0;
            if hi_allowed <= lo_allowed {
                return None;
            }
            let xa = round10(lo_allowed + unit_f64(rng) * (hi_allowed - lo_allowed)).clamp(lo_allowed, hi_allowed);
            let (w0, w1) = (xa - r1 - r2 - EXCURSION_MARGIN, xa + EXCURSION_MARGIN);
            if bounds.iter().any(|&b| b >= w0 && b <= w1) {
                continue;
            }
            if out.iter().any(|&(oa, or1, or2, _)| w0 <= oa + EXCURSION_MARGIN && oa - or1 - or2 - EXCURSION_MARGIN <= w1) {
                continue;
            }
            out.push((xa, r1, r2, k));
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    Some(out)
}

fn propose(world: &World, shape: Shape, want_coastal: bool, rng: &mut StreamRng, attempt: usize) -> Option<Plan> {
    let coast_bands: Vec<usize> = (0..world.bands.len()).filter(|&i| !world.bands[i].coast.is_empty()).collect();
    let extent = shape.extent();
    let lo = 200.0;
    let hi = world.width - 200.0 - extent;
    if hi < lo {
        return None;
    }
    let (band_idx, x0) = if want_coastal && !coast_bands.is_empty() && attempt % 4 != 3 {
        let b = coast_bands[(unit_f64(rng) * coast_bands.len() as f64) as usize];
        let feats = &world.bands[b].coast;
        let f = &feats[(unit_f64(rng) * feats.len() as f64) as usize];
        let a = f.x0 - 120.0 - 0.3 * extent;
        let z = f.x1 + 120.0 - 0.7 * extent;
        let x = if z > a { a + unit_f64(rng) * (z - a) } else { 0.5 * (a + z) };
        (b, x.clamp(lo, hi))
    } else {
        ((unit_f64(rng) * world.bands.len() as f64) as usize, lo + unit_f64(rng) * (hi - lo))
    };
    let x0 = round10(x0);
    let band = &world.bands[band_idx];
    let yc = band.y0 + BAND_HEIGHT / 2.0;
    let s = if unit_f64(rng) < 0.5 { 1.0 } else { -1.0 };
    let (ya, yb) = (yc + s * LEG_OFFSET, yc - s * LEG_OFFSET);

    let path = match shape {
        Shape::Loop { leg } => {
            if !connector_clear(band, x0) || !connector_clear(band, x0 + leg) {
                return None;
            }
            vec![(x0, ya), (x0 + leg, ya), (x0 + leg, yb), (x0, yb), (x0, ya)]
        }
        Shape::Open { first, second, hairpin } => {
            if !connector_clear(band, x0 + first) {
                return None;
            }
            let end = if hairpin { x0 + first - second } else { x0 + first + second };
            vec![(x0, ya), (x0 + first, ya), (x0 + first, yb), (end, yb)]
        }
        Shape::OutAndBack { leg, excursions } => {
            let exc = place_excursions(rng, band, ya, x0, leg, excursions)?;
            // jitter on the north or south side of the outbound leg
            let side = if unit_f64(rng) < 0.5 { 1.0 } else { -1.0 };
            let mut p = vec![(x0, ya), (x0 + leg, ya)];
            for (xa, r1, r2, k) in exc {
                p.push((xa, ya));
                p.push((xa, ya + side * k));
                p.push((xa - r1, ya + side * k));
                p.push((xa - r1, ya + side * (k - 5.0)));
                p.push((xa - r1 - r2, ya + side * (k - 5.0)));
                p.push((xa - r1 - r2, ya));
            }
            p.push((x0, ya));
            p
        }
    };
    Some(Plan { band: band_idx, path })
}

fn truth_from(id: &str, family: RouteFamily, cov: &Coverage, net: f64) -> GroundTruth {
    let pct = |v: f64| cov.percent(v);
    let along_coast = pct(cov.coast);
    GroundTruth {
        route_id: id.to_string(),
        family,
        length_m: cov.length,
        is_circular: family != RouteFamily::Open,
        is_out_and_back: family == RouteFamily::OutAndBack,
        along_surfacewater: pct(cov.water),
        along_coast,
        is_coastal: along_coast >= 50.0,
        in_national_parks: pct(cov.areas[0]),
        in_greenspace: pct(cov.areas[1]),
        in_woodland: pct(cov.areas[2]),
        in_urban: pct(cov.areas[3]),
        net_elevation: net,
        predominant: net.abs() >= 100.0,
    }
}

fn route_id(i: usize) -> String {
    format!("r{i:06}")
}

fn build_route(
    spec: &SynthSpec,
    world: &World,
    lengths: &LengthModel,
    i: usize,
) -> Result<(RoutePolyline, GroundTruth), SynthError> {
    let id = route_id(i);
    let mut rng = stream(spec.seed, &format!("route/{i}"));
    let target = lengths.sample(&mut rng);
    let shape = draw_shape(spec, &mut rng, target);
    let family = shape.family();
    let want_coastal = unit_f64(&mut rng) < spec.coastal_fraction;
    let open = spec.open_fraction();
    let want_pred = family == RouteFamily::Open && open > 0.0 && unit_f64(&mut rng) < spec.predominant_fraction / open;

    let mut fallback: Option<(Plan, Coverage, f64)> = None;
    for attempt in 0..HARD_ATTEMPTS {
        let Some(plan) = propose(world, shape, want_coastal, &mut rng, attempt) else {
            continue;
        };
        let cov = coverage(&plan.path, &world.bands[plan.band], 50.0, 150.0);
        let coast = cov.percent(cov.coast);
        // keep ground truth clear of the coastal cut-off
        if (48.0..=52.0).contains(&coast) {
            continue;
        }
        let (s, e) = (plan.path[0], *plan.path.last().expect("non-empty path"));
        let net = if family == RouteFamily::Open { world.terrain.z(e.0, e.1) - world.terrain.z(s.0, s.1) } else { 0.0 };
        let pred_ok = family != RouteFamily::Open || if want_pred { net.abs() >= 110.0 } else { net.abs() <= 90.0 };
        if (coast >= 50.0) == want_coastal && pred_ok {
            fallback = Some((plan, cov, net));
            break;
        }
        if fallback.is_none() {
            fallback = Some((plan, cov, net));
        }
        if attempt >= SOFT_ATTEMPTS && fallback.is_some() {
            break;
        }
    }
    let (plan, cov, net) = fallback.ok_or_else(|| {
        SynthError::InfeasibleSpec(format!("could not place route {id} of {:.0} m", shape.extent()))
    })?;
    let route = RoutePolyline::new(id.clone(), subdivide(&plan.path, 100.0))?;
    Ok((route, truth_from(&id, family, &cov, net)))
}

pub fn generate_corpus(spec: &SynthSpec) -> Result<SynthCorpus, SynthError> {
    generate_corpus_with(spec, Execution::default())
}

/// Builds the corpus. Each route draws from its own PRNG stream, so output is
/// identical under any execution strategy.
pub fn generate_corpus_with(spec: &SynthSpec, exec: Execution) -> Result<SynthCorpus, SynthError> {
    spec.validate()?;
    let world = build_world(spec);
    let layers = world.layers()?;
    let grid = world.grid()?;
    let places = build_places(spec, &world)?;
    let lengths = LengthModel::new(&spec.length);
    let built = exec.map_range(spec.n_routes, |i| build_route(spec, &world, &lengths, i));
    let mut routes = Vec::with_capacity(spec.n_routes);
    let mut truth = Vec::with_capacity(spec.n_routes);
    for r in built {
        let (route, t) = r?;
        routes.push(route);
        truth.push(t);
    }
    Ok(SynthCorpus { routes, layers, grid, places, truth })
}

/// One 10 km straight route running `percent`% of its length within 150 m
/// of a coastline, on flat terrain. `percent` must be in 3..=99.
pub fn coastal_fixture(percent: u32) -> Result<SynthCorpus, SynthError> {
    if !(3..=99).contains(&percent) {
        return Err(SynthError::InfeasibleSpec(format!("coastal percent {percent} outside 3..=99")));
    }
    let yc = BAND_HEIGHT / 2.0;
    let y = yc - LEG_OFFSET;
    // the buffer reaches 120 m past each end of the line at 90 m offset
    let line = LineFeature { x0: 125.0, x1: 100.0 * percent as f64 - 115.0, y: yc };
    let band = Band { y0: 0.0, areas: Default::default(), coast: vec![line.clone()], water: Vec::new() };
    let path: LegPath = vec![(0.0, y), (10_000.0, y)];
    let cov = coverage(&path, &band, 50.0, 150.0);
    let route = RoutePolyline::new("coastal", subdivide(&path, 100.0))?;
    let mut layers = ContextLayers::new();
    for class in LayerClass::ALL {
        layers.insert(FeatureLayer::empty(class));
    }
    layers.insert(FeatureLayer::new(
        LayerClass::Coastline,
        vec![Geometry::LineString(vec![Point2D::new(line.x0, line.y), Point2D::new(line.x1, line.y)])],
    )?);
    let grid = ElevationGrid::from_fn(Point2D::new(-500.0, -500.0), 100.0, 111, 20, |_| 100.0)?;
    Ok(SynthCorpus {
        routes: vec![route],
        layers,
        grid,
        places: vec![NamedPlace::new("Seaton, Devon", Point2D::new(0.0, y))?],
        truth: vec![truth_from("coastal", RouteFamily::Open, &cov, 0.0)],
    })
}

/// Where [`write_corpus`] put each artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFiles {
    pub routes: PathBuf,
    pub layers_dir: PathBuf,
    pub dem: PathBuf,
    pub places: PathBuf,
    pub truth: PathBuf,
}

impl CorpusFiles {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            routes: dir.join("routes.geojsonl"),
            layers_dir: dir.join("layers"),
            dem: dir.join("dem.asc"),
            places: dir.join("places.csv"),
            truth: dir.join("truth.csv"),
        }
    }
}

/// Writes the corpus in the regular ingestion formats under `dir`.
pub fn write_corpus(corpus: &SynthCorpus, dir: &Path) -> Result<CorpusFiles, SynthError> {
    let files = CorpusFiles::in_dir(dir);
    std::fs::create_dir_all(&files.layers_dir)?;
    write_routes(BufWriter::new(File::create(&files.routes)?), &corpus.routes)?;
    for layer in corpus.layers.iter() {
        let path = files.layers_dir.join(format!("{}.geojson", layer.class().as_str()));
        write_layer(BufWriter::new(File::create(path)?), layer)?;
    }
    corpus.grid.write_esri_ascii(BufWriter::new(File::create(&files.dem)?))?;
    write_places(BufWriter::new(File::create(&files.places)?), &corpus.places)?;
    let mut w = csv::Writer::from_path(&files.truth)?;
    for t in &corpus.truth {
        w.serialize(t)?;
    }
    w.flush()?;
    Ok(files)
}

pub fn read_truth(path: &Path) -> Result<Vec<GroundTruth>, SynthError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<_>, _>>()?)
}
