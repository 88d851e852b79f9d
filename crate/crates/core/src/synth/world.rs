use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{SynthError, SynthSpec};
use crate::geo::{
    ContextLayers, ElevationGrid, FeatureLayer, Geometry, LayerClass, NamedPlace, Point2D,
};
use crate::rng::{stream, unit_f64, StreamRng};

pub(crate) const BAND_HEIGHT: f64 = 1000.0;
/// Legs run this far north and south of a band's centre line.
pub(crate) const LEG_OFFSET: f64 = 90.0;
pub(crate) const CELL_SIZE: f64 = 100.0;

/// Polygon classes, stored as full-band-height x intervals.
pub(crate) const AREA_CLASSES: [LayerClass; 4] =
    [LayerClass::NationalPark, LayerClass::Greenspace, LayerClass::Woodland, LayerClass::Urban];

#[derive(Debug, Clone)]
pub(crate) struct LineFeature {
    pub x0: f64,
    pub x1: f64,
    pub y: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Band {
    pub y0: f64,
    pub areas: [Vec<(f64, f64)>; 4],
    pub coast: Vec<LineFeature>,
    pub water: Vec<LineFeature>,
}

#[derive(Debug, Clone)]
struct Bump {
    x: f64,
    y: f64,
    amplitude: f64,
    sigma: f64,
}

/// Smooth analytic terrain: a base level, an east-west ramp whose slope
/// varies with northing, and Gaussian hills and hollows.
#[derive(Debug, Clone)]
pub(crate) struct Terrain {
    base: f64,
    ramp: f64,
    ramp_period: f64,
    phase: f64,
    bumps: Vec<Bump>,
}

impl Terrain {
    pub fn z(&self, x: f64, y: f64) -> f64 {
        let slope = self.ramp * (std::f64::consts::TAU * y / self.ramp_period + self.phase).sin();
        let mut z = self.base + slope * x;
        for b in &self.bumps {
            let d2 = (x - b.x).powi(2) + (y - b.y).powi(2);
            let r = 2.0 * b.sigma * b.sigma;
            if d2 < 25.0 * r {
                z += b.amplitude * (-d2 / r).exp();
            }
        }
        z
    }
}

#[derive(Debug, Clone)]
pub(crate) struct World {
    pub width: f64,
    pub bands: Vec<Band>,
    pub terrain: Terrain,
}

/// Rounds to the nearest x with x mod 10 = 5, keeping boundaries off the
/// 10 m sample lattice.
pub(crate) fn snap5(v: f64) -> f64 {
    ((v - 5.0) / 10.0).round() * 10.0 + 5.0
}

fn intervals(
    rng: &mut StreamRng,
    width: f64,
    coverage: f64,
    mean_block: f64,
    min_gap: f64,
) -> Vec<(f64, f64)> {
    if coverage <= 0.0 {
        return Vec::new();
    }
    if coverage >= 0.999 {
        return vec![(-5.0, snap5(width) + 10.0)];
    }
    let block = Exp::new(1.0 / mean_block).expect("positive rate");
    let gap = Exp::new(coverage / (mean_block * (1.0 - coverage))).expect("positive rate");
    let mut out: Vec<(f64, f64)> = Vec::new();
    // random phase so bands do not all start with a gap of the same size
    let mut x = -unit_f64(rng) * mean_block;
    loop {
        let a = snap5((x + gap.sample(rng)).max(out.last().map_or(f64::MIN, |l| l.1 + min_gap)));
        if a >= width {
            break;
        }
        let b = snap5(a + block.sample(rng).max(100.0)).min(snap5(width) + 10.0);
        x = b;
        if b > 5.0 {
            out.push((a.max(-5.0), b));
        }
    }
    out
}

pub(crate) fn build_world(spec: &SynthSpec) -> World {
    let mut rng = stream(spec.seed, "world");
    let width = spec.world_width();
    let cov = &spec.coverage;
    let area_cov = [cov.national_park, cov.greenspace, cov.woodland, cov.urban];
    let bands = (0..spec.bands)
        .map(|i| {
            let y0 = i as f64 * BAND_HEIGHT;
            let yc = y0 + BAND_HEIGHT / 2.0;
            let areas = area_cov.map(|c| intervals(&mut rng, width, c, 2500.0, 10.0));
            let coast = intervals(&mut rng, width, cov.coastline, 4000.0, 400.0)
                .into_iter()
                .map(|(x0, x1)| LineFeature { x0, x1, y: yc })
                .collect();
            let water = intervals(&mut rng, width, cov.surface_water, 2000.0, 200.0)
                .into_iter()
                .map(|(x0, x1)| {
                    let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    LineFeature { x0, x1, y: yc + side * LEG_OFFSET }
                })
                .collect();
            Band { y0, areas, coast, water }
        })
        .collect();

    let t = &spec.terrain;
    let height = spec.bands as f64 * BAND_HEIGHT;
    let bumps = (0..t.bump_count)
        .map(|_| Bump {
            x: unit_f64(&mut rng) * width,
            y: unit_f64(&mut rng) * height,
            amplitude: (2.0 * unit_f64(&mut rng) - 1.0) * t.bump_amplitude,
            sigma: t.bump_sigma * (0.5 + unit_f64(&mut rng)),
        })
        .collect();
    let terrain = Terrain {
        base: t.base_elevation,
        ramp: t.ramp_slope,
        ramp_period: height * 1.7,
        phase: unit_f64(&mut rng) * std::f64::consts::TAU,
        bumps,
    };
    World { width, bands, terrain }
}

impl World {
    pub fn height(&self) -> f64 {
        self.bands.len() as f64 * BAND_HEIGHT
    }

    pub fn layers(&self) -> Result<ContextLayers, SynthError> {
        let mut layers = ContextLayers::new();
        for (k, class) in AREA_CLASSES.iter().enumerate() {
            let mut geoms = Vec::new();
            for band in &self.bands {
                for &(a, b) in &band.areas[k] {
                    let (y0, y1) = (band.y0, band.y0 + BAND_HEIGHT);
                    geoms.push(Geometry::Polygon(vec![
                        Point2D::new(a, y0),
                        Point2D::new(b, y0),
                        Point2D::new(b, y1),
                        Point2D::new(a, y1),
                        Point2D::new(a, y0),
                    ]));
                }
            }
            layers.insert(FeatureLayer::new(*class, geoms)?);
        }
        let lines = |f: &dyn Fn(&Band) -> &Vec<LineFeature>| -> Vec<Geometry> {
            self.bands
                .iter()
                .flat_map(|b| f(b).iter())
                .map(|l| Geometry::LineString(vec![Point2D::new(l.x0, l.y), Point2D::new(l.x1, l.y)]))
                .collect()
        };
        layers.insert(FeatureLayer::new(LayerClass::Coastline, lines(&|b| &b.coast))?);
        layers.insert(FeatureLayer::new(LayerClass::SurfaceWater, lines(&|b| &b.water))?);
        Ok(layers)
    }

    /// DEM with 100 m cells whose centres sit at 50 mod 100, covering the
    /// world with a 500 m margin.
    pub fn grid(&self) -> Result<ElevationGrid, SynthError> {
        let margin = 500.0;
        let n_cols = ((self.width + 2.0 * margin) / CELL_SIZE).ceil() as usize;
        let n_rows = ((self.height() + 2.0 * margin) / CELL_SIZE).ceil() as usize;
        Ok(ElevationGrid::from_fn(Point2D::new(-margin, -margin), CELL_SIZE, n_cols, n_rows, |p| {
            (self.terrain.z(p.easting, p.northing) * 100.0).round() / 100.0
        })?)
    }
}

const PREFIXES: [&str; 36] = [
    "Ash", "Brook", "Castle", "Chapel", "Church", "Clay", "Cold", "Crow", "Deer", "East", "Elm", "Fair",
    "Far", "Fox", "Glen", "Green", "Hazel", "High", "Holly", "Kings", "Lang", "Long", "Mill", "Moor",
    "New", "North", "Oak", "Old", "Red", "Rose", "Stone", "Thorn", "West", "White", "Wood", "Yew",
];
const SUFFIXES: [&str; 20] = [
    "ford", "ham", "ley", "ton", "wick", "by", "combe", "field", "bridge", "stead", "worth", "dale",
    "well", "hurst", "mouth", "bury", "thorpe", "holme", "side", "cote",
];
const COUNTIES: [&str; 12] = [
    "Somerset", "Dorset", "Highland", "Cumberland", "Devon", "Powys", "Fife", "Kent", "Norfolk",
    "Gwynedd", "Argyll", "Northumberland",
];

/// Uniformly scattered places with unique "Town, County" names.
pub(crate) fn build_places(spec: &SynthSpec, world: &World) -> Result<Vec<NamedPlace>, SynthError> {
    let pool = PREFIXES.len() * SUFFIXES.len() * COUNTIES.len();
    if spec.n_places > pool {
        return Err(SynthError::InfeasibleSpec(format!("at most {pool} distinct place names")));
    }
    let mut rng = stream(spec.seed, "places");
    let mut idx: Vec<usize> = (0..pool).collect();
    idx.shuffle(&mut rng);
    idx.truncate(spec.n_places);
    idx.into_iter()
        .map(|i| {
            let (p, rest) = (i % PREFIXES.len(), i / PREFIXES.len());
            let (s, c) = (rest % SUFFIXES.len(), rest / SUFFIXES.len());
            let name = format!("{}{}, {}", PREFIXES[p], SUFFIXES[s], COUNTIES[c]);
            let at = Point2D::new(
                (unit_f64(&mut rng) * world.width).round(),
                (unit_f64(&mut rng) * world.height()).round(),
            );
            Ok(NamedPlace::new(name, at)?)
        })
        .collect()
}
