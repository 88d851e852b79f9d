use super::world::{Band, LineFeature, BAND_HEIGHT};
use crate::geo::Point2D;

/// Axis-aligned polyline vertices, before subdivision.
pub(crate) type Path = Vec<(f64, f64)>;

/// Continuous per-class length along a path, computed by interval
/// arithmetic on axis-aligned segments.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Coverage {
    pub length: f64,
    /// Same order as the world's area classes.
    pub areas: [f64; 4],
    pub coast: f64,
    pub water: f64,
}

impl Coverage {
    pub fn percent(&self, inside: f64) -> f64 {
        100.0 * inside / self.length
    }
}

fn merged_overlap(mut iv: Vec<(f64, f64)>, lo: f64, hi: f64) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        let (a, b) = (a.max(lo), b.min(hi));
        if b <= a {
            continue;
        }
        match cur {
            Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((ca, cb)) = cur {
        total += cb - ca;
    }
    total
}

/// Length of an axis-aligned segment lying within `buffer` of any of the
/// horizontal line features.
fn line_buffer_length(a: (f64, f64), b: (f64, f64), lines: &[LineFeature], buffer: f64) -> f64 {
    let mut iv = Vec::new();
    if a.1 == b.1 {
        for l in lines {
            let d = (a.1 - l.y).abs();
            if d <= buffer {
                let r = (buffer * buffer - d * d).sqrt();
                iv.push((l.x0 - r, l.x1 + r));
            }
        }
        merged_overlap(iv, a.0.min(b.0), a.0.max(b.0))
    } else {
        debug_assert_eq!(a.0, b.0);
        let x = a.0;
        for l in lines {
            let dx = (l.x0 - x).max(x - l.x1).max(0.0);
            if dx <= buffer {
                let r = (buffer * buffer - dx * dx).sqrt();
                iv.push((l.y - r, l.y + r));
            }
        }
        merged_overlap(iv, a.1.min(b.1), a.1.max(b.1))
    }
}

fn area_length(a: (f64, f64), b: (f64, f64), band: &Band, intervals: &[(f64, f64)]) -> f64 {
    let (y0, y1) = (band.y0, band.y0 + BAND_HEIGHT);
    if a.1 == b.1 {
        if a.1 < y0 || a.1 > y1 {
            return 0.0;
        }
        merged_overlap(intervals.to_vec(), a.0.min(b.0), a.0.max(b.0))
    } else if intervals.iter().any(|&(lo, hi)| a.0 > lo && a.0 < hi) {
        merged_overlap(vec![(y0, y1)], a.1.min(b.1), a.1.max(b.1))
    } else {
        0.0
    }
}

pub(crate) fn coverage(path: &Path, band: &Band, water_buffer: f64, coast_buffer: f64) -> Coverage {
    let mut c = Coverage::default();
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        c.length += (b.0 - a.0).abs() + (b.1 - a.1).abs();
        for (k, iv) in band.areas.iter().enumerate() {
            c.areas[k] += area_length(a, b, band, iv);
        }
        c.coast += line_buffer_length(a, b, &band.coast, coast_buffer);
        c.water += line_buffer_length(a, b, &band.water, water_buffer);
    }
    c
}

/// x positions on a leg at `y` where membership of some class changes.
pub(crate) fn zone_boundaries(band: &Band, y: f64, water_buffer: f64, coast_buffer: f64) -> Vec<f64> {
    let mut out: Vec<f64> = band.areas.iter().flatten().flat_map(|&(a, b)| [a, b]).collect();
    for (lines, buf) in [(&band.coast, coast_buffer), (&band.water, water_buffer)] {
        for l in lines.iter() {
            let d = (y - l.y).abs();
            if d <= buf {
                let r = (buf * buf - d * d).sqrt();
                out.push(l.x0 - r);
                out.push(l.x1 + r);
            }
        }
    }
    out
}

/// Splits every segment into pieces of at most `max_len` metres.
pub(crate) fn subdivide(path: &Path, max_len: f64) -> Vec<Point2D> {
    let mut out = vec![Point2D::new(path[0].0, path[0].1)];
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b.0 - a.0).abs() + (b.1 - a.1).abs();
        let (ux, uy) = ((b.0 - a.0) / len, (b.1 - a.1) / len);
        let mut s = max_len;
        while s < len {
            out.push(Point2D::new(a.0 + ux * s, a.1 + uy * s));
            s += max_len;
        }
        out.push(Point2D::new(b.0, b.1));
    }
    out
}
