use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{GeoError, Point2D};

/// Raster elevation model in ESRI ASCII layout.
///
/// `values` is row-major with row 0 the northernmost row, matching the file
/// format. Cell `(col, row)` has its centre at
/// `(origin.e + (col + 0.5) * cell, origin.n + (n_rows - row - 0.5) * cell)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationGrid {
    origin: Point2D,
    cell_size: f64,
    n_cols: usize,
    n_rows: usize,
    values: Vec<f64>,
    nodata: f64,
}

impl ElevationGrid {
    pub fn new(
        origin: Point2D,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        values: Vec<f64>,
        nodata: f64,
    ) -> Result<Self, GeoError> {
        if !origin.is_finite() {
            return Err(GeoError::NonFiniteCoordinate);
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(GeoError::InvalidGrid(format!("cell size {cell_size} must be positive")));
        }
        if n_cols == 0 || n_rows == 0 {
            return Err(GeoError::InvalidGrid("grid needs at least one row and column".into()));
        }
        if values.len() != n_cols * n_rows {
            return Err(GeoError::InvalidGrid(format!(
                "expected {} values, got {}",
                n_cols * n_rows,
                values.len()
            )));
        }
        Ok(Self { origin, cell_size, n_cols, n_rows, values, nodata })
    }

    /// Builds a grid by evaluating `f` at every cell centre.
    pub fn from_fn(
        origin: Point2D,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        f: impl Fn(Point2D) -> f64,
    ) -> Result<Self, GeoError> {
        let mut values = Vec::with_capacity(n_cols * n_rows);
        for row in 0..n_rows {
            for col in 0..n_cols {
                values.push(f(Point2D::new(
                    origin.easting + (col as f64 + 0.5) * cell_size,
                    origin.northing + ((n_rows - row) as f64 - 0.5) * cell_size,
                )));
            }
        }
        Self::new(origin, cell_size, n_cols, n_rows, values, -9999.0)
    }

    pub fn origin(&self) -> Point2D {
        self.origin
    }
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point2D {
        Point2D::new(
            self.origin.easting + (col as f64 + 0.5) * self.cell_size,
            self.origin.northing + ((self.n_rows - row) as f64 - 0.5) * self.cell_size,
        )
    }

    pub fn with_origin(&self, origin: Point2D) -> ElevationGrid {
        ElevationGrid { origin, ..self.clone() }
    }

    pub fn with_geometry(&self, origin: Point2D, cell_size: f64) -> Result<ElevationGrid, GeoError> {
        Self::new(origin, cell_size, self.n_cols, self.n_rows, self.values.clone(), self.nodata)
    }

    pub fn contains(&self, p: Point2D) -> bool {
        let max_e = self.origin.easting + self.n_cols as f64 * self.cell_size;
        let max_n = self.origin.northing + self.n_rows as f64 * self.cell_size;
        p.easting >= self.origin.easting
            && p.easting <= max_e
            && p.northing >= self.origin.northing
            && p.northing <= max_n
    }

    /// Parses the ESRI ASCII grid format. Header keys are case-insensitive;
    /// `xllcenter`/`yllcenter` are converted to corner coordinates.
    pub fn read_esri_ascii<R: BufRead>(reader: R) -> Result<Self, GeoError> {
        let mut ncols = None;
        let mut nrows = None;
        let mut xll = None;
        let mut yll = None;
        let mut centered = (false, false);
        let mut cellsize = None;
        let mut nodata = -9999.0;
        let mut values = Vec::new();

        let bad = |msg: String| GeoError::InvalidGrid(msg);
        for line in reader.lines() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let starts_alpha = trimmed.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
            if starts_alpha && values.is_empty() {
                let mut parts = trimmed.split_whitespace();
                let key = parts.next().unwrap_or_default().to_ascii_lowercase();
                let val = parts.next().ok_or_else(|| bad(format!("header {key} has no value")))?;
                let num: f64 = val.parse().map_err(|_| bad(format!("bad header value {val:?}")))?;
                match key.as_str() {
                    "ncols" => ncols = Some(num as usize),
                    "nrows" => nrows = Some(num as usize),
                    "xllcorner" => xll = Some(num),
                    "yllcorner" => yll = Some(num),
                    "xllcenter" => {
                        xll = Some(num);
                        centered.0 = true;
                    }
                    "yllcenter" => {
                        yll = Some(num);
                        centered.1 = true;
                    }
                    "cellsize" => cellsize = Some(num),
                    "nodata_value" => nodata = num,
                    other => return Err(bad(format!("unknown header key {other:?}"))),
                }
                continue;
            }
            for tok in trimmed.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|_| bad(format!("bad value {tok:?}")))?);
            }
        }
        let ncols = ncols.ok_or_else(|| bad("missing ncols".into()))?;
        let nrows = nrows.ok_or_else(|| bad("missing nrows".into()))?;
        let cellsize = cellsize.ok_or_else(|| bad("missing cellsize".into()))?;
        let mut xll = xll.ok_or_else(|| bad("missing xllcorner".into()))?;
        let mut yll = yll.ok_or_else(|| bad("missing yllcorner".into()))?;
        if centered.0 {
            xll -= cellsize / 2.0;
        }
        if centered.1 {
            yll -= cellsize / 2.0;
        }
        Self::new(Point2D::new(xll, yll), cellsize, ncols, nrows, values, nodata)
    }

    pub fn write_esri_ascii<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "ncols {}", self.n_cols)?;
        writeln!(w, "nrows {}", self.n_rows)?;
        writeln!(w, "xllcorner {}", self.origin.easting)?;
        writeln!(w, "yllcorner {}", self.origin.northing)?;
        writeln!(w, "cellsize {}", self.cell_size)?;
        writeln!(w, "NODATA_value {}", self.nodata)?;
        let mut line = String::new();
        for row in self.values.chunks(self.n_cols) {
            line.clear();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                let _ = write!(line, "{v}");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Bilinear interpolation between the four cell centres around `p`.
///
/// Points in the half-cell margin between the outermost centres and the grid
/// edge are clamped to the edge centres. Only cells with non-zero weight must
/// hold data.
pub fn sample_elevation(grid: &ElevationGrid, p: Point2D) -> Result<f64, GeoError> {
    if !p.is_finite() || !grid.contains(p) {
        return Err(GeoError::OutOfExtent { easting: p.easting, northing: p.northing });
    }
    let fx = ((p.easting - grid.origin.easting) / grid.cell_size - 0.5)
        .clamp(0.0, (grid.n_cols - 1) as f64);
    // measured from the southern row of centres
    let fy = ((p.northing - grid.origin.northing) / grid.cell_size - 0.5)
        .clamp(0.0, (grid.n_rows - 1) as f64);

    let c0 = (fx.floor() as usize).min(grid.n_cols.saturating_sub(2));
    let s0 = (fy.floor() as usize).min(grid.n_rows.saturating_sub(2));
    let tx = fx - c0 as f64;
    let ty = fy - s0 as f64;
    let c1 = (c0 + 1).min(grid.n_cols - 1);
    let s1 = (s0 + 1).min(grid.n_rows - 1);

    let corners = [
        (c0, s0, (1.0 - tx) * (1.0 - ty)),
        (c1, s0, tx * (1.0 - ty)),
        (c0, s1, (1.0 - tx) * ty),
        (c1, s1, tx * ty),
    ];
    let mut z = 0.0;
    for (col, south, w) in corners {
        if w == 0.0 {
            continue;
        }
        let row = grid.n_rows - 1 - south;
        let v = grid.value(col, row);
        if v == grid.nodata || !v.is_finite() {
            return Err(GeoError::NoDataCell { col, row });
        }
        z += w * v;
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(values: Vec<f64>, n_cols: usize, n_rows: usize) -> ElevationGrid {
        ElevationGrid::new(Point2D::new(0.0, 0.0), 10.0, n_cols, n_rows, values, -9999.0).unwrap()
    }

    #[test]
    fn constant_grid() {
        let g = grid(vec![50.0; 12], 4, 3);
        for p in [(0.0, 0.0), (13.3, 27.1), (40.0, 30.0), (25.0, 5.0)] {
            assert_eq!(sample_elevation(&g, p.into()).unwrap(), 50.0);
        }
    }

    #[test]
    fn cell_centre_identity() {
        let values: Vec<f64> = (0..12).map(|v| v as f64 * 3.5).collect();
        let g = grid(values, 4, 3);
        for row in 0..3 {
            for col in 0..4 {
                let c = g.cell_center(col, row);
                assert_eq!(sample_elevation(&g, c).unwrap(), g.value(col, row));
            }
        }
    }

    #[test]
    fn midpoint_between_centres() {
        let g = grid(vec![10.0, 20.0], 2, 1);
        assert_eq!(sample_elevation(&g, Point2D::new(10.0, 5.0)).unwrap(), 15.0);
    }

    #[test]
    fn out_of_extent_and_nodata() {
        let g = grid(vec![10.0, -9999.0, 30.0, 40.0], 2, 2);
        assert!(matches!(
            sample_elevation(&g, Point2D::new(-0.1, 5.0)),
            Err(GeoError::OutOfExtent { .. })
        ));
        assert!(matches!(
            sample_elevation(&g, Point2D::new(10.0, 10.0)),
            Err(GeoError::NoDataCell { col: 1, row: 0 })
        ));
        // exactly on the centre of a valid cell the no-data neighbour has zero weight
        assert_eq!(sample_elevation(&g, Point2D::new(5.0, 15.0)).unwrap(), 10.0);
    }

    #[test]
    fn invalid_grids_rejected() {
        let o = Point2D::new(0.0, 0.0);
        assert!(ElevationGrid::new(o, 0.0, 1, 1, vec![1.0], -1.0).is_err());
        assert!(ElevationGrid::new(o, 1.0, 0, 1, vec![], -1.0).is_err());
        assert!(ElevationGrid::new(o, 1.0, 2, 2, vec![1.0; 3], -1.0).is_err());
    }

    #[test]
    fn esri_round_trip() {
        let g = ElevationGrid::from_fn(Point2D::new(-500.0, 250.0), 25.0, 5, 3, |p| {
            p.easting * 0.1 + p.northing * 0.01
        })
        .unwrap();
        let mut buf = Vec::new();
        g.write_esri_ascii(&mut buf).unwrap();
        let back = ElevationGrid::read_esri_ascii(&buf[..]).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn esri_center_header() {
        let text = "NCOLS 2\nNROWS 1\nXLLCENTER 5\nYLLCENTER 5\nCELLSIZE 10\n1 2\n";
        let g = ElevationGrid::read_esri_ascii(text.as_bytes()).unwrap();
        assert_eq!(g.origin(), Point2D::new(0.0, 0.0));
        assert_eq!(g.nodata(), -9999.0);
        let short = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n";
        assert!(ElevationGrid::read_esri_ascii(short.as_bytes()).is_err());
    }
}
