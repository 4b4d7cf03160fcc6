//! Decision-region grids: rasterize a 2-D classifier over a lattice and
//! export the labels as CSV or a PPM image.
//!
//! The lattice covers `[x_min, x_max) × [y_min, y_max)` with square cells of
//! side `resolution`; each cell is classified at its center. Cell `(ix, iy)`
//! counts from the lower-left corner, rows stored bottom-up; the PPM writer
//! flips rows so images come out with y increasing upward.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::classifier::FittedClassifier;
use crate::dataset::LabeledDataset;
use crate::estimation::{estimate_cov, pooled_cov, CovMode};
use crate::{Error, Result};

/// Fixed render palette (RGB), one flat color per class index, cycling past
/// the end.
pub const PALETTE: [[u8; 3]; 8] = [
    [228, 26, 28],   // red
    [55, 126, 184],  // blue
    [77, 175, 74],   // green
    [152, 78, 163],  // purple
    [255, 127, 0],   // orange
    [255, 255, 51],  // yellow
    [166, 86, 40],   // brown
    [247, 129, 191], // pink
];

/// Axis-aligned rectangle a grid covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl GridBounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_min < x_max) || !(y_min < y_max) {
            return Err(Error::Shape("bounds must satisfy min < max".into()));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Data bounding box padded by `padding_stds` pooled standard deviations
    /// per axis. This is the default viewport for rendering a dataset's
    /// decision regions.
    pub fn from_dataset_padded(ds: &LabeledDataset, padding_stds: f64) -> Result<Self> {
        if ds.dim() != 2 {
            return Err(Error::NonPlanarModel { dim: ds.dim() });
        }
        let counts = ds.class_counts();
        let per_class: Vec<(usize, _)> = (0..ds.num_classes())
            .map(|k| Ok((counts[k], estimate_cov(ds, k, CovMode::Mle)?)))
            .collect::<Result<_>>()?;
        let pooled = pooled_cov(&per_class)?;
        let ranges = ds.feature_ranges();
        let pad_x = padding_stds * pooled.get(0, 0).sqrt();
        let pad_y = padding_stds * pooled.get(1, 1).sqrt();
        Self::new(
            ranges[0].0 - pad_x,
            ranges[0].1 + pad_x,
            ranges[1].0 - pad_y,
            ranges[1].1 + pad_y,
        )
    }
}

/// Predicted labels over a regular 2-D lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionGrid {
    bounds: GridBounds,
    resolution: f64,
    width: usize,
    height: usize,
    labels: Vec<usize>,
    class_counts: Vec<usize>,
}

impl DecisionGrid {
    /// Classifies every cell center of the lattice spanned by `bounds` at
    /// the given resolution. The model must be two-dimensional.
    pub fn compute(
        clf: &FittedClassifier,
        bounds: &GridBounds,
        resolution: f64,
    ) -> Result<Self> {
        if clf.dim() != 2 {
            return Err(Error::NonPlanarModel { dim: clf.dim() });
        }
        if !(resolution > 0.0) {
            return Err(Error::Shape("resolution must be positive".into()));
        }
        let width = ((bounds.x_max - bounds.x_min) / resolution).ceil() as usize;
        let height = ((bounds.y_max - bounds.y_min) / resolution).ceil() as usize;
        let mut labels = Vec::with_capacity(width * height);
        let mut class_counts = vec![0usize; clf.num_classes()];
        for iy in 0..height {
            let y = bounds.y_min + (iy as f64 + 0.5) * resolution;
            for ix in 0..width {
                let x = bounds.x_min + (ix as f64 + 0.5) * resolution;
                let label = clf.predict(&[x, y])?;
                class_counts[label] += 1;
                labels.push(label);
            }
        }
        Ok(Self {
            bounds: *bounds,
            resolution,
            width,
            height,
            labels,
            class_counts,
        })
    }

    pub fn bounds(&self) -> &GridBounds {
        &self.bounds
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn label(&self, ix: usize, iy: usize) -> usize {
        self.labels[iy * self.width + ix]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Cells labeled with each class; a proxy for region area.
    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    /// Fraction of cells on which two grids over the same lattice agree.
    pub fn agreement(&self, other: &Self) -> Result<f64> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                actual: other.labels.len(),
            });
        }
        let same = self
            .labels
            .iter()
            .zip(&other.labels)
            .filter(|(a, b)| a == b)
            .count();
        Ok(same as f64 / self.labels.len() as f64)
    }

    /// CSV layout: a header line naming the geometry fields, the geometry
    /// (floats at 17 significant digits), then one line of comma-separated
    /// labels per row, bottom row first.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x_min,x_max,y_min,y_max,resolution,num_classes")?;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.bounds.x_min,
            self.bounds.x_max,
            self.bounds.y_min,
            self.bounds.y_max,
            self.resolution,
            self.class_counts.len(),
        )?;
        for iy in 0..self.height {
            let row: Vec<String> = (0..self.width)
                .map(|ix| self.label(ix, iy).to_string())
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let mut next_line = || -> Result<(usize, String)> {
            lines
                .next()
                .map(|(i, l)| Ok((i + 1, l?)))
                .unwrap_or_else(|| {
                    Err(Error::Parse {
                        line: 0,
                        message: "unexpected end of file".into(),
                    })
                })
        };
        let (_, _header) = next_line()?;
        let (line_no, geometry) = next_line()?;
        let fields: Vec<&str> = geometry.trim().split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 6 geometry fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad float `{s}`: {e}"),
            })
        };
        let bounds = GridBounds::new(
            parse(fields[0])?,
            parse(fields[1])?,
            parse(fields[2])?,
            parse(fields[3])?,
        )?;
        let resolution = parse(fields[4])?;
        let num_classes: usize = fields[5].trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad class count: {e}"),
        })?;
        let width = ((bounds.x_max - bounds.x_min) / resolution).ceil() as usize;
        let height = ((bounds.y_max - bounds.y_min) / resolution).ceil() as usize;
        let mut labels = Vec::with_capacity(width * height);
        let mut class_counts = vec![0usize; num_classes];
        for _ in 0..height {
            let (line_no, row) = next_line()?;
            for field in row.trim().split(',') {
                let label: usize = field.trim().parse().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad label `{field}`: {e}"),
                })?;
                if label >= num_classes {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("label {label} out of range for {num_classes} classes"),
                    });
                }
                class_counts[label] += 1;
                labels.push(label);
            }
        }
        if labels.len() != width * height {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "expected {} labels, got {}",
                    width * height,
                    labels.len()
                ),
            });
        }
        Ok(Self {
            bounds,
            resolution,
            width,
            height,
            labels,
            class_counts,
        })
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Binary PPM (P6), one pixel per cell, colored by [`PALETTE`]. The top
    /// image row is the grid row with the largest y.
    pub fn write_ppm<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut pixels = Vec::with_capacity(self.width * self.height * 3);
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                let color = PALETTE[self.label(ix, iy) % PALETTE.len()];
                pixels.extend_from_slice(&color);
            }
        }
        w.write_all(&pixels)?;
        Ok(())
    }

    pub fn write_ppm_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_ppm(std::io::BufWriter::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{Family, FitOptions, Likelihood};
    use crate::gaussian::GaussianParams;
    use crate::linalg::SymMatrix;
    use crate::scenario::{builtin_scenario, ScenarioId};

    fn voronoi_classifier() -> FittedClassifier {
        let means = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]];
        FittedClassifier::make_bayes(
            vec![1.0 / 3.0; 3],
            means
                .iter()
                .map(|m| {
                    Likelihood::Gaussian(
                        GaussianParams::new(m.to_vec(), SymMatrix::identity(2)).unwrap(),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn lattice_size_covers_the_bounds() {
        let clf = voronoi_classifier();
        let bounds = GridBounds::new(-1.0, 1.05, -2.0, 0.0).unwrap();
        let grid = DecisionGrid::compute(&clf, &bounds, 0.5).unwrap();
        assert_eq!(grid.width(), 5); // ceil(2.05 / 0.5)
        assert_eq!(grid.height(), 4);
        assert_eq!(grid.labels().len(), 20);
        let total: usize = grid.class_counts().iter().sum();
        assert_eq!(total, 20);
    }

    #[test]
    fn identity_covariance_equal_priors_gives_voronoi_cells() {
        let clf = voronoi_classifier();
        let bounds = GridBounds::new(-3.0, 7.0, -3.0, 7.0).unwrap();
        let grid = DecisionGrid::compute(&clf, &bounds, 0.25).unwrap();
        let means = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]];
        for iy in 0..grid.height() {
            for ix in 0..grid.width() {
                let x = bounds.x_min + (ix as f64 + 0.5) * 0.25;
                let y = bounds.y_min + (iy as f64 + 0.5) * 0.25;
                let nearest = means
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| {
                        let da = (x - a[0]).powi(2) + (y - a[1]).powi(2);
                        let db = (x - b[0]).powi(2) + (y - b[1]).powi(2);
                        da.partial_cmp(&db).unwrap()
                    })
                    .map(|(k, _)| k)
                    .unwrap();
                assert_eq!(grid.label(ix, iy), nearest, "cell ({ix}, {iy})");
            }
        }
    }

    #[test]
    fn lda_regions_have_straight_boundaries() {
        let ds = builtin_scenario(ScenarioId::B).with_seed(5).generate().unwrap();
        let clf = FittedClassifier::fit(&ds, Family::Lda, &FitOptions::default()).unwrap();
        let bounds = GridBounds::from_dataset_padded(&ds, 2.0).unwrap();
        let grid = DecisionGrid::compute(&clf, &bounds, 0.1).unwrap();
        // Collect the boundary crossing per row (x where the label flips);
        // for a linear boundary those (x, y) points must be collinear.
        let mut crossings = Vec::new();
        for iy in 0..grid.height() {
            for ix in 1..grid.width() {
                if grid.label(ix, iy) != grid.label(ix - 1, iy) {
                    let x = bounds.x_min + (ix as f64) * 0.1;
                    let y = bounds.y_min + (iy as f64 + 0.5) * 0.1;
                    crossings.push((x, y));
                }
            }
        }
        assert!(crossings.len() >= 3, "boundary should cross the viewport");
        let (x0, y0) = crossings[0];
        let (x1, y1) = *crossings.last().unwrap();
        for &(x, y) in &crossings {
            // Distance from the line through the first and last crossing,
            // generously bounded by the cell size.
            let num = ((y1 - y0) * x - (x1 - x0) * y + x1 * y0 - y1 * x0).abs();
            let den = ((y1 - y0).powi(2) + (x1 - x0).powi(2)).sqrt();
            assert!(num / den <= 0.2, "crossing ({x}, {y}) off the line");
        }
    }

    #[test]
    fn grid_csv_round_trip_is_identical() {
        let ds = builtin_scenario(ScenarioId::B).with_seed(9).generate().unwrap();
        let clf = FittedClassifier::fit(&ds, Family::Qda, &FitOptions::default()).unwrap();
        let bounds = GridBounds::from_dataset_padded(&ds, 2.0).unwrap();
        let grid = DecisionGrid::compute(&clf, &bounds, 0.5).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let back = DecisionGrid::read_csv(buf.as_slice()).unwrap();
        assert_eq!(grid, back);
    }

    #[test]
    fn ppm_has_correct_header_and_size() {
        let clf = voronoi_classifier();
        let bounds = GridBounds::new(0.0, 1.0, 0.0, 2.0).unwrap();
        let grid = DecisionGrid::compute(&clf, &bounds, 0.5).unwrap();
        let mut buf = Vec::new();
        grid.write_ppm(&mut buf).unwrap();
        let header = b"P6\n2 4\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(buf.len(), header.len() + 2 * 4 * 3);
    }

    #[test]
    fn grids_reject_non_planar_models() {
        let g = |m: &[f64]| {
            Likelihood::Gaussian(GaussianParams::new(m.to_vec(), SymMatrix::identity(3)).unwrap())
        };
        let clf = FittedClassifier::make_bayes(
            vec![0.5, 0.5],
            vec![g(&[0.0, 0.0, 0.0]), g(&[1.0, 1.0, 1.0])],
        )
        .unwrap();
        let bounds = GridBounds::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            DecisionGrid::compute(&clf, &bounds, 0.1),
            Err(Error::NonPlanarModel { dim: 3 })
        ));
    }

    #[test]
    fn agreement_is_one_against_itself() {
        let clf = voronoi_classifier();
        let bounds = GridBounds::new(-2.0, 6.0, -2.0, 6.0).unwrap();
        let grid = DecisionGrid::compute(&clf, &bounds, 0.2).unwrap();
        assert_eq!(grid.agreement(&grid).unwrap(), 1.0);
    }

    #[test]
    fn four_hundred_square_grid_is_fast() {
        let ds = builtin_scenario(ScenarioId::A).with_seed(1).generate().unwrap();
        let clf = FittedClassifier::fit(&ds, Family::Qda, &FitOptions::default()).unwrap();
        let bounds = GridBounds::new(-20.0, 20.0, -20.0, 20.0).unwrap();
        let start = std::time::Instant::now();
        let grid = DecisionGrid::compute(&clf, &bounds, 0.1).unwrap();
        let elapsed = start.elapsed();
        assert_eq!(grid.width(), 400);
        assert_eq!(grid.height(), 400);
        assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    }
}
