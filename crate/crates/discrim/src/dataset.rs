//! Labeled feature vectors and their CSV form.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// `n` feature vectors of dimension `d` with integer class labels in
/// `0..num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    num_classes: usize,
    rows: Vec<(Vec<f64>, usize)>,
}

impl LabeledDataset {
    /// Builds a dataset from `(features, label)` rows. The class count is
    /// one past the largest label seen; every row must share one dimension.
    pub fn new(rows: Vec<(Vec<f64>, usize)>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::EmptyDataset);
        };
        let dim = first.0.len();
        if dim == 0 {
            return Err(Error::Shape("feature vectors must be non-empty".into()));
        }
        let mut num_classes = 0;
        for (x, label) in &rows {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: x.len(),
                });
            }
            num_classes = num_classes.max(label + 1);
        }
        Ok(Self {
            dim,
            num_classes,
            rows,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn rows(&self) -> &[(Vec<f64>, usize)] {
        &self.rows
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for (_, label) in &self.rows {
            counts[*label] += 1;
        }
        counts
    }

    pub fn class_rows(&self, class: usize) -> impl Iterator<Item = &[f64]> {
        self.rows
            .iter()
            .filter(move |(_, label)| *label == class)
            .map(|(x, _)| x.as_slice())
    }

    /// Per-feature `(min, max)` over the whole dataset.
    pub fn feature_ranges(&self) -> Vec<(f64, f64)> {
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for (x, _) in &self.rows {
            for (j, &v) in x.iter().enumerate() {
                ranges[j].0 = ranges[j].0.min(v);
                ranges[j].1 = ranges[j].1.max(v);
            }
        }
        ranges
    }

    /// Splits into `(train, test)` keeping the class proportions: each class
    /// contributes `round(test_fraction · n_k)` rows (at least one, and at
    /// least one stays in train) drawn by a seeded shuffle.
    pub fn stratified_split(&self, test_fraction: f64, rng: &mut SplitMix64) -> (Self, Self) {
        assert!(
            (0.0..1.0).contains(&test_fraction),
            "test fraction must lie in [0, 1)"
        );
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in 0..self.num_classes {
            let mut indices: Vec<usize> = self
                .rows
                .iter()
                .enumerate()
                .filter(|(_, (_, label))| *label == class)
                .map(|(i, _)| i)
                .collect();
            // Fisher-Yates
            for i in (1..indices.len()).rev() {
                let j = rng.next_index(i + 1);
                indices.swap(i, j);
            }
            let n_k = indices.len();
            let mut n_test = (test_fraction * n_k as f64).round() as usize;
            if n_k > 1 {
                n_test = n_test.clamp(1, n_k - 1);
            } else {
                n_test = 0;
            }
            for (pos, &i) in indices.iter().enumerate() {
                if pos < n_test {
                    test.push(self.rows[i].clone());
                } else {
                    train.push(self.rows[i].clone());
                }
            }
        }
        let rebuild = |rows: Vec<(Vec<f64>, usize)>| Self {
            dim: self.dim,
            num_classes: self.num_classes,
            rows,
        };
        (rebuild(train), rebuild(test))
    }

    /// Writes `x1,...,xd,label` rows. Floats carry 17 significant digits so
    /// the file round-trips to the exact same doubles.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        writeln!(w, "{},label", header.join(","))?;
        for (x, label) in &self.rows {
            let fields: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{},{label}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        let mut dim = None;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if idx == 0 {
                let cols = trimmed.split(',').count();
                if cols < 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "header needs at least one feature column and `label`".into(),
                    });
                }
                dim = Some(cols - 1);
                continue;
            }
            let dim = dim.expect("header parsed first");
            let fields: Vec<&str> = trimmed.split(',').collect();
            if fields.len() != dim + 1 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {} fields, got {}", dim + 1, fields.len()),
                });
            }
            let mut x = Vec::with_capacity(dim);
            for field in &fields[..dim] {
                x.push(field.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad float `{field}`: {e}"),
                })?);
            }
            let label = fields[dim].trim().parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad label `{}`: {e}", fields[dim]),
            })?;
            rows.push((x, label));
        }
        Self::new(rows)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}
