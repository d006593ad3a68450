//! Data sets of decision points with their KKT vectors, plus CSV I/O.
//!
//! File format: one row per point, columns `x_1,...,x_n,alpha_1,...,alpha_k`,
//! comma separated, no header by default; lines starting with `#` are
//! skipped. The dimensions `(n, k)` travel out-of-band, either as explicit
//! arguments or in a JSON sidecar `{"n":..,"k":..}` next to the file.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tolerated negative KKT component before a point is rejected.
pub const ALPHA_NEG_TOL: f64 = 1e-12;
/// Largest tolerated deviation of the KKT component sum from 1.
pub const ALPHA_SUM_TOL: f64 = 1e-9;
/// Deviations below this are left untouched so that cleanup is idempotent
/// and round-trips through files stay bit-exact.
const ALPHA_RENORM_TRIGGER: f64 = 1e-14;

/// A decision point together with its KKT vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub x: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl DataPoint {
    /// Validate simplex membership of `alpha` up to the documented slack and
    /// clean it up (clamp tiny negatives to zero, renormalize the sum when it
    /// deviates measurably from 1).
    pub fn new(x: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        Self::with_row(x, alpha, None)
    }

    fn with_row(x: Vec<f64>, mut alpha: Vec<f64>, row: Option<usize>) -> Result<Self> {
        let sum: f64 = alpha.iter().sum();
        let min = alpha.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -ALPHA_NEG_TOL || (sum - 1.0).abs() > ALPHA_SUM_TOL || !sum.is_finite() {
            return Err(Error::AlphaOutsideSimplex { row, sum, min });
        }
        for a in alpha.iter_mut() {
            if *a < 0.0 {
                *a = 0.0;
            }
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > ALPHA_RENORM_TRIGGER {
            for a in alpha.iter_mut() {
                *a /= sum;
            }
        }
        Ok(Self { x, alpha })
    }
}

/// An immutable collection of data points sharing the dimensions `n` and `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    n: usize,
    k: usize,
    points: Vec<DataPoint>,
}

/// JSON sidecar describing a data file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataSidecar {
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl DataSet {
    pub fn new(n: usize, k: usize, points: Vec<DataPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDataSet {
                context: String::new(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            if p.x.len() != n {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    detail: format!("decision vector has {} entries, expected {n}", p.x.len()),
                });
            }
            if p.alpha.len() != k {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    detail: format!("KKT vector has {} entries, expected {k}", p.alpha.len()),
                });
            }
        }
        Ok(Self { n, k, points })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    /// Parse a data CSV with known dimensions.
    pub fn parse_csv(text: &str, n: usize, k: usize) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let row = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != n + k {
                return Err(Error::MalformedRow {
                    row,
                    detail: format!("expected {} columns, found {}", n + k, fields.len()),
                });
            }
            let mut values = Vec::with_capacity(n + k);
            for f in &fields {
                let v: f64 = f.parse().map_err(|_| Error::MalformedRow {
                    row,
                    detail: format!("cannot parse \"{f}\" as a number"),
                })?;
                values.push(v);
            }
            let alpha = values.split_off(n);
            points.push(DataPoint::with_row(values, alpha, Some(row))?);
        }
        Self::new(n, k, points)
    }

    /// Load a data CSV; `dims` overrides the sidecar when given.
    pub fn load(path: &Path, dims: Option<(usize, usize)>) -> Result<Self> {
        let (n, k) = match dims {
            Some(d) => d,
            None => {
                let side = load_sidecar(path)?;
                (side.n, side.k)
            }
        };
        let text = fs::read_to_string(path)?;
        Self::parse_csv(text.as_str(), n, k)
    }

    /// Write the data CSV. Values print in shortest round-trip form, so a
    /// save/load cycle reproduces the set bit-exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for p in &self.points {
            let row: Vec<String> = p
                .x
                .iter()
                .chain(p.alpha.iter())
                .map(|v| format!("{v}"))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        let mut file = fs::File::create(path)?;
        file.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Write the JSON sidecar next to `path` (as `<path>.json`).
    pub fn save_sidecar(
        &self,
        path: &Path,
        provenance: Option<String>,
        seed: Option<u64>,
    ) -> Result<()> {
        let side = DataSidecar {
            n: self.n,
            k: self.k,
            provenance,
            seed,
        };
        let text = serde_json::to_string_pretty(&side)?;
        fs::write(sidecar_path(path), text)?;
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    std::path::PathBuf::from(os)
}

pub fn load_sidecar(path: &Path) -> Result<DataSidecar> {
    let sc = sidecar_path(path);
    let text = fs::read_to_string(&sc).map_err(|e| {
        Error::InvalidArgument(format!(
            "dimensions not given and sidecar {} unreadable: {e}",
            sc.display()
        ))
    })?;
    Ok(serde_json::from_str(&text)?)
}
