//! KKT-vector estimation from a pointwise Pareto-front approximation.
//!
//! KKT vectors are orthogonal to the linearized Pareto front, so each
//! front point gets a local affine fit through its nearest neighbors; the
//! fit normal, oriented into the nonnegative orthant and scaled to unit
//! component sum, is the estimate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A pointwise front approximation in image space, optionally linked to the
/// decision-space points that produced it.
#[derive(Debug, Clone)]
pub struct FrontCloud {
    /// Objective values, one `k`-vector per point.
    pub image_points: Vec<Vec<f64>>,
    /// Matching decision points, when known.
    pub decision_points: Option<Vec<Vec<f64>>>,
}

impl FrontCloud {
    pub fn k(&self) -> usize {
        self.image_points.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.image_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image_points.is_empty()
    }
}

/// Estimate for one front point.
#[derive(Debug, Clone)]
pub enum FrontEstimate {
    /// Simplex vector from the local fit.
    Alpha(Vec<f64>),
    /// No trustworthy estimate; carries a diagnostic.
    Flagged(String),
}

impl FrontEstimate {
    pub fn alpha(&self) -> Option<&[f64]> {
        match self {
            Self::Alpha(a) => Some(a),
            Self::Flagged(_) => None,
        }
    }
}

/// Default neighborhood size for `k` objectives.
pub fn default_neighborhood(k: usize) -> usize {
    2 * (k - 1) + 1
}

/// Fit an affine hyperplane through each point and its `neighborhood_size`
/// nearest neighbors and estimate the KKT vector from the normal. Points
/// whose normal cannot be oriented into the nonnegative orthant, or whose
/// neighborhood is rank deficient, are flagged rather than fabricated.
pub fn estimate_kkt_vectors(
    front: &FrontCloud,
    neighborhood_size: usize,
) -> Result<Vec<FrontEstimate>> {
    let k = front.k();
    if k < 2 {
        return Err(Error::InvalidArgument(
            "front points need at least two objectives".into(),
        ));
    }
    if neighborhood_size < k - 1 {
        return Err(Error::InvalidArgument(format!(
            "neighborhood size {neighborhood_size} is below the minimum {} for k = {k}",
            k - 1
        )));
    }
    if front.len() < neighborhood_size + 1 {
        return Err(Error::InsufficientFront {
            needed: neighborhood_size + 1,
            got: front.len(),
        });
    }
    let mut out = Vec::with_capacity(front.len());
    for (i, p) in front.image_points.iter().enumerate() {
        let neighborhood = nearest_neighbors(&front.image_points, i, neighborhood_size);
        let normal = if k == 2 {
            line_normal_total_least_squares(&neighborhood)
        } else {
            hyperplane_normal_least_squares(&neighborhood, k)
        };
        match normal {
            Some(normal) => out.push(orient_to_simplex(normal)),
            None => out.push(FrontEstimate::Flagged(format!(
                "degenerate neighborhood around point {} ({:?})",
                i + 1,
                p
            ))),
        }
    }
    Ok(out)
}

/// The point itself plus its `m` nearest neighbors in image space.
fn nearest_neighbors(points: &[Vec<f64>], center: usize, m: usize) -> Vec<Vec<f64>> {
    let mut by_distance: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != center)
        .map(|(j, p)| {
            let d: f64 = p
                .iter()
                .zip(&points[center])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (d, j)
        })
        .collect();
    by_distance.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut out = vec![points[center].clone()];
    out.extend(by_distance.iter().take(m).map(|(_, j)| points[*j].clone()));
    out
}

/// Orthogonal-distance line fit in the plane; returns the unit normal.
fn line_normal_total_least_squares(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let dx = p[0] - cx;
        let dy = p[1] - cy;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx + syy <= 0.0 {
        return None; // all points coincide
    }
    // eigenvector of the smaller eigenvalue of [[sxx, sxy], [sxy, syy]]
    let trace = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let disc = (trace * trace / 4.0 - det).max(0.0).sqrt();
    let lambda_min = trace / 2.0 - disc;
    let (mut nx, mut ny) = if sxy.abs() > 1e-300 {
        (lambda_min - syy, sxy)
    } else if sxx <= syy {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let norm = (nx * nx + ny * ny).sqrt();
    if norm == 0.0 {
        return None;
    }
    nx /= norm;
    ny /= norm;
    Some(vec![nx, ny])
}

/// Least-squares fit of `f_k = b0 + sum_i b_i f_i` over the neighborhood;
/// the normal is `(b_1, ..., b_{k-1}, -1)`.
fn hyperplane_normal_least_squares(points: &[Vec<f64>], k: usize) -> Option<Vec<f64>> {
    let rows = points.len();
    let design = DMatrix::from_fn(rows, k, |r, c| if c == 0 { 1.0 } else { points[r][c - 1] });
    let response = DVector::from_fn(rows, |r, _| points[r][k - 1]);
    let normal_matrix = design.transpose() * &design;
    let rhs = design.transpose() * response;
    let chol = normal_matrix.cholesky()?;
    let beta = chol.solve(&rhs);
    let mut normal: Vec<f64> = beta.iter().skip(1).copied().collect();
    normal.push(-1.0);
    let len: f64 = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in normal.iter_mut() {
        *v /= len;
    }
    Some(normal)
}

/// Orient the unit normal so its component sum is positive, verify it is
/// nonnegative up to slack, clamp and rescale onto the simplex.
fn orient_to_simplex(mut normal: Vec<f64>) -> FrontEstimate {
    let sum: f64 = normal.iter().sum();
    if sum == 0.0 {
        return FrontEstimate::Flagged("normal has zero component sum".into());
    }
    if sum < 0.0 {
        for v in normal.iter_mut() {
            *v = -*v;
        }
    }
    if normal.iter().any(|&v| v < -1e-6) {
        return FrontEstimate::Flagged(format!(
            "normal {normal:?} has mixed signs; point may not be on a Pareto front"
        ));
    }
    let clamped: Vec<f64> = normal.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    FrontEstimate::Alpha(clamped.into_iter().map(|v| v / total).collect())
}
