//! Data-set generators: exact geometric sets (circle, ellipses, line
//! segments), scalarization of a given objective by the weighting method,
//! and the sampled two-facility location problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::MonomialBasis;
use crate::dataset::{DataPoint, DataSet};
use crate::error::{Error, Result};
use crate::objective::ObjectiveVector;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// `N` points on the unit circle with a KKT profile that traverses the
/// simplex twice per revolution (so the vector field closes up smoothly).
pub fn gen_circle(n_points: usize) -> Result<DataSet> {
    gen_ellipse(1.0, 1.0, n_points)
}

/// `N` points on the axis-aligned ellipse with semi-axes `a` and `b`,
/// with the same KKT profile as the circle generator.
pub fn gen_ellipse(a: f64, b: f64, n_points: usize) -> Result<DataSet> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidArgument(
            "ellipse semi-axes must be positive".into(),
        ));
    }
    if n_points == 0 {
        return Err(Error::EmptyDataSet {
            context: "circle/ellipse generator with N = 0".into(),
        });
    }
    let mut points = Vec::with_capacity(n_points);
    for j in 1..=n_points {
        let t = j as f64 / n_points as f64;
        let x = vec![a * (TAU * t).cos(), b * (TAU * t).sin()];
        let a1 = 0.5 * ((2.0 * TAU * t).cos() + 1.0);
        points.push(DataPoint::new(x, vec![a1, 1.0 - a1])?);
    }
    DataSet::new(2, 2, points)
}

/// A straight segment `p + [0,1] * (1/4) * q/||q||` in the plane.
#[derive(Debug, Clone, Copy)]
pub struct LineSegmentSpec {
    pub p: [f64; 2],
    pub q: [f64; 2],
}

impl LineSegmentSpec {
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        let norm = (self.q[0] * self.q[0] + self.q[1] * self.q[1]).sqrt();
        [
            self.p[0] + s * 0.25 * self.q[0] / norm,
            self.p[1] + s * 0.25 * self.q[1] / norm,
        ]
    }
}

/// The three non-intersecting segments used by the multi-component data set.
pub fn three_line_segments() -> [LineSegmentSpec; 3] {
    [
        LineSegmentSpec {
            p: [0.15, -0.20],
            q: [0.47, 0.04],
        },
        LineSegmentSpec {
            p: [0.47, -0.32],
            q: [0.40, 0.14],
        },
        LineSegmentSpec {
            p: [0.37, 0.18],
            q: [0.38, 0.28],
        },
    ]
}

/// Equidistant points on each of the three segments; the KKT vectors run
/// linearly from `(0,1)` at the start of a segment to `(1,0)` at its end.
pub fn gen_three_lines(per_segment: usize) -> Result<DataSet> {
    if per_segment < 2 {
        return Err(Error::InvalidArgument(
            "at least two points per segment are required".into(),
        ));
    }
    let mut points = Vec::with_capacity(3 * per_segment);
    for segment in three_line_segments() {
        for j in 0..per_segment {
            let s = j as f64 / (per_segment - 1) as f64;
            let x = segment.point_at(s);
            points.push(DataPoint::new(x.to_vec(), vec![s, 1.0 - s])?);
        }
    }
    DataSet::new(2, 2, points)
}

/// Options for the gradient-descent scalarization solver.
#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    /// Stop when the gradient norm of the weighted sum drops below this.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant of the backtracking line search.
    pub armijo: f64,
    /// Step-length shrink factor.
    pub shrink: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            gradient_tol: 1e-8,
            max_iterations: 10_000,
            armijo: 1e-4,
            shrink: 0.5,
        }
    }
}

/// Result of one weighted-sum descent; `converged` is false when the
/// iteration budget ran out before the gradient tolerance was met.
#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub x: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn weighted_value(f: &ObjectiveVector, w: &[f64], x: &[f64]) -> f64 {
    f.eval(x).iter().zip(w).map(|(v, wi)| v * wi).sum()
}

fn weighted_gradient(f: &ObjectiveVector, w: &[f64], x: &[f64]) -> Vec<f64> {
    let jac = f.jacobian(x);
    let mut g = vec![0.0; f.n()];
    for i in 0..f.k() {
        for v in 0..f.n() {
            g[v] += w[i] * jac[(i, v)];
        }
    }
    g
}

/// Minimize `sum_i w_i f_i` from `x0` by steepest descent with backtracking.
/// The weight vector doubles as the KKT vector of the returned point.
pub fn weighted_sum_solve(
    f: &ObjectiveVector,
    w: &[f64],
    x0: &[f64],
    options: &DescentOptions,
) -> Result<DescentOutcome> {
    if w.len() != f.k() {
        return Err(Error::DimensionMismatch {
            context: "weight vector length",
            expected: f.k(),
            found: w.len(),
        });
    }
    if x0.len() != f.n() {
        return Err(Error::DimensionMismatch {
            context: "start point dimension",
            expected: f.n(),
            found: x0.len(),
        });
    }
    let mut x = x0.to_vec();
    let mut value = weighted_value(f, w, &x);
    let mut grad = weighted_gradient(f, w, &x);
    let mut grad_norm = norm(&grad);
    let mut iterations = 0;
    while grad_norm > options.gradient_tol && iterations < options.max_iterations {
        let mut t = 1.0;
        let target_slope = options.armijo * grad_norm * grad_norm;
        loop {
            let candidate: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - t * gi).collect();
            let cand_value = weighted_value(f, w, &candidate);
            if cand_value.is_finite() && cand_value <= value - t * target_slope {
                x = candidate;
                value = cand_value;
                break;
            }
            t *= options.shrink;
            if t < 1e-18 {
                // stalled line search; report the current iterate as-is
                return Ok(DescentOutcome {
                    x,
                    gradient_norm: grad_norm,
                    iterations,
                    converged: false,
                });
            }
        }
        grad = weighted_gradient(f, w, &x);
        grad_norm = norm(&grad);
        iterations += 1;
    }
    Ok(DescentOutcome {
        converged: grad_norm <= options.gradient_tol,
        x,
        gradient_norm: grad_norm,
        iterations,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Evenly spaced weights `((i-1)/(W-1), 1 - (i-1)/(W-1))`, vertices included.
pub fn weight_grid(count: usize) -> Result<Vec<[f64; 2]>> {
    if count < 2 {
        return Err(Error::InvalidArgument(
            "a weight grid needs at least two weights".into(),
        ));
    }
    Ok((0..count)
        .map(|i| {
            let w1 = i as f64 / (count - 1) as f64;
            [w1, 1.0 - w1]
        })
        .collect())
}

/// Scalarized data set together with the weights that failed to converge.
#[derive(Debug, Clone)]
pub struct ScalarizedData {
    pub data: DataSet,
    /// 1-based indices into the weight grid that were excluded.
    pub excluded_weights: Vec<usize>,
}

/// Solve one weighted-sum subproblem per (grid weight, start) pair and keep
/// every converged minimizer, deduplicated within a weight. Multimodal
/// objectives then contribute one point per local minimum the starts reach,
/// each carrying its weight as the KKT vector. Weights for which no solve
/// converges are excluded and reported.
pub fn gen_scalarized_dataset(
    f: &ObjectiveVector,
    weight_count: usize,
    starts: &[Vec<f64>],
    options: &DescentOptions,
) -> Result<ScalarizedData> {
    if f.k() != 2 {
        return Err(Error::InvalidArgument(
            "the scalarization grid is defined for two objectives".into(),
        ));
    }
    if starts.is_empty() {
        return Err(Error::InvalidArgument("no start points given".into()));
    }
    let weights = weight_grid(weight_count)?;
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        let mut minima: Vec<Vec<f64>> = Vec::new();
        for x0 in starts {
            let outcome = weighted_sum_solve(f, w, x0, options)?;
            if !outcome.converged {
                continue;
            }
            let duplicate = minima.iter().any(|m| {
                m.iter()
                    .zip(&outcome.x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
                    < 1e-6
            });
            if !duplicate {
                minima.push(outcome.x);
            }
        }
        if minima.is_empty() {
            excluded.push(i + 1);
        } else {
            for x in minima {
                points.push(DataPoint::new(x, w.to_vec())?);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::AllScalarizationsFailed {
            attempted: weight_count,
        });
    }
    Ok(ScalarizedData {
        data: DataSet::new(f.n(), 2, points)?,
        excluded_weights: excluded,
    })
}

/// Configuration of the sampled location-problem generator.
#[derive(Debug, Clone)]
pub struct SaaConfig {
    /// Samples per scalarization (`N_s`).
    pub sample_count: usize,
    /// Number of weights on the grid.
    pub scalarization_count: usize,
    pub seed: u64,
    pub descent: DescentOptions,
}

/// Sample-average objective of the location problem for a fixed draw of the
/// random facility: `(||x - (-1,-1)||^2, mean_j ||x - (xi_j, 0)||^2)`,
/// dropping the additive constants (they do not affect minimizers).
pub fn saa_location_objective(samples: &[f64]) -> Result<ObjectiveVector> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples drawn".into()));
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let basis = MonomialBasis::new(2, 2)?;
    // bases: x1, x1^2, x2, x1 x2, x2^2
    let flat = [
        2.0, 1.0, 2.0, 0.0, 1.0, // ||x - (-1,-1)||^2 minus constant
        -2.0 * mean, 1.0, 0.0, 0.0, 1.0, // mean_j ||x - (xi_j,0)||^2 minus constant
    ];
    ObjectiveVector::polynomial(basis, 2, &flat)
}

/// Scalarize the sampled location problem over an even weight grid. Each
/// scalarization draws its own `N_s` samples from a stream derived from the
/// seed and the weight index, then the KKT vector `(-x2, 1 + x2)` (clamped
/// onto the simplex) is attached to the minimizer.
pub fn gen_saa_location(config: &SaaConfig) -> Result<ScalarizedData> {
    if config.sample_count == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample per scalarization is required".into(),
        ));
    }
    let weights = weight_grid(config.scalarization_count)?;
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64 + 1);
        let samples: Vec<f64> = (0..config.sample_count)
            .map(|_| rng.random_range(0.0..2.0))
            .collect();
        let objective = saa_location_objective(&samples)?;
        let outcome = weighted_sum_solve(&objective, w, &[0.0, 0.0], &config.descent)?;
        if !outcome.converged {
            excluded.push(i + 1);
            continue;
        }
        let alpha = location_alpha(outcome.x[1]);
        points.push(DataPoint::new(outcome.x, alpha)?);
    }
    if points.is_empty() {
        return Err(Error::AllScalarizationsFailed {
            attempted: config.scalarization_count,
        });
    }
    Ok(ScalarizedData {
        data: DataSet::new(2, 2, points)?,
        excluded_weights: excluded,
    })
}

/// KKT rule of the location problem, `alpha = (-x2, 1 + x2)`, clipped to
/// `[0,1]` and renormalized so that noisy second coordinates stay feasible.
pub fn location_alpha(x2: f64) -> Vec<f64> {
    let a1 = (-x2).clamp(0.0, 1.0);
    let a2 = (1.0 + x2).clamp(0.0, 1.0);
    let sum = a1 + a2;
    vec![a1 / sum, a2 / sum]
}

/// Deterministic start points inside a box, for seeding scalarizations.
pub fn seeded_starts(bounds: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_hits_the_axis_points() {
        let data = gen_circle(4).unwrap();
        // j = 4: x = (1, 0), alpha = (1, 0)
        let p = &data.points()[3];
        assert_relative_eq!(p.x[0], 1.0, epsilon = 1e-15);
        assert!(p.x[1].abs() < 1e-15);
        assert_eq!(p.alpha, vec![1.0, 0.0]);
        // j = 1: x = (0, 1), alpha = (0, 1)
        let p = &data.points()[0];
        assert!(p.x[0].abs() < 1e-15);
        assert_relative_eq!(p.x[1], 1.0, epsilon = 1e-15);
        assert_eq!(p.alpha, vec![0.0, 1.0]);
    }

    #[test]
    fn circle_alpha_stays_exactly_on_the_simplex() {
        let data = gen_circle(1000).unwrap();
        for p in data.points() {
            assert!(p.alpha.iter().all(|&a| (0.0..=1.0).contains(&a)));
            assert!((p.alpha[0] + p.alpha[1] - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn unit_ellipse_equals_the_circle() {
        let a = gen_circle(100).unwrap();
        let b = gen_ellipse(1.0, 1.0, 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ellipse_points_are_critical_for_the_conjectured_objective() {
        let f = ObjectiveVector::analytic("ellipse(3,0.5)").unwrap();
        let data = gen_ellipse(3.0, 0.5, 500).unwrap();
        for p in data.points() {
            let alpha = vec![p.x[0] * p.x[0] / 9.0, p.x[1] * p.x[1] / 0.25];
            let r = f.kkt_residual(&p.x, &alpha).unwrap();
            assert!(r <= 1e-10, "residual {r} at {:?}", p.x);
        }
    }

    #[test]
    fn rejects_degenerate_ellipse_axes() {
        assert!(gen_ellipse(0.0, 1.0, 10).is_err());
        assert!(gen_ellipse(1.0, -2.0, 10).is_err());
    }

    #[test]
    fn three_lines_endpoints_carry_vertex_weights() {
        let data = gen_three_lines(2).unwrap();
        assert_eq!(data.len(), 6);
        for pair in data.points().chunks(2) {
            assert_eq!(pair[0].alpha, vec![0.0, 1.0]);
            assert_eq!(pair[1].alpha, vec![1.0, 0.0]);
        }
    }

    #[test]
    fn three_lines_counts_and_box() {
        let data = gen_three_lines(500).unwrap();
        assert_eq!(data.len(), 1500);
        for p in data.points() {
            assert!(p.x[0] >= 0.1 && p.x[0] <= 0.8, "x1 = {}", p.x[0]);
            assert!(p.x[1] >= -0.35 && p.x[1] <= 0.33, "x2 = {}", p.x[1]);
        }
    }

    #[test]
    fn three_lines_points_are_equidistant_with_quarter_length() {
        let data = gen_three_lines(100).unwrap();
        for segment in data.points().chunks(100) {
            let first = &segment[0];
            let last = &segment[99];
            let len = ((last.x[0] - first.x[0]).powi(2) + (last.x[1] - first.x[1]).powi(2)).sqrt();
            assert!((len - 0.25).abs() <= 1e-15, "segment length {len}");
            let mut prev_gap = None;
            for w in segment.windows(2) {
                let gap = ((w[1].x[0] - w[0].x[0]).powi(2) + (w[1].x[1] - w[0].x[1]).powi(2))
                    .sqrt();
                if let Some(p) = prev_gap {
                    assert!((gap - p as f64).abs() <= 1e-12);
                }
                prev_gap = Some(gap);
            }
        }
    }

    #[test]
    fn weighted_sum_finds_the_quadratic_average() {
        // f = (||x||^2, ||x - e1||^2), even weights: minimizer (1/2, 0)
        let basis = MonomialBasis::new(2, 2).unwrap();
        let f = ObjectiveVector::polynomial(
            basis,
            2,
            &[
                0.0, 1.0, 0.0, 0.0, 1.0, // ||x||^2
                -2.0, 1.0, 0.0, 0.0, 1.0, // ||x - e1||^2 minus constant
            ],
        )
        .unwrap();
        let out = weighted_sum_solve(&f, &[0.5, 0.5], &[0.3, 0.7], &DescentOptions::default())
            .unwrap();
        assert!(out.converged);
        assert!((out.x[0] - 0.5).abs() <= 1e-7, "x = {:?}", out.x);
        assert!(out.x[1].abs() <= 1e-7);
    }

    #[test]
    fn weighted_sum_walks_the_location_segment() {
        let f = ObjectiveVector::analytic("location-expectation").unwrap();
        for &t in &[0.0, 0.25, 0.5, 0.8, 1.0] {
            let out = weighted_sum_solve(&f, &[t, 1.0 - t], &[0.2, -0.3], &DescentOptions::default())
                .unwrap();
            assert!(out.converged);
            let expected = [t * -1.0 + (1.0 - t) * 1.0, -t];
            assert!((out.x[0] - expected[0]).abs() <= 1e-6);
            assert!((out.x[1] - expected[1]).abs() <= 1e-6);
            // stationarity makes the weight a valid KKT vector
            let r = f.kkt_residual(&out.x, &[t, 1.0 - t]).unwrap();
            assert!(r <= 1e-7);
        }
    }

    #[test]
    fn weight_grid_includes_the_vertices() {
        let grid = weight_grid(26).unwrap();
        assert_eq!(grid.len(), 26);
        assert_eq!(grid[0], [0.0, 1.0]);
        assert_eq!(grid[25], [1.0, 0.0]);
        assert_relative_eq!(grid[1][0], 1.0 / 25.0, epsilon = 1e-15);
        assert_relative_eq!(grid[1][1], 24.0 / 25.0, epsilon = 1e-15);
    }

    #[test]
    fn single_central_sample_matches_the_expectation_objective() {
        let sampled = saa_location_objective(&[1.0]).unwrap();
        let exact = ObjectiveVector::analytic("location-expectation").unwrap();
        for &t in &[0.1, 0.5, 0.9] {
            let s = weighted_sum_solve(&sampled, &[t, 1.0 - t], &[0.0, 0.0], &DescentOptions::default())
                .unwrap();
            let e = weighted_sum_solve(&exact, &[t, 1.0 - t], &[0.0, 0.0], &DescentOptions::default())
                .unwrap();
            assert!((s.x[0] - e.x[0]).abs() <= 1e-7);
            assert!((s.x[1] - e.x[1]).abs() <= 1e-7);
        }
    }

    #[test]
    fn exact_scalarization_of_the_expectation_walks_the_segment() {
        let f = ObjectiveVector::analytic("location-expectation").unwrap();
        let result =
            gen_scalarized_dataset(&f, 11, &[vec![0.0, 0.0]], &DescentOptions::default()).unwrap();
        assert!(result.excluded_weights.is_empty());
        for p in result.data.points() {
            // x = t a + (1-t)(1,0) with t = alpha_1 = w_1
            let t = p.alpha[0];
            assert!((p.x[0] - (1.0 - 2.0 * t)).abs() <= 1e-6);
            assert!((p.x[1] + t).abs() <= 1e-6);
        }
    }

    #[test]
    fn saa_location_is_deterministic_and_noisier_near_the_free_facility() {
        let config = SaaConfig {
            sample_count: 50,
            scalarization_count: 300,
            seed: 7,
            descent: DescentOptions::default(),
        };
        let a = gen_saa_location(&config).unwrap();
        let b = gen_saa_location(&config).unwrap();
        assert_eq!(a.data, b.data);
        assert!(a.excluded_weights.is_empty());
        // distance from the true segment (x2 = -t exactly, noise only in x1):
        // |x1 - (1 - 2t)| grows towards t = 0
        let deviation = |p: &DataPoint| {
            let t = -p.x[1];
            (p.x[0] - (1.0 - 2.0 * t)).abs()
        };
        let points = a.data.points();
        let third = points.len() / 3;
        let near_free: f64 = points[..third].iter().map(deviation).sum::<f64>() / third as f64;
        let near_fixed: f64 =
            points[2 * third..].iter().map(deviation).sum::<f64>() / (points.len() - 2 * third) as f64;
        assert!(
            near_free > near_fixed,
            "expected more noise near the free facility: {near_free} vs {near_fixed}"
        );
    }

    #[test]
    fn saa_alpha_rule_matches_the_weights_exactly() {
        let config = SaaConfig {
            sample_count: 10,
            scalarization_count: 21,
            seed: 3,
            descent: DescentOptions::default(),
        };
        let result = gen_saa_location(&config).unwrap();
        let grid = weight_grid(21).unwrap();
        for (p, w) in result.data.points().iter().zip(&grid) {
            assert!((p.alpha[0] - w[0]).abs() <= 1e-7);
        }
    }

    #[test]
    fn location_alpha_clamps_out_of_range_coordinates() {
        assert_eq!(location_alpha(-0.5), vec![0.5, 0.5]);
        let a = location_alpha(0.02); // slightly above the segment range
        assert_eq!(a[0], 0.0);
        assert_eq!(a[1], 1.0);
        let a = location_alpha(-1.03);
        assert_eq!(a[0], 1.0);
        assert_eq!(a[1], 0.0);
    }

    #[test]
    fn generated_sets_assemble_cleanly() {
        use crate::kkt::assemble_system;
        let basis = MonomialBasis::new(2, 3).unwrap();
        for data in [
            gen_circle(30).unwrap(),
            gen_ellipse(2.0, 1.0, 30).unwrap(),
            gen_three_lines(10).unwrap(),
        ] {
            let system = assemble_system(&data, &basis).unwrap();
            assert_eq!(system.nrows(), 2 * data.len());
        }
    }
}
