//! Objective vectors: polynomial combinations over a monomial basis and a
//! small registry of closed-form objectives used as ground truth.

use nalgebra::{DMatrix, DVector};

use crate::basis::MonomialBasis;
use crate::dataset::{ALPHA_NEG_TOL, ALPHA_SUM_TOL};
use crate::error::{Error, Result};
use crate::simplex;

/// A vector-valued objective with `k` components on `R^n`.
#[derive(Debug, Clone)]
pub enum ObjectiveVector {
    Polynomial(PolynomialObjective),
    Analytic(AnalyticObjective),
}

/// `f_i(x) = sum_j c[i][j] b_j(x)` over a shared monomial basis.
#[derive(Debug, Clone)]
pub struct PolynomialObjective {
    basis: MonomialBasis,
    /// `k x d` coefficient matrix, row per objective.
    coefficients: DMatrix<f64>,
}

impl PolynomialObjective {
    pub fn new(basis: MonomialBasis, coefficients: DMatrix<f64>) -> Result<Self> {
        if coefficients.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                context: "coefficient columns vs basis size",
                expected: basis.len(),
                found: coefficients.ncols(),
            });
        }
        Ok(Self {
            basis,
            coefficients,
        })
    }

    /// Build from a flat coefficient vector in objective-major order
    /// `(c_11, ..., c_1d, c_21, ..., c_kd)`.
    pub fn from_flat(basis: MonomialBasis, k: usize, c: &[f64]) -> Result<Self> {
        let d = basis.len();
        if c.len() != k * d {
            return Err(Error::DimensionMismatch {
                context: "flat coefficient length",
                expected: k * d,
                found: c.len(),
            });
        }
        let coefficients = DMatrix::from_fn(k, d, |i, j| c[i * d + j]);
        Self::new(basis, coefficients)
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    /// Flat coefficient vector in objective-major order.
    pub fn flat_coefficients(&self) -> Vec<f64> {
        let (k, d) = self.coefficients.shape();
        let mut out = Vec::with_capacity(k * d);
        for i in 0..k {
            for j in 0..d {
                out.push(self.coefficients[(i, j)]);
            }
        }
        out
    }
}

/// Closed-form objectives, referenced by name.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticObjective {
    /// `(-3 x1 + x1^3 + x2^3, -3 x2 + x1^3 + x2^3)`; its critical set is the unit circle.
    Circle,
    /// `(-3 a^2 x1 + x1^3 + x2^3, -3 b^2 x2 + x1^3 + x2^3)`; critical set `x1^2/a^2 + x2^2/b^2 = 1`.
    Ellipse { a: f64, b: f64 },
    /// Expected value of the two-facility location problem:
    /// `(||x - (-1,-1)||^2, ||x - (1,0)||^2 + 1/3)`.
    LocationExpectation,
    /// The two-peak ridge problem: `-(s x1 + s b(x), -s x1 + s b(x))` with
    /// `s = sqrt(2)/2` and `b` a sum of two Gaussian bells.
    Lh22,
}

impl AnalyticObjective {
    /// Parse a registry reference such as `circle` or `ellipse(2,1)`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix("ellipse(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownObjective(name.to_string()))?;
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::UnknownObjective(name.to_string()));
            }
            let a: f64 = parts[0]
                .parse()
                .map_err(|_| Error::UnknownObjective(name.to_string()))?;
            let b: f64 = parts[1]
                .parse()
                .map_err(|_| Error::UnknownObjective(name.to_string()))?;
            if a <= 0.0 || b <= 0.0 {
                return Err(Error::InvalidArgument(
                    "ellipse semi-axes must be positive".into(),
                ));
            }
            return Ok(Self::Ellipse { a, b });
        }
        match name {
            "circle" => Ok(Self::Circle),
            "location-expectation" => Ok(Self::LocationExpectation),
            "lh22" => Ok(Self::Lh22),
            other => Err(Error::UnknownObjective(other.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Circle => "circle".into(),
            Self::Ellipse { a, b } => format!("ellipse({a},{b})"),
            Self::LocationExpectation => "location-expectation".into(),
            Self::Lh22 => "lh22".into(),
        }
    }
}

/// Gaussian bell `sqrt(2 pi / sigma) exp(-||x - p||^2 / sigma^2)`.
fn bell(x: &[f64], p: [f64; 2], sigma: f64) -> f64 {
    let dx = x[0] - p[0];
    let dy = x[1] - p[1];
    (2.0 * std::f64::consts::PI / sigma).sqrt() * (-(dx * dx + dy * dy) / (sigma * sigma)).exp()
}

fn bell_grad(x: &[f64], p: [f64; 2], sigma: f64) -> [f64; 2] {
    let g = bell(x, p, sigma);
    let s = -2.0 / (sigma * sigma);
    [s * g * (x[0] - p[0]), s * g * (x[1] - p[1])]
}

/// Ridge function of the two-peak problem.
pub fn lh22_ridge(x: &[f64]) -> f64 {
    0.2 * bell(x, [0.0, 0.0], 0.65) + 1.5 * bell(x, [0.0, -1.5], 2.8)
}

fn lh22_ridge_grad(x: &[f64]) -> [f64; 2] {
    let g1 = bell_grad(x, [0.0, 0.0], 0.65);
    let g2 = bell_grad(x, [0.0, -1.5], 2.8);
    [0.2 * g1[0] + 1.5 * g2[0], 0.2 * g1[1] + 1.5 * g2[1]]
}

impl ObjectiveVector {
    pub fn polynomial(basis: MonomialBasis, k: usize, flat: &[f64]) -> Result<Self> {
        Ok(Self::Polynomial(PolynomialObjective::from_flat(
            basis, k, flat,
        )?))
    }

    pub fn analytic(name: &str) -> Result<Self> {
        Ok(Self::Analytic(AnalyticObjective::from_name(name)?))
    }

    /// Number of decision variables.
    pub fn n(&self) -> usize {
        match self {
            Self::Polynomial(p) => p.basis.n(),
            Self::Analytic(_) => 2,
        }
    }

    /// Number of objectives.
    pub fn k(&self) -> usize {
        match self {
            Self::Polynomial(p) => p.coefficients.nrows(),
            Self::Analytic(_) => 2,
        }
    }

    /// Componentwise value at `x`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n());
        match self {
            Self::Polynomial(p) => {
                let values = p.basis.eval(x);
                let b = DVector::from_vec(values);
                let out = &p.coefficients * b;
                out.iter().copied().collect()
            }
            Self::Analytic(a) => {
                let s = std::f64::consts::SQRT_2 / 2.0;
                match a {
                    AnalyticObjective::Circle => {
                        let cubic = x[0].powi(3) + x[1].powi(3);
                        vec![-3.0 * x[0] + cubic, -3.0 * x[1] + cubic]
                    }
                    AnalyticObjective::Ellipse { a, b } => {
                        let cubic = x[0].powi(3) + x[1].powi(3);
                        vec![-3.0 * a * a * x[0] + cubic, -3.0 * b * b * x[1] + cubic]
                    }
                    AnalyticObjective::LocationExpectation => {
                        let d1 = (x[0] + 1.0).powi(2) + (x[1] + 1.0).powi(2);
                        let d2 = (x[0] - 1.0).powi(2) + x[1] * x[1];
                        vec![d1, d2 + 1.0 / 3.0]
                    }
                    AnalyticObjective::Lh22 => {
                        let b = lh22_ridge(x);
                        vec![-(s * x[0] + s * b), -(-s * x[0] + s * b)]
                    }
                }
            }
        }
    }

    /// Jacobian at `x`: `k` rows, `n` columns, row `i` is the gradient of `f_i`.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        debug_assert_eq!(x.len(), self.n());
        match self {
            Self::Polynomial(p) => {
                let grads = p.basis.eval_gradients(x); // n x d
                &p.coefficients * grads.transpose()
            }
            Self::Analytic(a) => {
                let s = std::f64::consts::SQRT_2 / 2.0;
                match a {
                    AnalyticObjective::Circle => DMatrix::from_row_slice(
                        2,
                        2,
                        &[
                            -3.0 + 3.0 * x[0] * x[0],
                            3.0 * x[1] * x[1],
                            3.0 * x[0] * x[0],
                            -3.0 + 3.0 * x[1] * x[1],
                        ],
                    ),
                    AnalyticObjective::Ellipse { a, b } => DMatrix::from_row_slice(
                        2,
                        2,
                        &[
                            -3.0 * a * a + 3.0 * x[0] * x[0],
                            3.0 * x[1] * x[1],
                            3.0 * x[0] * x[0],
                            -3.0 * b * b + 3.0 * x[1] * x[1],
                        ],
                    ),
                    AnalyticObjective::LocationExpectation => DMatrix::from_row_slice(
                        2,
                        2,
                        &[
                            2.0 + 2.0 * x[0],
                            2.0 + 2.0 * x[1],
                            -2.0 + 2.0 * x[0],
                            2.0 * x[1],
                        ],
                    ),
                    AnalyticObjective::Lh22 => {
                        let g = lh22_ridge_grad(x);
                        DMatrix::from_row_slice(
                            2,
                            2,
                            &[
                                -(s + s * g[0]),
                                -s * g[1],
                                -(-s + s * g[0]),
                                -s * g[1],
                            ],
                        )
                    }
                }
            }
        }
    }

    /// `||Df(x)^T alpha||_2`; rejects `alpha` outside the simplex slack.
    pub fn kkt_residual(&self, x: &[f64], alpha: &[f64]) -> Result<f64> {
        if alpha.len() != self.k() {
            return Err(Error::DimensionMismatch {
                context: "KKT vector length",
                expected: self.k(),
                found: alpha.len(),
            });
        }
        let sum: f64 = alpha.iter().sum();
        let min = alpha.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -ALPHA_NEG_TOL || (sum - 1.0).abs() > ALPHA_SUM_TOL {
            return Err(Error::AlphaOutsideSimplex {
                row: None,
                sum,
                min,
            });
        }
        let jt = self.jacobian(x).transpose(); // n x k
        let a = DVector::from_column_slice(alpha);
        Ok((jt * a).norm())
    }

    /// Global minimizer of `||Df(x)^T alpha||_2` over the simplex and its value.
    pub fn best_alpha(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        let g = self.jacobian(x).transpose(); // columns are the gradients
        simplex::min_simplex_combination(&g)
    }
}
