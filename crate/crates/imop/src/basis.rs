//! Monomial basis in `n` variables up to a maximal total degree.
//!
//! The basis spans the polynomials without constant term; gradients are
//! evaluated analytically so that downstream matrix assembly is exact to
//! floating-point precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent tuple of a single monomial `x_1^{l_1} ... x_n^{l_n}`.
///
/// The total degree is always at least 1 (the constant monomial is excluded).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Value of the monomial at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.exponents.len());
        self.exponents
            .iter()
            .zip(x)
            .map(|(&l, &xi)| xi.powi(l as i32))
            .product()
    }

    /// Analytic gradient of the monomial at `x`, written into `out`.
    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.exponents.len());
        debug_assert_eq!(out.len(), self.exponents.len());
        for i in 0..x.len() {
            let li = self.exponents[i];
            if li == 0 {
                out[i] = 0.0;
                continue;
            }
            // l_i * x_i^{l_i - 1} * prod_{m != i} x_m^{l_m}
            let mut v = li as f64 * x[i].powi(li as i32 - 1);
            for (m, (&lm, &xm)) in self.exponents.iter().zip(x).enumerate() {
                if m != i {
                    v *= xm.powi(lm as i32);
                }
            }
            out[i] = v;
        }
    }
}

/// Ordered set of all non-constant monomials in `n` variables with total
/// degree at most `max_degree`.
///
/// The order is canonical: indices are sorted ascending by the reversed
/// exponent tuple (last variable most significant). For two variables this
/// yields `x1, x1^2, ..., x2, x1 x2, ...`, so coefficient vectors map
/// position-for-position onto the usual hand-written listings.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    n: usize,
    max_degree: u32,
    indices: Vec<MultiIndex>,
}

/// Serialized form of a basis specification; the index order is implied by
/// the canonical rule and never stored.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BasisSpec {
    pub n: usize,
    pub max_degree: u32,
}

impl MonomialBasis {
    /// Enumerate the basis for `n >= 1` variables up to `max_degree >= 1`.
    ///
    /// The resulting size is `C(n + max_degree, n) - 1`.
    pub fn new(n: usize, max_degree: u32) -> Result<Self> {
        if n == 0 || max_degree == 0 {
            return Err(Error::InvalidBasisParams {
                n,
                max_degree: max_degree as usize,
            });
        }
        let mut indices = Vec::new();
        let mut exponents = vec![0u32; n];
        enumerate(&mut exponents, 0, max_degree, &mut indices);
        // Reversed-tuple lexicographic order, ascending.
        indices.sort_by(|a, b| {
            a.exponents
                .iter()
                .rev()
                .cmp(b.exponents.iter().rev())
        });
        Ok(Self {
            n,
            max_degree,
            indices,
        })
    }

    pub fn from_spec(spec: BasisSpec) -> Result<Self> {
        Self::new(spec.n, spec.max_degree)
    }

    pub fn spec(&self) -> BasisSpec {
        BasisSpec {
            n: self.n,
            max_degree: self.max_degree,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Number of basis functions `d`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Values of all basis functions at `x` (length `d`).
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        self.indices.iter().map(|idx| idx.eval(x)).collect()
    }

    /// Gradient matrix at `x`: `n` rows, `d` columns, column `j` is the
    /// analytic gradient of the `j`-th basis function.
    pub fn eval_gradients(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        debug_assert_eq!(x.len(), self.n);
        let d = self.len();
        let mut out = nalgebra::DMatrix::zeros(self.n, d);
        let mut grad = vec![0.0; self.n];
        for (j, idx) in self.indices.iter().enumerate() {
            idx.gradient_into(x, &mut grad);
            for i in 0..self.n {
                out[(i, j)] = grad[i];
            }
        }
        out
    }

    /// Human-readable name of basis function `j`, e.g. `x1^2*x2`.
    pub fn monomial_name(&self, j: usize) -> String {
        let mut parts = Vec::new();
        for (i, &l) in self.indices[j].exponents().iter().enumerate() {
            match l {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                _ => parts.push(format!("x{}^{}", i + 1, l)),
            }
        }
        parts.join("*")
    }
}

fn enumerate(exponents: &mut Vec<u32>, pos: usize, budget: u32, out: &mut Vec<MultiIndex>) {
    if pos == exponents.len() {
        if exponents.iter().any(|&l| l > 0) {
            out.push(MultiIndex {
                exponents: exponents.clone(),
            });
        }
        return;
    }
    for l in 0..=budget {
        exponents[pos] = l;
        enumerate(exponents, pos + 1, budget - l, out);
    }
    exponents[pos] = 0;
}
