//! Assembly of the stacked homogeneous KKT system.
//!
//! For a data point `(x, alpha)` and a basis of size `d`, the block
//! `L(x, alpha)` is the `n x (k*d)` matrix
//! `(alpha_1 grad b_1(x), ..., alpha_1 grad b_d(x), alpha_2 grad b_1(x), ...)`,
//! so that `L(x, alpha) c = Df(x)^T alpha` for the objective vector built
//! from the coefficients `c`. Stacking one block per data point gives the
//! `(n*N) x (k*d)` system whose near-null vectors are the sought
//! coefficient vectors.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::basis::MonomialBasis;
use crate::dataset::{DataPoint, DataSet};
use crate::error::{Error, Result};

/// The stacked matrix with its dimension bookkeeping.
#[derive(Debug, Clone)]
pub struct KktSystem {
    matrix: DMatrix<f64>,
    n: usize,
    n_points: usize,
    k: usize,
    d: usize,
}

impl KktSystem {
    /// Wrap a raw matrix; the shape must equal `(n*n_points) x (k*d)`.
    pub fn from_matrix(
        matrix: DMatrix<f64>,
        n: usize,
        n_points: usize,
        k: usize,
        d: usize,
    ) -> Result<Self> {
        if matrix.nrows() != n * n_points {
            return Err(Error::DimensionMismatch {
                context: "KKT system rows",
                expected: n * n_points,
                found: matrix.nrows(),
            });
        }
        if matrix.ncols() != k * d {
            return Err(Error::DimensionMismatch {
                context: "KKT system columns",
                expected: k * d,
                found: matrix.ncols(),
            });
        }
        Ok(Self {
            matrix,
            n,
            n_points,
            k,
            d,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Single block `L(x, alpha)` of shape `n x (k*d)`.
pub fn assemble_block(point: &DataPoint, k: usize, basis: &MonomialBasis) -> Result<DMatrix<f64>> {
    if point.x.len() != basis.n() {
        return Err(Error::DimensionMismatch {
            context: "data point dimension vs basis",
            expected: basis.n(),
            found: point.x.len(),
        });
    }
    if point.alpha.len() != k {
        return Err(Error::DimensionMismatch {
            context: "KKT vector length",
            expected: k,
            found: point.alpha.len(),
        });
    }
    let n = basis.n();
    let d = basis.len();
    let grads = basis.eval_gradients(&point.x);
    let mut block = DMatrix::zeros(n, k * d);
    for (i, &a) in point.alpha.iter().enumerate() {
        if a == 0.0 {
            continue; // keep the zero columns exact
        }
        for j in 0..d {
            for r in 0..n {
                block[(r, i * d + j)] = a * grads[(r, j)];
            }
        }
    }
    Ok(block)
}

/// Stack the per-point blocks in data order.
pub fn assemble_system(data: &DataSet, basis: &MonomialBasis) -> Result<KktSystem> {
    if data.n() != basis.n() {
        return Err(Error::DimensionMismatch {
            context: "data set dimension vs basis",
            expected: basis.n(),
            found: data.n(),
        });
    }
    let n = basis.n();
    let d = basis.len();
    let k = data.k();
    let blocks: Vec<Result<DMatrix<f64>>> = data
        .points()
        .par_iter()
        .map(|p| assemble_block(p, k, basis))
        .collect();
    let mut matrix = DMatrix::zeros(n * data.len(), k * d);
    for (j, block) in blocks.into_iter().enumerate() {
        let block = block?;
        matrix.rows_mut(j * n, n).copy_from(&block);
    }
    KktSystem::from_matrix(matrix, n, data.len(), k, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DataPoint;
    use nalgebra::DVector;

    fn circle_coefficients() -> Vec<f64> {
        vec![
            -3.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, // f1
            0.0, 0.0, 1.0, -3.0, 0.0, 0.0, 0.0, 0.0, 1.0, // f2
        ]
    }

    #[test]
    fn single_objective_unit_weight_reproduces_gradients() {
        let basis = MonomialBasis::new(2, 2).unwrap();
        let p = DataPoint::new(vec![0.3, -1.2], vec![1.0]).unwrap();
        let block = assemble_block(&p, 1, &basis).unwrap();
        let grads = basis.eval_gradients(&p.x);
        assert_eq!(block, grads);
    }

    #[test]
    fn simplex_vertex_zeroes_the_other_block() {
        let basis = MonomialBasis::new(2, 2).unwrap();
        let d = basis.len();
        let p = DataPoint::new(vec![0.7, 0.1], vec![0.0, 1.0]).unwrap();
        let block = assemble_block(&p, 2, &basis).unwrap();
        let grads = basis.eval_gradients(&p.x);
        for j in 0..d {
            for r in 0..2 {
                assert_eq!(block[(r, j)], 0.0);
                assert_eq!(block[(r, d + j)], grads[(r, j)]);
            }
        }
    }

    #[test]
    fn circle_point_annihilates_the_known_coefficients() {
        let basis = MonomialBasis::new(2, 3).unwrap();
        let p = DataPoint::new(vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        let block = assemble_block(&p, 2, &basis).unwrap();
        let c = DVector::from_vec(circle_coefficients());
        let out = &block * &c;
        assert!(out.amax() <= 1e-12, "residual {}", out.amax());
    }

    #[test]
    fn system_shape_is_rows_by_columns() {
        let basis = MonomialBasis::new(2, 2).unwrap();
        let points = vec![DataPoint::new(vec![0.1, 0.2], vec![0.5, 0.5]).unwrap()];
        let data = DataSet::new(2, 2, points).unwrap();
        let sys = assemble_system(&data, &basis).unwrap();
        assert_eq!(sys.nrows(), 2);
        assert_eq!(sys.ncols(), 10);
    }

    #[test]
    fn block_rows_appear_in_data_order() {
        let basis = MonomialBasis::new(2, 2).unwrap();
        let p1 = DataPoint::new(vec![0.4, -0.3], vec![0.2, 0.8]).unwrap();
        let p2 = DataPoint::new(vec![-1.1, 0.6], vec![0.9, 0.1]).unwrap();
        let data = DataSet::new(2, 2, vec![p1.clone(), p2.clone()]).unwrap();
        let sys = assemble_system(&data, &basis).unwrap();
        let b1 = assemble_block(&p1, 2, &basis).unwrap();
        let b2 = assemble_block(&p2, 2, &basis).unwrap();
        assert_eq!(sys.matrix().rows(0, 2).clone_owned(), b1);
        assert_eq!(sys.matrix().rows(2, 2).clone_owned(), b2);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let basis = MonomialBasis::new(3, 2).unwrap();
        let p = DataPoint::new(vec![0.1, 0.2], vec![1.0]).unwrap();
        assert!(assemble_block(&p, 1, &basis).is_err());
    }
}
