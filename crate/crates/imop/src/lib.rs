//! Inverse multiobjective optimization: construct an objective vector whose
//! Pareto critical set contains (or best approximates) a given set of
//! decision points with KKT vectors, and verify the result by recomputing
//! critical sets.
//!
//! The pipeline in one paragraph: expand each candidate objective in a
//! monomial basis, write the KKT conditions of every data point as linear
//! equations in the basis coefficients, stack them into one homogeneous
//! system and take its smallest singular directions. The smallest singular
//! value measures how well the data can be made Pareto critical at all; the
//! matching right-singular vectors are coefficient vectors of concrete
//! objective functions realizing that bound.
//!
//! Entry points:
//! - [`generators`] builds data sets (exact circles/ellipses/segments,
//!   scalarized and sampled problems).
//! - [`solver::solve_inverse`] runs the inference end to end.
//! - [`critical::grid_scan`] recomputes critical sets for verification,
//!   [`critical::hausdorff`] compares point clouds.
//! - [`alpha::estimate_kkt_vectors`] recovers KKT vectors from a plain
//!   Pareto-front approximation when none are given.
//!
//! Each capability has a runnable demonstration under `examples/`; the
//! `imop` binary wires the same calls into a small file-based CLI.

pub mod alpha;
pub mod basis;
pub mod cli;
pub mod critical;
pub mod dataset;
pub mod error;
pub mod generators;
pub mod kkt;
pub mod objective;
pub mod simplex;
pub mod solver;

pub use basis::{BasisSpec, MonomialBasis, MultiIndex};
pub use dataset::{DataPoint, DataSet};
pub use error::{Error, Result};
pub use kkt::{assemble_block, assemble_system, KktSystem};
pub use objective::{AnalyticObjective, ObjectiveVector, PolynomialObjective};
pub use solver::{
    solve_inverse, InverseSolution, Normalization, SolveOptions, SvdSpectrum, ThresholdRule,
};
