//! Inverse solver: minimize `||L c||_2` over unit coefficient vectors via
//! SVD, select the near-null directions under a threshold, compose a
//! coefficient vector and rebuild the objective vector it represents.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::MonomialBasis;
use crate::dataset::DataSet;
use crate::error::{Error, Result};
use crate::kkt::{assemble_system, KktSystem};
use crate::objective::{ObjectiveVector, PolynomialObjective};

/// Default absolute floor below which a singular value counts as zero.
pub const ZERO_ATOL: f64 = 1e-12;
/// Default relative floor (times the largest singular value).
pub const ZERO_RTOL: f64 = 1e-10;
/// Variables whose strongest coefficient stays below this are flagged.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Full singular spectrum of a stacked KKT system: all `k*d` singular values
/// in ascending order with matching orthonormal right-singular vectors.
///
/// When the system has fewer rows than columns the spectrum is completed
/// with exact zeros whose vectors span the remaining null space.
#[derive(Debug, Clone)]
pub struct SvdSpectrum {
    values: Vec<f64>,
    /// Column `i` is the right-singular vector for `values[i]`.
    vectors: DMatrix<f64>,
}

impl SvdSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).clone_owned()
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("spectrum is never empty")
    }

    /// `s_i <= max(atol, rtol * s_max)`.
    pub fn is_numerically_zero(&self, i: usize, atol: f64, rtol: f64) -> bool {
        self.values[i] <= atol.max(rtol * self.max_value())
    }

    pub fn count_numerically_zero(&self, atol: f64, rtol: f64) -> usize {
        (0..self.len())
            .take_while(|&i| self.is_numerically_zero(i, atol, rtol))
            .count()
    }

    /// Orthogonal projection of `c` onto the span of the selected vectors,
    /// together with the norm of the rejected remainder.
    pub fn project_onto(&self, c: &DVector<f64>, selected: &[usize]) -> (DVector<f64>, f64) {
        let mut proj = DVector::zeros(c.len());
        for &i in selected {
            let v = self.vectors.column(i);
            proj += v * v.dot(c);
        }
        let residual = (c - &proj).norm();
        (proj, residual)
    }
}

/// Compute the ascending singular spectrum of the system, padding an
/// underdetermined system with exact zeros and an orthonormal completion of
/// the null space.
pub fn svd_spectrum(system: &KktSystem) -> Result<SvdSpectrum> {
    let rows = system.nrows();
    let cols = system.ncols();
    let svd = system
        .matrix()
        .clone()
        .try_svd(false, true, f64::EPSILON, 100_000)
        .ok_or(Error::SvdFailed { rows, cols })?;
    let v_t = svd.v_t.expect("right-singular vectors were requested");
    let computed = svd.singular_values.len();

    let mut pairs: Vec<(f64, DVector<f64>)> = (0..computed)
        .map(|i| (svd.singular_values[i], v_t.row(i).transpose()))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("singular values are finite"));

    if cols > computed {
        let mut basis: Vec<DVector<f64>> = pairs.iter().map(|(_, v)| v.clone()).collect();
        let padding = complete_orthonormal(&mut basis, cols)?;
        let mut padded: Vec<(f64, DVector<f64>)> =
            padding.into_iter().map(|v| (0.0, v)).collect();
        padded.extend(pairs);
        pairs = padded;
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("singular values are finite"));
    }

    let values: Vec<f64> = pairs.iter().map(|(s, _)| *s).collect();
    let mut vectors = DMatrix::zeros(cols, cols);
    for (i, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(i, v);
    }
    Ok(SvdSpectrum { values, vectors })
}

/// Extend `basis` (orthonormal vectors of length `dim`) to a full orthonormal
/// basis, returning only the added vectors.
fn complete_orthonormal(basis: &mut Vec<DVector<f64>>, dim: usize) -> Result<Vec<DVector<f64>>> {
    let needed = dim - basis.len();
    let mut added = Vec::with_capacity(needed);
    for seed in 0..dim {
        if added.len() == needed {
            break;
        }
        let mut w: DVector<f64> = DVector::zeros(dim);
        w[seed] = 1.0;
        // two orthogonalization passes keep the completion orthonormal to
        // machine precision even for nearly dependent seeds
        for _ in 0..2 {
            for v in basis.iter().chain(added.iter()) {
                let d = v.dot(&w);
                w -= v * d;
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            added.push(w / norm);
        }
    }
    if added.len() != needed {
        return Err(Error::SvdFailed {
            rows: basis.len(),
            cols: dim,
        });
    }
    Ok(added)
}

/// Maximal prefix of indices whose singular value lies at or below the
/// threshold. May be empty; the caller decides whether that is an error.
pub fn select_indices(spectrum: &SvdSpectrum, threshold: f64) -> Vec<usize> {
    (0..spectrum.len())
        .take_while(|&i| spectrum.value(i) <= threshold)
        .collect()
}

/// Length of the prefix chosen by the largest-gap heuristic: the cut where
/// `s_{i+1} / max(s_i, atol)` is largest. Mechanizes the visual "obvious
/// gap" selection; an explicit threshold always overrides it.
pub fn largest_gap_prefix(values: &[f64], atol: f64) -> usize {
    if values.len() <= 1 {
        return values.len();
    }
    let mut best_len = 1;
    let mut best_ratio = f64::NEG_INFINITY;
    for i in 1..values.len() {
        let ratio = values[i] / values[i - 1].max(atol);
        if ratio > best_ratio {
            best_ratio = ratio;
            best_len = i;
        }
    }
    best_len
}

/// How the coefficient vector is scaled after composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Scale to unit Euclidean norm (the default).
    Unit,
    /// Keep the raw combination; only valid when the largest selected
    /// singular value is numerically zero.
    Raw,
}

/// Compose `c = sum_j lambda_j v_{I_j}` from the selected vectors.
pub fn compose_coefficient(
    spectrum: &SvdSpectrum,
    selected: &[usize],
    weights: &[f64],
    normalization: Normalization,
) -> Result<DVector<f64>> {
    if selected.is_empty() {
        return Err(Error::NoSolutionUnderThreshold {
            threshold: 0.0,
            smallest: spectrum.value(0),
        });
    }
    if weights.len() != selected.len() {
        return Err(Error::WeightCountMismatch {
            expected: selected.len(),
            found: weights.len(),
        });
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::ZeroWeights);
    }
    let mut c = DVector::zeros(spectrum.len());
    for (&i, &w) in selected.iter().zip(weights) {
        c += spectrum.vector(i) * w;
    }
    match normalization {
        Normalization::Unit => {
            let norm = c.norm();
            if norm == 0.0 {
                return Err(Error::ZeroWeights);
            }
            Ok(c / norm)
        }
        Normalization::Raw => {
            let worst = selected
                .iter()
                .map(|&i| spectrum.value(i))
                .fold(0.0f64, f64::max);
            if !spectrum.is_numerically_zero(
                *selected.iter().max().expect("nonempty"),
                ZERO_ATOL,
                ZERO_RTOL,
            ) {
                return Err(Error::RawCoefficientNotNull { value: worst });
            }
            Ok(c)
        }
    }
}

/// Map a flat coefficient vector back to the objective vector it encodes.
pub fn reconstruct_objective(
    c: &[f64],
    basis: &MonomialBasis,
    k: usize,
) -> Result<PolynomialObjective> {
    PolynomialObjective::from_flat(basis.clone(), k, c)
}

/// Strongest absolute coefficient attached to each variable, over all
/// monomials (in any objective) in which the variable appears.
pub fn variable_dependence(objective: &PolynomialObjective) -> Vec<f64> {
    let basis = objective.basis();
    let coeffs = objective.coefficients();
    let mut dependence = vec![0.0f64; basis.n()];
    for (j, idx) in basis.indices().iter().enumerate() {
        for (v, &e) in idx.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            for i in 0..coeffs.nrows() {
                dependence[v] = dependence[v].max(coeffs[(i, j)].abs());
            }
        }
    }
    dependence
}

/// Threshold selection rule for the near-null prefix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// Accept every singular value at or below this value.
    Explicit(f64),
    /// Cut at the largest relative gap in the ascending spectrum.
    LargestGap,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub threshold: ThresholdRule,
    /// Span weights over the selected index set; `None` picks a single
    /// singular vector (the first, or the first non-degenerate one when
    /// `skip_degenerate` is set).
    pub weights: Option<Vec<f64>>,
    /// Advance past candidate vectors whose objective ignores a variable.
    pub skip_degenerate: bool,
    pub normalization: Normalization,
    pub degeneracy_tol: f64,
    /// Reject bases violating `d <= n*N/k`; off by default because exact
    /// underdetermined interpolation is a supported use.
    pub enforce_overfit_guard: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            threshold: ThresholdRule::LargestGap,
            weights: None,
            skip_degenerate: false,
            normalization: Normalization::Unit,
            degeneracy_tol: DEGENERACY_TOL,
            enforce_overfit_guard: false,
        }
    }
}

/// Outcome of the full inverse solve.
#[derive(Debug, Clone)]
pub struct InverseSolution {
    pub n: usize,
    pub k: usize,
    pub max_degree: u32,
    pub spectrum: SvdSpectrum,
    /// Resolved threshold value.
    pub threshold: f64,
    /// Ascending prefix of selected singular-value indices (0-based).
    pub selected: Vec<usize>,
    /// Index of the singular vector used for the default choice, when no
    /// explicit weights were given.
    pub chosen_index: Option<usize>,
    pub coefficient: DVector<f64>,
    pub objective: PolynomialObjective,
    /// Per-variable dependence of the chosen objective.
    pub variable_dependence: Vec<f64>,
    /// Variables with dependence at or below the degeneracy tolerance.
    pub flagged_variables: Vec<usize>,
    /// True when `d > n*N/k` held for this solve.
    pub overfit: bool,
}

impl InverseSolution {
    pub fn is_degenerate(&self) -> bool {
        !self.flagged_variables.is_empty()
    }

    /// Upper bound guaranteed for `||Df(x)^T alpha||` on every data point:
    /// the largest selected singular value.
    pub fn residual_bound(&self) -> f64 {
        self.selected
            .iter()
            .map(|&i| self.spectrum.value(i))
            .fold(0.0f64, f64::max)
    }
}

fn dependence_flags(dep: &[f64], tol: f64) -> Vec<usize> {
    dep.iter()
        .enumerate()
        .filter(|(_, &d)| d <= tol)
        .map(|(v, _)| v)
        .collect()
}

/// End-to-end inverse solve on a data set.
pub fn solve_inverse(
    data: &DataSet,
    basis: &MonomialBasis,
    options: &SolveOptions,
) -> Result<InverseSolution> {
    let k = data.k();
    let d = basis.len();
    let rows = basis.n() * data.len();
    let overfit = k * d > rows;
    if overfit && options.enforce_overfit_guard {
        return Err(Error::OverfittingRisk {
            d,
            limit: rows / k,
            n: basis.n(),
            n_points: data.len(),
            k,
        });
    }

    let system = assemble_system(data, basis)?;
    let spectrum = svd_spectrum(&system)?;

    let threshold = match options.threshold {
        ThresholdRule::Explicit(value) => value,
        ThresholdRule::LargestGap => {
            let prefix = largest_gap_prefix(spectrum.values(), ZERO_ATOL);
            spectrum.value(prefix - 1)
        }
    };
    let mut selected = select_indices(&spectrum, threshold);
    if selected.is_empty() {
        return Err(Error::NoSolutionUnderThreshold {
            threshold,
            smallest: spectrum.value(0),
        });
    }

    let (coefficient, chosen_index) = match &options.weights {
        Some(weights) => (
            compose_coefficient(&spectrum, &selected, weights, options.normalization)?,
            None,
        ),
        None => {
            let chosen = if options.skip_degenerate {
                pick_non_degenerate(&spectrum, basis, k, options.degeneracy_tol)?
            } else {
                0
            };
            // mirror the convention of keeping the whole ascending prefix
            // through the chosen vector in the reported selection
            if chosen >= selected.len() {
                selected = (0..=chosen).collect();
            }
            let c = compose_coefficient(
                &spectrum,
                &[chosen],
                &[1.0],
                options.normalization,
            )?;
            (c, Some(chosen))
        }
    };

    let objective = reconstruct_objective(coefficient.as_slice(), basis, k)?;
    let dependence = variable_dependence(&objective);
    let flagged = dependence_flags(&dependence, options.degeneracy_tol);

    Ok(InverseSolution {
        n: basis.n(),
        k,
        max_degree: basis.max_degree(),
        spectrum,
        threshold,
        selected,
        chosen_index,
        coefficient,
        objective,
        variable_dependence: dependence,
        flagged_variables: flagged,
        overfit,
    })
}

fn pick_non_degenerate(
    spectrum: &SvdSpectrum,
    basis: &MonomialBasis,
    k: usize,
    tol: f64,
) -> Result<usize> {
    for i in 0..spectrum.len() {
        let v = spectrum.vector(i);
        let objective = reconstruct_objective(v.as_slice(), basis, k)?;
        let dep = variable_dependence(&objective);
        if dependence_flags(&dep, tol).is_empty() {
            return Ok(i);
        }
    }
    Err(Error::InvalidArgument(
        "every singular vector yields a degenerate objective".into(),
    ))
}

/// Smallest singular value of the system assembled at each degree.
pub fn degree_sweep(data: &DataSet, degrees: &[u32]) -> Result<Vec<(u32, f64)>> {
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("degree list is empty".into()));
    }
    let mut out = Vec::with_capacity(degrees.len());
    for &degree in degrees {
        let basis = MonomialBasis::new(data.n(), degree)?;
        let system = assemble_system(data, &basis)?;
        let spectrum = svd_spectrum(&system)?;
        out.push((degree, spectrum.value(0)));
    }
    Ok(out)
}

/// On-disk model: exactly the quantities needed to rebuild the objective.
/// `selected` indices are stored 1-based, matching the printed spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub k: usize,
    pub max_degree: u32,
    pub singular_values: Vec<f64>,
    pub selected: Vec<usize>,
    pub coefficients: Vec<f64>,
}

impl ModelFile {
    pub fn from_solution(solution: &InverseSolution) -> Self {
        Self {
            n: solution.n,
            k: solution.k,
            max_degree: solution.max_degree,
            singular_values: solution.spectrum.values().to_vec(),
            selected: solution.selected.iter().map(|i| i + 1).collect(),
            coefficients: solution.coefficient.iter().copied().collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Rebuild the polynomial objective encoded by the model.
    pub fn objective(&self) -> Result<ObjectiveVector> {
        let basis = MonomialBasis::new(self.n, self.max_degree)?;
        ObjectiveVector::polynomial(basis, self.k, &self.coefficients)
    }
}

/// Write a two-column `index,value` CSV of a spectrum (1-based indices).
pub fn write_spectrum_csv(values: &[f64], path: &Path) -> Result<()> {
    let mut out = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, v));
    }
    fs::write(path, out)?;
    Ok(())
}
