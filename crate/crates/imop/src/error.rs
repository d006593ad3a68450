use thiserror::Error;

/// Errors produced by the inverse-MOP pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid basis parameters: n = {n}, max_degree = {max_degree} (both must be >= 1)")]
    InvalidBasisParams { n: usize, max_degree: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("KKT vector outside the standard simplex{}: sum = {sum}, min component = {min}", row_context(.row))]
    AlphaOutsideSimplex {
        row: Option<usize>,
        sum: f64,
        min: f64,
    },

    #[error("malformed data row {row}: {detail}")]
    MalformedRow { row: usize, detail: String },

    #[error("data set is empty{}", if .context.is_empty() { String::new() } else { format!(" ({})", .context) })]
    EmptyDataSet { context: String },

    #[error("SVD did not converge on a {rows}x{cols} matrix")]
    SvdFailed { rows: usize, cols: usize },

    #[error("no singular value lies at or below the threshold {threshold:.3e} (smallest is {smallest:.3e})")]
    NoSolutionUnderThreshold { threshold: f64, smallest: f64 },

    #[error("coefficient weights must not be all zero")]
    ZeroWeights,

    #[error("weight vector has {found} entries but the selected index set has {expected}")]
    WeightCountMismatch { expected: usize, found: usize },

    #[error(
        "skipping the normalization of c is only valid when the largest selected \
         singular value is numerically zero (got {value:.3e})"
    )]
    RawCoefficientNotNull { value: f64 },

    #[error(
        "basis too large for the data: d = {d} basis functions exceed n*N/k = {limit} \
         ({n} variables, {n_points} points, {k} objectives); reduce the degree or add data"
    )]
    OverfittingRisk {
        d: usize,
        limit: usize,
        n: usize,
        n_points: usize,
        k: usize,
    },

    #[error("grid of {nodes} nodes exceeds the budget of {budget}")]
    GridBudgetExceeded { nodes: usize, budget: usize },

    #[error("{context} requires a nonempty point set")]
    EmptyPointSet { context: &'static str },

    #[error("simplex minimization supports at most 6 objectives, got {k}")]
    TooManyObjectives { k: usize },

    #[error("unknown analytic objective \"{0}\"")]
    UnknownObjective(String),

    #[error("front has {got} points but at least {needed} are required")]
    InsufficientFront { needed: usize, got: usize },

    #[error("all {attempted} scalarized subproblems failed to converge")]
    AllScalarizationsFailed { attempted: usize },

    #[error("unknown generator \"{0}\"")]
    UnknownGenerator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn row_context(row: &Option<usize>) -> String {
    match row {
        Some(r) => format!(" (row {r})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
