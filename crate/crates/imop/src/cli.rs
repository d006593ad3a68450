//! Typed command implementations behind the `imop` binary: data generation,
//! inference, degree sweeps, verification scans, KKT-vector estimation and
//! pointwise evaluation. Everything works through plain CSV/JSON files so
//! runs can be scripted and plotted with any external tool.

use std::fs;
use std::path::{Path, PathBuf};

use crate::alpha::{estimate_kkt_vectors, FrontCloud, FrontEstimate};
use crate::basis::MonomialBasis;
use crate::critical::{
    cluster_components, filter_near_data, grid_scan, hausdorff, save_cloud, GridSpec,
    DEFAULT_NODE_BUDGET,
};
use crate::dataset::{load_sidecar, DataSet};
use crate::error::{Error, Result};
use crate::generators::{
    gen_circle, gen_ellipse, gen_saa_location, gen_scalarized_dataset, gen_three_lines,
    seeded_starts, DescentOptions, SaaConfig,
};
use crate::objective::ObjectiveVector;
use crate::solver::{
    solve_inverse, write_spectrum_csv, ModelFile, Normalization, SolveOptions, ThresholdRule,
};

/// Print to stdout unless quiet mode is on.
macro_rules! say {
    ($quiet:expr, $($arg:tt)*) => {
        if !$quiet {
            println!($($arg)*);
        }
    };
}

/// Which generator to run and with what parameters.
#[derive(Debug, Clone)]
pub enum GeneratorSpec {
    Circle { n_points: usize },
    Ellipse { a: f64, b: f64, n_points: usize },
    ThreeLines { per_segment: usize },
    SaaLocation { samples: usize, count: usize },
    Scalarize { objective: String, weights: usize, starts: usize },
}

impl GeneratorSpec {
    /// Parse the CLI-facing name: `circle`, `ellipse`, `three-lines`,
    /// `saa-location` or `scalarize:<objective-name>`.
    pub fn from_name(
        name: &str,
        n_points: usize,
        a: f64,
        b: f64,
        per_segment: usize,
        samples: usize,
        starts: usize,
    ) -> Result<Self> {
        if let Some(objective) = name.strip_prefix("scalarize:") {
            return Ok(Self::Scalarize {
                objective: objective.to_string(),
                weights: n_points,
                starts,
            });
        }
        match name {
            "circle" => Ok(Self::Circle { n_points }),
            "ellipse" => Ok(Self::Ellipse { a, b, n_points }),
            "three-lines" => Ok(Self::ThreeLines { per_segment }),
            "saa-location" => Ok(Self::SaaLocation {
                samples,
                count: n_points,
            }),
            other => Err(Error::UnknownGenerator(other.to_string())),
        }
    }
}

pub struct GenerateConfig {
    pub spec: GeneratorSpec,
    pub out: PathBuf,
    pub seed: u64,
    pub quiet: bool,
}

/// Generate a data set, write the CSV plus its JSON sidecar.
pub fn cmd_generate(config: &GenerateConfig) -> Result<DataSet> {
    let (data, provenance, excluded) = match &config.spec {
        GeneratorSpec::Circle { n_points } => {
            (gen_circle(*n_points)?, format!("circle N={n_points}"), vec![])
        }
        GeneratorSpec::Ellipse { a, b, n_points } => (
            gen_ellipse(*a, *b, *n_points)?,
            format!("ellipse a={a} b={b} N={n_points}"),
            vec![],
        ),
        GeneratorSpec::ThreeLines { per_segment } => (
            gen_three_lines(*per_segment)?,
            format!("three-lines per-segment={per_segment}"),
            vec![],
        ),
        GeneratorSpec::SaaLocation { samples, count } => {
            let result = gen_saa_location(&SaaConfig {
                sample_count: *samples,
                scalarization_count: *count,
                seed: config.seed,
                descent: DescentOptions::default(),
            })?;
            (
                result.data,
                format!("saa-location Ns={samples} count={count}"),
                result.excluded_weights,
            )
        }
        GeneratorSpec::Scalarize {
            objective,
            weights,
            starts,
        } => {
            let f = ObjectiveVector::analytic(objective)?;
            let bounds = vec![(-2.0, 2.0); f.n()];
            let start_points = seeded_starts(&bounds, *starts, config.seed);
            let result =
                gen_scalarized_dataset(&f, *weights, &start_points, &DescentOptions::default())?;
            (
                result.data,
                format!("scalarize:{objective} weights={weights}"),
                result.excluded_weights,
            )
        }
    };
    data.save(&config.out)?;
    data.save_sidecar(&config.out, Some(provenance), Some(config.seed))?;
    say!(
        config.quiet,
        "wrote {} points (n={}, k={}) to {}",
        data.len(),
        data.n(),
        data.k(),
        config.out.display()
    );
    if !excluded.is_empty() {
        eprintln!("excluded {} non-converged weights: {:?}", excluded.len(), excluded);
    }
    Ok(data)
}

pub struct InferConfig {
    pub data: PathBuf,
    pub dims: Option<(usize, usize)>,
    pub max_degree: u32,
    pub threshold: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub skip_degenerate: bool,
    pub raw_coefficient: bool,
    pub guard_overfit: bool,
    pub out: PathBuf,
    pub spectrum_out: Option<PathBuf>,
    pub quiet: bool,
}

/// Run the inverse solve on a data file; writes the model JSON and
/// optionally the spectrum CSV, and prints the leading singular values,
/// the selected set and any degeneracy flags.
pub fn cmd_infer(config: &InferConfig) -> Result<ModelFile> {
    let data = DataSet::load(&config.data, config.dims)?;
    let basis = MonomialBasis::new(data.n(), config.max_degree)?;
    let options = SolveOptions {
        threshold: match config.threshold {
            Some(value) => ThresholdRule::Explicit(value),
            None => ThresholdRule::LargestGap,
        },
        weights: config.weights.clone(),
        skip_degenerate: config.skip_degenerate,
        normalization: if config.raw_coefficient {
            Normalization::Raw
        } else {
            Normalization::Unit
        },
        enforce_overfit_guard: config.guard_overfit,
        ..Default::default()
    };
    let solution = solve_inverse(&data, &basis, &options)?;
    let model = ModelFile::from_solution(&solution);
    model.save(&config.out)?;
    if let Some(spectrum_out) = &config.spectrum_out {
        write_spectrum_csv(solution.spectrum.values(), spectrum_out)?;
    }

    let shown = solution.spectrum.len().min(10);
    let leading: Vec<String> = (0..shown)
        .map(|i| format!("s{}={:.3e}", i + 1, solution.spectrum.value(i)))
        .collect();
    say!(config.quiet, "{}", leading.join("  "));
    say!(
        config.quiet,
        "selected I = {{1..{}}} at threshold {:.3e}",
        solution.selected.len(),
        solution.threshold
    );
    if solution.overfit {
        eprintln!(
            "warning: k*d = {} exceeds n*N = {}; every data set is exactly representable at this size",
            solution.spectrum.len(),
            solution.n * data.len()
        );
    }
    if solution.is_degenerate() {
        let vars: Vec<String> = solution
            .flagged_variables
            .iter()
            .map(|v| format!("x{}", v + 1))
            .collect();
        eprintln!(
            "warning: chosen objective does not depend on {}; its critical set will be degenerate",
            vars.join(", ")
        );
    }
    say!(config.quiet, "model written to {}", config.out.display());
    Ok(model)
}

pub struct SweepConfig {
    pub data: PathBuf,
    pub dims: Option<(usize, usize)>,
    pub degrees: Vec<u32>,
    pub out: PathBuf,
    pub quiet: bool,
}

/// Smallest singular value per basis degree, as `degree,smallest` CSV.
pub fn cmd_sweep(config: &SweepConfig) -> Result<Vec<(u32, f64)>> {
    let data = DataSet::load(&config.data, config.dims)?;
    let sweep = crate::solver::degree_sweep(&data, &config.degrees)?;
    let mut out = String::from("degree,smallest_singular_value\n");
    for (degree, s) in &sweep {
        out.push_str(&format!("{degree},{s}\n"));
        say!(config.quiet, "degree {degree}: s1 = {s:.3e}");
    }
    fs::write(&config.out, out)?;
    Ok(sweep)
}

/// What to compare a scanned cloud against.
pub enum VerifyReference {
    None,
    /// Decision points from a data CSV.
    DataFile(PathBuf),
    /// Critical cloud of a named analytic objective, scanned on the same grid.
    Analytic(String),
}

pub struct VerifyConfig {
    pub model: PathBuf,
    pub bounds: Vec<(f64, f64)>,
    pub resolution: usize,
    pub tol: f64,
    pub reference: VerifyReference,
    /// Scan tolerance for the analytic reference; defaults to `tol`.
    pub reference_tol: Option<f64>,
    /// Keep only components within this radius of the data (requires a
    /// data-file reference).
    pub filter_radius: Option<f64>,
    pub cloud_out: PathBuf,
    pub quiet: bool,
}

pub struct VerifyReport {
    pub component_count: usize,
    pub component_sizes: Vec<usize>,
    pub hausdorff: Option<f64>,
    pub retained_points: usize,
}

/// Scan the model's critical set on a grid, cluster it, optionally filter
/// it against a data set and measure the Hausdorff distance to a reference.
pub fn cmd_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    let model = ModelFile::load(&config.model)?;
    let objective = model.objective()?;
    let grid = GridSpec::square(config.bounds.clone(), config.resolution)?;
    let mut cloud = grid_scan(&objective, &grid, config.tol, DEFAULT_NODE_BUDGET)?;

    let mut reference_positions: Option<Vec<Vec<f64>>> = None;
    match &config.reference {
        VerifyReference::None => {}
        VerifyReference::DataFile(path) => {
            let data = DataSet::load(path, Some((model.n, model.k)))?;
            if let Some(radius) = config.filter_radius {
                cloud = filter_near_data(&cloud, &data, radius)?;
            }
            reference_positions =
                Some(data.points().iter().map(|p| p.x.clone()).collect());
        }
        VerifyReference::Analytic(name) => {
            let reference = ObjectiveVector::analytic(name)?;
            let ref_tol = config.reference_tol.unwrap_or(config.tol);
            let ref_cloud = grid_scan(&reference, &grid, ref_tol, DEFAULT_NODE_BUDGET)?;
            reference_positions = Some(ref_cloud.positions());
        }
    }

    let labeling = cluster_components(&cloud.positions(), 2.0 * grid.max_spacing())?;
    save_cloud(&cloud, &labeling, &config.cloud_out)?;

    let distance = match &reference_positions {
        Some(reference) if !cloud.is_empty() && !reference.is_empty() => {
            Some(hausdorff(&cloud.positions(), reference)?)
        }
        _ => None,
    };

    let report = VerifyReport {
        component_count: labeling.component_count,
        component_sizes: labeling.component_sizes(),
        hausdorff: distance,
        retained_points: cloud.len(),
    };
    say!(
        config.quiet,
        "retained {} points in {} components (sizes {:?})",
        report.retained_points,
        report.component_count,
        report.component_sizes
    );
    if let Some(d) = report.hausdorff {
        say!(config.quiet, "hausdorff distance to reference: {d:.4e}");
    }
    say!(config.quiet, "cloud written to {}", config.cloud_out.display());
    Ok(report)
}

pub struct EstimateAlphaConfig {
    pub front: PathBuf,
    pub k: usize,
    /// Decision-point columns following the image columns, when present.
    pub n: Option<usize>,
    pub neighborhood: usize,
    pub out: PathBuf,
    pub rejects_out: Option<PathBuf>,
    pub quiet: bool,
}

/// Estimate KKT vectors from a front CSV (k image columns, then optional
/// decision columns); writes the standard data CSV ready for inference,
/// and flagged points to a separate rejects file.
pub fn cmd_estimate_alpha(config: &EstimateAlphaConfig) -> Result<usize> {
    let text = fs::read_to_string(&config.front)?;
    let mut image_points = Vec::new();
    let mut decision_points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let expected = config.k + config.n.unwrap_or(0);
        if fields.len() != expected {
            return Err(Error::MalformedRow {
                row: lineno + 1,
                detail: format!("expected {} columns, found {}", expected, fields.len()),
            });
        }
        let values: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        let mut values = values.map_err(|_| Error::MalformedRow {
            row: lineno + 1,
            detail: "cannot parse number".into(),
        })?;
        let decision = values.split_off(config.k);
        image_points.push(values);
        decision_points.push(decision);
    }
    let front = FrontCloud {
        image_points,
        decision_points: config.n.map(|_| decision_points.clone()),
    };
    let estimates = estimate_kkt_vectors(&front, config.neighborhood)?;

    let mut accepted = String::new();
    let mut rejects = String::new();
    let mut kept = 0usize;
    for (i, estimate) in estimates.iter().enumerate() {
        match estimate {
            FrontEstimate::Alpha(alpha) => {
                // emit decision point when linked, otherwise the image point
                let location: &[f64] = match &front.decision_points {
                    Some(d) => &d[i],
                    None => &front.image_points[i],
                };
                let row: Vec<String> = location
                    .iter()
                    .chain(alpha.iter())
                    .map(|v| format!("{v}"))
                    .collect();
                accepted.push_str(&row.join(","));
                accepted.push('\n');
                kept += 1;
            }
            FrontEstimate::Flagged(reason) => {
                rejects.push_str(&format!("# point {}: {}\n", i + 1, reason));
            }
        }
    }
    fs::write(&config.out, accepted)?;
    if let Some(path) = &config.rejects_out {
        fs::write(path, rejects)?;
    }
    say!(
        config.quiet,
        "estimated {} of {} points; output in {}",
        kept,
        estimates.len(),
        config.out.display()
    );
    Ok(kept)
}

pub struct EvalConfig {
    pub model: PathBuf,
    pub points: PathBuf,
    pub out: PathBuf,
    pub quiet: bool,
}

/// Evaluate a model on a CSV of decision points: values, Jacobian entries,
/// best KKT vector and its residual per point.
pub fn cmd_eval(config: &EvalConfig) -> Result<usize> {
    let model = ModelFile::load(&config.model)?;
    let objective = model.objective()?;
    let text = fs::read_to_string(&config.points)?;
    let mut out = String::new();
    let mut count = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() < model.n {
            return Err(Error::MalformedRow {
                row: lineno + 1,
                detail: format!("expected at least {} columns", model.n),
            });
        }
        let x: std::result::Result<Vec<f64>, _> =
            fields[..model.n].iter().map(|f| f.parse::<f64>()).collect();
        let x = x.map_err(|_| Error::MalformedRow {
            row: lineno + 1,
            detail: "cannot parse coordinate".into(),
        })?;
        let value = objective.eval(&x);
        let jac = objective.jacobian(&x);
        let (alpha, residual) = objective.best_alpha(&x)?;
        let mut fields: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
        fields.extend(value.iter().map(|v| format!("{v}")));
        for i in 0..jac.nrows() {
            for j in 0..jac.ncols() {
                fields.push(format!("{}", jac[(i, j)]));
            }
        }
        fields.extend(alpha.iter().map(|v| format!("{v}")));
        fields.push(format!("{residual}"));
        out.push_str(&fields.join(","));
        out.push('\n');
        count += 1;
    }
    fs::write(&config.out, out)?;
    say!(
        config.quiet,
        "evaluated {count} points; output in {}",
        config.out.display()
    );
    Ok(count)
}

/// Resolve dimensions from explicit flags or a sidecar.
pub fn resolve_dims(path: &Path, n: Option<usize>, k: Option<usize>) -> Result<Option<(usize, usize)>> {
    match (n, k) {
        (Some(n), Some(k)) => Ok(Some((n, k))),
        (None, None) => {
            let side = load_sidecar(path)?;
            Ok(Some((side.n, side.k)))
        }
        _ => Err(Error::InvalidArgument(
            "give both --n and --k, or neither (sidecar lookup)".into(),
        )),
    }
}
