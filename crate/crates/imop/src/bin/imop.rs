use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use imop::cli::{
    cmd_estimate_alpha, cmd_eval, cmd_generate, cmd_infer, cmd_sweep, cmd_verify,
    EstimateAlphaConfig, EvalConfig, GenerateConfig, GeneratorSpec, InferConfig, SweepConfig,
    VerifyConfig, VerifyReference,
};

#[derive(Parser)]
#[command(
    name = "imop",
    about = "Construct multiobjective problems whose Pareto critical sets match given data"
)]
struct Cli {
    /// RNG seed for generators that draw randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress progress output on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DimArgs {
    /// Decision-space dimension (defaults to the data sidecar).
    #[arg(long)]
    n: Option<usize>,
    /// Number of objectives (defaults to the data sidecar).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a data CSV (plus sidecar) from a named generator:
    /// circle | ellipse | three-lines | saa-location | scalarize:<objective>
    Generate {
        name: String,
        /// Number of points (circle/ellipse), weights (saa-location,
        /// scalarize).
        #[arg(long, default_value_t = 1000)]
        n_points: usize,
        /// Ellipse semi-axis along x1.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Ellipse semi-axis along x2.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Points per segment (three-lines).
        #[arg(long, default_value_t = 500)]
        per_segment: usize,
        /// Samples per scalarization (saa-location).
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Start points per weight (scalarize).
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Infer an objective vector from a data CSV and write the model JSON.
    Infer {
        data: PathBuf,
        #[command(flatten)]
        dims: DimArgs,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        /// Explicit singular-value threshold; omitted = largest-gap rule.
        #[arg(long)]
        threshold: Option<f64>,
        /// Span weights over the selected vectors, comma separated.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Advance past coefficient vectors that ignore a variable.
        #[arg(long)]
        skip_degenerate: bool,
        /// Keep the raw span combination (valid only on an exact null space).
        #[arg(long)]
        raw: bool,
        /// Reject bases with more coefficients than KKT equations.
        #[arg(long)]
        guard_overfit: bool,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write the singular spectrum as index,value CSV.
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Smallest singular value per basis degree, written as CSV.
    Sweep {
        data: PathBuf,
        #[command(flatten)]
        dims: DimArgs,
        /// Inclusive degree range, e.g. 1..7.
        #[arg(long, default_value = "1..7")]
        degrees: String,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Scan a model's critical set on a grid and compare against a reference.
    Verify {
        model: PathBuf,
        /// Box as lo1,hi1,lo2,hi2,... (one pair per variable).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        bounds: Vec<f64>,
        #[arg(long, default_value_t = 301)]
        resolution: usize,
        /// Keep grid nodes with best KKT residual at or below this.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        /// Reference data CSV to filter/compare against.
        #[arg(long)]
        reference_data: Option<PathBuf>,
        /// Analytic reference objective, scanned on the same grid.
        #[arg(long)]
        reference_analytic: Option<String>,
        /// Scan tolerance for the analytic reference (defaults to --tol).
        #[arg(long)]
        reference_tol: Option<f64>,
        /// Drop components further than this from every reference data point.
        #[arg(long)]
        filter_radius: Option<f64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Estimate KKT vectors from a Pareto-front CSV.
    EstimateAlpha {
        front: PathBuf,
        /// Number of objective columns.
        #[arg(long)]
        k: usize,
        /// Number of decision columns following the objectives, if any.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 3)]
        neighborhood: usize,
        #[arg(long, short)]
        out: PathBuf,
        /// File for flagged points (default: <out>.rejects).
        #[arg(long)]
        rejects: Option<PathBuf>,
    },
    /// Evaluate a model on a points CSV: values, Jacobians, best KKT vectors.
    Eval {
        model: PathBuf,
        points: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn parse_degree_range(text: &str) -> Result<Vec<u32>, String> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| format!("bad degree {lo}"))?;
        let hi: u32 = hi.trim().parse().map_err(|_| format!("bad degree {hi}"))?;
        if lo == 0 || hi < lo {
            return Err(format!("empty degree range {text}"));
        }
        Ok((lo..=hi).collect())
    } else {
        let single: u32 = text
            .trim()
            .parse()
            .map_err(|_| format!("bad degree list {text}"))?;
        Ok(vec![single])
    }
}

fn pair_up(bounds: &[f64]) -> Result<Vec<(f64, f64)>, String> {
    if bounds.is_empty() || bounds.len() % 2 != 0 {
        return Err("--bounds needs an even, nonzero number of values".into());
    }
    Ok(bounds.chunks(2).map(|c| (c[0], c[1])).collect())
}

fn run(cli: Cli) -> imop::Result<()> {
    let seed = cli.seed;
    let quiet = cli.quiet;
    match cli.command {
        Command::Generate {
            name,
            n_points,
            a,
            b,
            per_segment,
            samples,
            starts,
            out,
        } => {
            let spec =
                GeneratorSpec::from_name(&name, n_points, a, b, per_segment, samples, starts)?;
            cmd_generate(&GenerateConfig {
                spec,
                out,
                seed,
                quiet,
            })?;
        }
        Command::Infer {
            data,
            dims,
            max_degree,
            threshold,
            weights,
            skip_degenerate,
            raw,
            guard_overfit,
            out,
            spectrum,
        } => {
            let dims = imop::cli::resolve_dims(&data, dims.n, dims.k)?;
            cmd_infer(&InferConfig {
                data,
                dims,
                max_degree,
                threshold,
                weights,
                skip_degenerate,
                raw_coefficient: raw,
                guard_overfit,
                out,
                spectrum_out: spectrum,
                quiet,
            })?;
        }
        Command::Sweep {
            data,
            dims,
            degrees,
            out,
        } => {
            let degrees =
                parse_degree_range(&degrees).map_err(imop::Error::InvalidArgument)?;
            let dims = imop::cli::resolve_dims(&data, dims.n, dims.k)?;
            cmd_sweep(&SweepConfig {
                data,
                dims,
                degrees,
                out,
                quiet,
            })?;
        }
        Command::Verify {
            model,
            bounds,
            resolution,
            tol,
            reference_data,
            reference_analytic,
            reference_tol,
            filter_radius,
            out,
        } => {
            let bounds = pair_up(&bounds).map_err(imop::Error::InvalidArgument)?;
            let reference = match (reference_data, reference_analytic) {
                (Some(path), None) => VerifyReference::DataFile(path),
                (None, Some(name)) => VerifyReference::Analytic(name),
                (None, None) => VerifyReference::None,
                _ => {
                    return Err(imop::Error::InvalidArgument(
                        "give at most one of --reference-data / --reference-analytic".into(),
                    ))
                }
            };
            cmd_verify(&VerifyConfig {
                model,
                bounds,
                resolution,
                tol,
                reference,
                reference_tol,
                filter_radius,
                cloud_out: out,
                quiet,
            })?;
        }
        Command::EstimateAlpha {
            front,
            k,
            n,
            neighborhood,
            out,
            rejects,
        } => {
            let rejects = rejects.or_else(|| {
                let mut os = out.as_os_str().to_owned();
                os.push(".rejects");
                Some(PathBuf::from(os))
            });
            cmd_estimate_alpha(&EstimateAlphaConfig {
                front,
                k,
                n,
                neighborhood,
                out,
                rejects_out: rejects,
                quiet,
            })?;
        }
        Command::Eval { model, points, out } => {
            cmd_eval(&EvalConfig {
                model,
                points,
                out,
                quiet,
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
