//! `pframes`: probabilistic-frame computations from the command line.
//!
//! Every command reads measures (JSON, or CSV point lists), runs one
//! library operation, and emits a single JSON document on stdout — except
//! the heatmap export, which emits CSV. Diagnostics go to stderr only.
//! Exit codes: 0 success, 2 invalid input, 3 mathematical precondition
//! violated, 4 non-convergence.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DVector;

use pframes::constructions::{convolve, density_grid, mix_with_delta0, product_measure};
use pframes::error::Error;
use pframes::estimation::{
    bingham_statistic, mc_verify_random_frame, tyler_iterate, RowSpec, TYLER_MAX_ITER, TYLER_TOL,
};
use pframes::io;
use pframes::operators::{
    canonical_dual, canonical_tight, frame_bounds, frame_operator, is_probabilistic_frame,
    DEFAULT_TIGHT_TOL,
};
use pframes::potential::{frame_potential, is_spherical_2design, mixed_potential_ratio};
use pframes::povm::{build_povm, validate_povm};
use pframes::transport::wasserstein2;
use pframes::{DiscreteMeasure, Measure};

use report::*;

#[derive(Parser)]
#[command(
    name = "pframes",
    version,
    about = "Probabilistic frames: operators, transport, potentials, and statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the output document to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Treat the last CSV column as point weights when ingesting CSV.
    #[arg(long, global = true)]
    csv_weights: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Frame-theoretic report: moments, rank, bounds, spectrum.
    Analyze {
        input: PathBuf,
        /// Relative tolerance for the tightness verdict.
        #[arg(long, default_value_t = DEFAULT_TIGHT_TOL)]
        tol: f64,
    },
    /// Canonical dual measure of a discrete frame.
    Dual { input: PathBuf },
    /// Canonical tight transform of a discrete frame.
    Tighten { input: PathBuf },
    /// Probabilistic frame potential and its lower bounds.
    Potential { input: PathBuf },
    /// Spherical 2-design check with moment diagnostics.
    DesignCheck {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Exact squared 2-Wasserstein distance between two discrete measures.
    Distance {
        a: PathBuf,
        b: PathBuf,
        /// Include the optimal coupling matrix in the report.
        #[arg(long)]
        plan: bool,
    },
    /// Convolution of two measures.
    Convolve {
        a: PathBuf,
        b: PathBuf,
        /// Emit a CSV density grid instead of the measure: "grid=K,range=R".
        #[arg(long)]
        heatmap: Option<String>,
    },
    /// Mix a measure with δ₀: (1−eps)·μ + eps·δ₀.
    Mix {
        input: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Product measure on the direct sum of the two spaces.
    Product { a: PathBuf, b: PathBuf },
    /// Tyler's M-estimator on unit-norm points (CSV rows or a JSON measure).
    Tyler {
        input: PathBuf,
        #[arg(long, default_value_t = TYLER_TOL)]
        tol: f64,
        #[arg(long, default_value_t = TYLER_MAX_ITER)]
        max_iter: usize,
    },
    /// Bingham scatter statistic of unit-norm points.
    Bingham { input: PathBuf },
    /// Monte Carlo check of the random analysis-operator deviation.
    McVerify {
        /// Row distribution: bernoulli, gaussian, acg, or frame.
        #[arg(long)]
        spec: String,
        /// Ambient dimension N.
        #[arg(long)]
        n: usize,
        /// Rows M of the analysis matrix.
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        /// Master seed; defaults to PFRAMES_SEED or 0.
        #[arg(long, env = "PFRAMES_SEED", default_value_t = 0)]
        seed: u64,
        /// Shape matrix JSON for --spec acg.
        #[arg(long)]
        gamma: Option<PathBuf>,
        /// Measure file for --spec frame.
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// POVM of a tight discrete measure over an index partition.
    Povm {
        input: PathBuf,
        /// Partition cells as index lists: "0,1|2,3".
        #[arg(long)]
        cells: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(document) => {
            let payload = if document.ends_with('\n') {
                document
            } else {
                document + "\n"
            };
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, payload) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{payload}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 2 = invalid input, 3 = mathematical precondition violated,
/// 4 = non-convergence.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. } => 4,
        Error::RankDeficient { .. }
        | Error::NotTight { .. }
        | Error::OffSphere { .. }
        | Error::NoZeroMeanFactor { .. }
        | Error::NotSpanning { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotPositiveDefinite
        | Error::UnsupportedPair(_) => 3,
        _ => 2,
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn load_measure(path: &Path, csv_weights: bool) -> Result<Measure, Error> {
    if is_csv(path) {
        Ok(io::measure_from_csv(fs::File::open(path)?, csv_weights)?.into())
    } else {
        io::measure_from_json(&fs::read_to_string(path)?)
    }
}

fn load_discrete(path: &Path, csv_weights: bool) -> Result<DiscreteMeasure, Error> {
    match load_measure(path, csv_weights)? {
        Measure::Discrete(m) => Ok(m),
        Measure::Mixture(_) => Err(Error::UnsupportedPair(
            "this command is defined for discrete measures only",
        )),
    }
}

fn load_points(path: &Path) -> Result<Vec<DVector<f64>>, Error> {
    if is_csv(path) {
        let (points, _) = io::points_from_csv(fs::File::open(path)?, false)?;
        Ok(points)
    } else {
        Ok(load_discrete(path, false)?.points().to_vec())
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize")
}

fn parse_heatmap(spec: &str) -> Result<(usize, f64), Error> {
    let mut grid = None;
    let mut range = None;
    for part in spec.split(',') {
        match part.split_once('=') {
            Some(("grid", v)) => {
                grid = Some(
                    v.parse::<usize>()
                        .map_err(|e| Error::Schema(format!("bad grid value {v:?}: {e}")))?,
                );
            }
            Some(("range", v)) => {
                range = Some(
                    v.parse::<f64>()
                        .map_err(|e| Error::Schema(format!("bad range value {v:?}: {e}")))?,
                );
            }
            _ => {
                return Err(Error::Schema(format!(
                    "bad heatmap component {part:?}, expected grid=K,range=R"
                )))
            }
        }
    }
    match (grid, range) {
        (Some(g), Some(r)) => Ok((g, r)),
        _ => Err(Error::Schema(
            "heatmap needs both grid=K and range=R".into(),
        )),
    }
}

fn parse_cells(spec: &str) -> Result<Vec<Vec<usize>>, Error> {
    spec.split('|')
        .map(|cell| {
            cell.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::InvalidPartition(format!("bad index {s:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn parse_spec(
    name: &str,
    gamma: Option<&Path>,
    measure: Option<&Path>,
    csv_weights: bool,
) -> Result<RowSpec, Error> {
    match name {
        "bernoulli" => Ok(RowSpec::Bernoulli),
        "gaussian" => Ok(RowSpec::Gaussian),
        "acg" => {
            let path = gamma
                .ok_or_else(|| Error::Schema("--spec acg needs --gamma <matrix.json>".into()))?;
            Ok(RowSpec::Acg(io::matrix_from_json(&fs::read_to_string(
                path,
            )?)?))
        }
        "frame" => {
            let path = measure
                .ok_or_else(|| Error::Schema("--spec frame needs --measure <file>".into()))?;
            Ok(RowSpec::DiscreteFrame(load_discrete(path, csv_weights)?))
        }
        other => Err(Error::Schema(format!(
            "unknown spec {other:?}: expected bernoulli, gaussian, acg, or frame"
        ))),
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    let csv_weights = cli.csv_weights;
    match cli.command {
        Command::Analyze { input, tol } => {
            let measure = load_measure(&input, csv_weights)?;
            let op = frame_operator(&measure);
            Ok(to_json(&AnalyzeReport {
                dim: measure.dim(),
                kind: match measure {
                    Measure::Discrete(_) => "discrete",
                    Measure::Mixture(_) => "mixture",
                },
                second_moment: measure.second_moment(),
                fourth_moment: measure.fourth_moment(),
                mean: measure.mean().iter().copied().collect(),
                support_rank: measure.support_rank(),
                is_frame: is_probabilistic_frame(&measure),
                bounds: frame_bounds(&measure, tol),
                eigenvalues: op.eigenvalues().iter().copied().collect(),
                frame_operator: io::matrix_rows(op.matrix()),
            }))
        }
        Command::Dual { input } => {
            let dual = canonical_dual(&load_discrete(&input, csv_weights)?)?;
            Ok(io::measure_to_json(&dual.into()))
        }
        Command::Tighten { input } => {
            let tight = canonical_tight(&load_discrete(&input, csv_weights)?)?;
            Ok(io::measure_to_json(&tight.into()))
        }
        Command::Potential { input } => {
            let measure = load_discrete(&input, csv_weights)?;
            Ok(to_json(&PotentialCommandReport {
                dim: measure.dim(),
                potential: frame_potential(&measure),
            }))
        }
        Command::DesignCheck { input, tol } => {
            let measure = load_discrete(&input, csv_weights)?;
            let op = frame_operator(&measure.clone().into());
            let n = measure.dim();
            let target = nalgebra::DMatrix::from_diagonal_element(n, n, 1.0 / n as f64);
            let max_norm_deviation = measure
                .points()
                .iter()
                .zip(measure.weights())
                .filter(|(_, &w)| w > 0.0)
                .map(|(p, _)| (p.norm() - 1.0).abs())
                .fold(0.0f64, f64::max);
            Ok(to_json(&DesignReport {
                dim: n,
                is_design: is_spherical_2design(&measure, tol),
                tolerance: tol,
                max_norm_deviation,
                mean_norm: measure.mean().norm(),
                operator_deviation: pframes::linalg::frobenius_distance(op.matrix(), &target),
                mixed_potential_ratio: mixed_potential_ratio(&measure).ok(),
            }))
        }
        Command::Distance { a, b, plan } => {
            let a = load_discrete(&a, csv_weights)?;
            let b = load_discrete(&b, csv_weights)?;
            let solution = wasserstein2(&a, &b)?;
            Ok(to_json(&DistanceReport {
                dim: a.dim(),
                cost: solution.cost(),
                plan: plan.then(|| io::matrix_rows(solution.coupling())),
            }))
        }
        Command::Convolve { a, b, heatmap } => {
            let a = load_measure(&a, csv_weights)?;
            let b = load_measure(&b, csv_weights)?;
            let conv = convolve(&a, &b)?;
            match heatmap {
                None => Ok(io::measure_to_json(&conv)),
                Some(spec) => {
                    let (grid, range) = parse_heatmap(&spec)?;
                    let mixture = conv.as_mixture().ok_or(Error::UnsupportedPair(
                        "heatmap export needs a mixture result (convolve with a Gaussian)",
                    ))?;
                    let mut csv = String::from("x,y,density\n");
                    for (x, y, d) in density_grid(mixture, grid, range)? {
                        csv.push_str(&format!("{x},{y},{d}\n"));
                    }
                    Ok(csv)
                }
            }
        }
        Command::Mix { input, eps } => {
            let measure = load_measure(&input, csv_weights)?;
            Ok(io::measure_to_json(&mix_with_delta0(&measure, eps)?))
        }
        Command::Product { a, b } => {
            let a = load_measure(&a, csv_weights)?;
            let b = load_measure(&b, csv_weights)?;
            Ok(io::measure_to_json(&product_measure(&a, &b)?))
        }
        Command::Tyler {
            input,
            tol,
            max_iter,
        } => {
            let points = load_points(&input)?;
            let result = tyler_iterate(&points, tol, max_iter)?;
            Ok(to_json(&TylerReport {
                dim: result.gamma_hat.nrows(),
                points: points.len(),
                iterations: result.iterations,
                residual: result.residual,
                gamma_hat: io::matrix_rows(&result.gamma_hat),
                tight_frame: serde_json::from_str(&io::measure_to_json(
                    &result.tight_frame.into(),
                ))?,
            }))
        }
        Command::Bingham { input } => {
            let points = load_points(&input)?;
            let statistic = bingham_statistic(&points)?;
            Ok(to_json(&statistic))
        }
        Command::McVerify {
            spec,
            n,
            m,
            trials,
            seed,
            gamma,
            measure,
        } => {
            let row_spec = parse_spec(&spec, gamma.as_deref(), measure.as_deref(), csv_weights)?;
            let report = mc_verify_random_frame(&row_spec, m, n, trials, seed)?;
            Ok(to_json(&McCommandReport {
                spec,
                rows: m,
                dim: n,
                estimate: report.estimate,
                std_error: report.std_error,
                theory: report.theory,
                trials: report.trials,
                seed: report.seed,
            }))
        }
        Command::Povm { input, cells } => {
            let measure = load_discrete(&input, csv_weights)?;
            let partition = parse_cells(&cells)?;
            let atlas = build_povm(&measure, &partition)?;
            let verdict = validate_povm(&atlas);
            Ok(to_json(&PovmReport {
                dim: atlas.dim(),
                cells: atlas
                    .cells()
                    .iter()
                    .map(|c| PovmCellReport {
                        label: c.label.clone(),
                        matrix: io::matrix_rows(&c.matrix),
                    })
                    .collect(),
                valid: verdict.passed,
                diagnostics: verdict.diagnostics,
            }))
        }
    }
}
