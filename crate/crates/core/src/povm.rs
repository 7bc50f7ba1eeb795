//! Positive operator-valued measures induced by tight probabilistic
//! frames.
//!
//! A tight measure μ turns any partition of its support into a family of
//! PSD matrices `F(A) = (N/M₂²) Σ_{i∈A} wᵢ φᵢφᵢᵀ` summing to the identity.
//! Partitions here are index-set partitions of the discrete support — the
//! faithful finite restriction of Borel partitions, and the only
//! computable one for point masses.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::DiscreteMeasure;
use crate::operators::{frame_bounds, DEFAULT_TIGHT_TOL};

/// Completeness tolerance: the cells must sum to I within this Frobenius
/// distance.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// PSD tolerance: smallest admissible cell eigenvalue.
pub const CELL_PSD_TOL: f64 = -1e-10;

/// One cell of the atlas: the indices it covers and its moment matrix.
#[derive(Debug, Clone)]
pub struct PovmCell {
    pub label: String,
    pub matrix: DMatrix<f64>,
}

/// A finite POVM: one PSD matrix per partition cell, summing to I.
#[derive(Debug, Clone)]
pub struct PovmAtlas {
    cells: Vec<PovmCell>,
}

impl PovmAtlas {
    pub fn new(cells: Vec<PovmCell>) -> Self {
        Self { cells }
    }

    pub fn cells(&self) -> &[PovmCell] {
        &self.cells
    }

    pub fn dim(&self) -> usize {
        self.cells.first().map_or(0, |c| c.matrix.nrows())
    }

    /// Sum of all cell matrices.
    pub fn total(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut sum = DMatrix::zeros(n, n);
        for c in &self.cells {
            sum += &c.matrix;
        }
        sum
    }
}

/// Outcome of [`validate_povm`]: overall verdict plus one line per
/// violated condition.
#[derive(Debug, Clone)]
pub struct PovmValidation {
    pub passed: bool,
    pub diagnostics: Vec<String>,
}

fn check_partition(partition: &[Vec<usize>], support: usize) -> Result<()> {
    let mut seen = vec![false; support];
    for (c, cell) in partition.iter().enumerate() {
        if cell.is_empty() {
            return Err(Error::InvalidPartition(format!("cell {c} is empty")));
        }
        for &i in cell {
            if i >= support {
                return Err(Error::InvalidPartition(format!(
                    "cell {c} references point {i}, support has {support}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidPartition(format!(
                    "point {i} appears in more than one cell"
                )));
            }
            seen[i] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidPartition(format!(
            "point {missing} is not covered by any cell"
        )));
    }
    Ok(())
}

/// Builds the POVM of a tight discrete measure over an index partition of
/// its support.
///
/// Rejects non-tight measures: the scaling `N/M₂²` yields `F(R^N) = I`
/// only when the frame operator is a multiple of the identity. Degenerate
/// measures (`A = 0`) are rejected as rank-deficient.
pub fn build_povm(measure: &DiscreteMeasure, partition: &[Vec<usize>]) -> Result<PovmAtlas> {
    let bounds = frame_bounds(&measure.clone().into(), DEFAULT_TIGHT_TOL);
    if !bounds.tight {
        return Err(Error::NotTight {
            lower: bounds.lower,
            upper: bounds.upper,
        });
    }
    let n = measure.dim();
    if bounds.lower <= 0.0 {
        return Err(Error::RankDeficient { rank: 0, dim: n });
    }
    check_partition(partition, measure.len())?;

    let scale = n as f64 / measure.second_moment();
    let cells = partition
        .iter()
        .map(|cell| {
            let mut matrix = DMatrix::zeros(n, n);
            for &i in cell {
                matrix.syger(
                    scale * measure.weights()[i],
                    &measure.points()[i],
                    &measure.points()[i],
                    1.0,
                );
            }
            matrix.fill_upper_triangle_with_lower_triangle();
            let label = cell
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",");
            PovmCell { label, matrix }
        })
        .collect();
    Ok(PovmAtlas::new(cells))
}

/// Checks the POVM conditions at finite-partition scale: every cell PSD,
/// cells summing to the identity. Violations come back as diagnostics
/// rather than errors.
pub fn validate_povm(atlas: &PovmAtlas) -> PovmValidation {
    let mut diagnostics = Vec::new();
    let n = atlas.dim();
    if n == 0 {
        return PovmValidation {
            passed: false,
            diagnostics: vec!["atlas has no cells".into()],
        };
    }
    for cell in atlas.cells() {
        if cell.matrix.nrows() != n || cell.matrix.ncols() != n {
            diagnostics.push(format!("cell {} is not {n}x{n}", cell.label));
            continue;
        }
        let asym = linalg::asymmetry(&cell.matrix);
        if asym > 1e-12 {
            diagnostics.push(format!("cell {} not symmetric (dev {asym:e})", cell.label));
        }
        let (vals, _) = linalg::sym_eigen(&cell.matrix);
        let min = vals[n - 1];
        if min < CELL_PSD_TOL {
            diagnostics.push(format!(
                "cell {} not PSD (min eigenvalue {min:e})",
                cell.label
            ));
        }
    }
    let completeness = linalg::frobenius_distance(&atlas.total(), &DMatrix::identity(n, n));
    if completeness > COMPLETENESS_TOL {
        diagnostics.push(format!(
            "completeness: cells sum to I within {completeness:e}, over {COMPLETENESS_TOL:e}"
        ));
    }
    PovmValidation {
        passed: diagnostics.is_empty(),
        diagnostics,
    }
}
