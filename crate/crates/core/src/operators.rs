//! Frame operator, Gram matrix, frame bounds, and the canonical dual and
//! canonical tight transforms.
//!
//! The frame operator of a measure μ is the N×N matrix of second moments
//! `m_{i,j}(μ) = ∫ xⁱ xʲ dμ(x)`; its quadratic form evaluates
//! `∫|⟨x,y⟩|² dμ(y)`, so its extreme eigenvalues are the optimal frame
//! bounds.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{DiscreteMeasure, Measure};

/// Default relative tolerance for declaring frame bounds equal.
pub const DEFAULT_TIGHT_TOL: f64 = 1e-8;

/// The matrix of second moments of a measure, with its spectral
/// decomposition attached.
#[derive(Debug, Clone)]
pub struct FrameOperator {
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl FrameOperator {
    fn from_matrix(raw: DMatrix<f64>) -> Self {
        let matrix = linalg::symmetrized(&raw);
        let (eigenvalues, eigenvectors) = linalg::sym_eigen(&matrix);
        Self {
            matrix,
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthogonal eigenvector matrix, columns aligned with [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Number of eigenvalues above the relative rank threshold.
    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.eigenvalues, linalg::RANK_REL_TOL)
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    fn spectral_inverse_map(&self, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let rank = self.rank();
        if rank < dim {
            return Err(Error::RankDeficient { rank, dim });
        }
        Ok(linalg::spectral_map(
            &self.eigenvalues,
            &self.eigenvectors,
            f,
        ))
    }

    /// `S⁻¹` from the eigendecomposition; rejects rank-deficient operators.
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.spectral_inverse_map(|l| 1.0 / l)
    }

    /// `S^{-1/2}` from the eigendecomposition; rejects rank-deficient operators.
    pub fn inverse_sqrt(&self) -> Result<DMatrix<f64>> {
        self.spectral_inverse_map(|l| 1.0 / l.sqrt())
    }
}

/// Optimal constants of the frame inequality, with a tightness verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
    pub tolerance: f64,
}

/// The weighted M×M inner-product matrix `√(wᵢwⱼ)⟨φᵢ,φⱼ⟩` of a discrete
/// measure; shares its nonzero spectrum with the frame operator.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    matrix: DMatrix<f64>,
}

impl GramMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> DVector<f64> {
        linalg::sym_eigen(&self.matrix).0
    }
}

/// The matrix of second moments `m_{i,j}(μ)` with spectral decomposition.
///
/// Discrete measures contribute `Σ wᵢ φᵢφᵢᵀ`; mixture components contribute
/// `w_k (Σ_k + m_k m_kᵀ)`.
pub fn frame_operator(measure: &Measure) -> FrameOperator {
    let n = measure.dim();
    let mut s = DMatrix::zeros(n, n);
    match measure {
        Measure::Discrete(m) => {
            for (p, w) in m.points().iter().zip(m.weights()) {
                s.syger(*w, p, p, 1.0);
            }
        }
        Measure::Mixture(m) => {
            for c in m.components() {
                s += c.weight * &c.covariance;
                s.syger(c.weight, &c.mean, &c.mean, 1.0);
            }
        }
    }
    // syger fills one triangle; mirror it before decomposing.
    s.fill_upper_triangle_with_lower_triangle();
    FrameOperator::from_matrix(s)
}

/// Optimal frame bounds `A = λ_min(S_μ)`, `B = λ_max(S_μ)`.
///
/// `A = 0` signals that the measure is not a probabilistic frame. The
/// tightness verdict is `B − A ≤ tolerance · max(B, 1)`.
pub fn frame_bounds(measure: &Measure, tolerance: f64) -> FrameBounds {
    bounds_of(&frame_operator(measure), tolerance)
}

pub(crate) fn bounds_of(op: &FrameOperator, tolerance: f64) -> FrameBounds {
    let n = op.dim();
    // The operator is PSD; eigenvalues only go negative through round-off.
    let upper = op.eigenvalues()[0].max(0.0);
    let lower = op.eigenvalues()[n - 1].max(0.0);
    FrameBounds {
        lower,
        upper,
        tight: (upper - lower) <= tolerance * upper.max(1.0),
        tolerance,
    }
}

/// True iff the support of the measure spans R^N (finite second moment
/// holds by construction).
pub fn is_probabilistic_frame(measure: &Measure) -> bool {
    measure.support_rank() == measure.dim()
}

/// The canonical dual μ̃ = μ∘S_μ, realized by moving each support point to
/// `S_μ⁻¹ φᵢ` with its weight unchanged.
///
/// The reconstruction identity `Σ wᵢ ⟨x, S⁻¹φᵢ⟩ φᵢ = x` then holds for
/// every x; this orientation of the pushforward is the one that makes it
/// an identity.
pub fn canonical_dual(measure: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    let inv = frame_operator(&Measure::Discrete(measure.clone())).inverse()?;
    let points = measure.points().iter().map(|p| &inv * p).collect();
    DiscreteMeasure::new(points, measure.weights().to_vec())
}

/// The canonical tight transform μ∘S_μ^{1/2}: points move to `S^{-1/2}φᵢ`,
/// weights stay, and the resulting frame operator is the identity.
pub fn canonical_tight(measure: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    let inv_sqrt = frame_operator(&Measure::Discrete(measure.clone())).inverse_sqrt()?;
    let points = measure.points().iter().map(|p| &inv_sqrt * p).collect();
    DiscreteMeasure::new(points, measure.weights().to_vec())
}

/// The weighted Gram matrix of a discrete measure.
pub fn gram_matrix(measure: &DiscreteMeasure) -> GramMatrix {
    let m = measure.len();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = (measure.weights()[i] * measure.weights()[j]).sqrt()
                * measure.points()[i].dot(&measure.points()[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    GramMatrix { matrix: g }
}
