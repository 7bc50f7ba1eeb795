//! Measure representations, moments, support diagnostics, and sampling.
//!
//! Two concrete classes cover every construction in the crate: weighted
//! point masses ([`DiscreteMeasure`]) and Gaussian mixtures
//! ([`GaussianMixtureMeasure`]). Both have exact first and second moments;
//! fourth moments are exact for point masses and for centered isotropic
//! Gaussian components, and are otherwise estimated by seeded sampling.
//!
//! All types are immutable after construction and safe to share across
//! threads. Sampling is pure given `(measure, count, seed)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::parallel::trial_rng;

/// Window around 1 inside which an input weight sum is renormalized rather
/// than rejected.
pub const WEIGHT_SUM_TOL: f64 = 1e-6;

/// Window around 1 inside which a weight sum is accepted verbatim.
/// Renormalizing inside this window would only churn terminal bits and
/// break byte-identical ingestion round trips.
pub const WEIGHT_EXACT_TOL: f64 = 1e-12;

/// Tolerance for covariance symmetry checks.
pub const COV_SYM_TOL: f64 = 1e-12;

/// Most negative eigenvalue a covariance may have and still count as PSD.
pub const COV_PSD_TOL: f64 = -1e-10;

/// Sample count used when a fourth moment has no closed form.
const FOURTH_MOMENT_SAMPLES: usize = 1 << 18;

/// Internal master seed for quasi-deterministic moment estimation.
const FOURTH_MOMENT_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

fn validate_weights(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &value) in weights.iter().enumerate() {
        if value < 0.0 || value.is_nan() {
            return Err(Error::NegativeWeight { index, value });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSum { sum });
    }
    if (sum - 1.0).abs() <= WEIGHT_EXACT_TOL {
        return Ok(weights.to_vec());
    }
    Ok(weights.iter().map(|w| w / sum).collect())
}

/// A weighted sum of point masses in R^N.
///
/// Weights are nonnegative and sum to 1; inputs whose sum is within `1e-6`
/// of 1 are renormalized, anything further off is rejected. Duplicate
/// points are allowed and simply carry separate mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<DVector<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<DVector<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        if points.len() != weights.len() {
            return Err(Error::CardinalityMismatch {
                left: points.len(),
                right: weights.len(),
            });
        }
        let dim = points[0].len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::PointDim {
                    index,
                    expected: dim,
                    actual: p.len(),
                });
            }
        }
        let weights = validate_weights(&weights)?;
        Ok(Self {
            dim,
            points,
            weights,
        })
    }

    /// Uniform weights `1/M` on the given points.
    pub fn uniform(points: Vec<DVector<f64>>) -> Result<Self> {
        let m = points.len();
        Self::new(points, vec![1.0 / m as f64; m.max(1)])
    }

    /// The point mass δ_x.
    pub fn dirac(point: DVector<f64>) -> Self {
        let dim = point.len();
        Self {
            dim,
            points: vec![point],
            weights: vec![1.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * p.norm_squared())
            .sum()
    }

    pub fn fourth_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| {
                let n2 = p.norm_squared();
                w * n2 * n2
            })
            .sum()
    }

    pub fn mean(&self) -> DVector<f64> {
        let mut acc = DVector::zeros(self.dim);
        for (p, w) in self.points.iter().zip(&self.weights) {
            acc += p * *w;
        }
        acc
    }

    /// Dimension of the span of the support (points with positive weight).
    pub fn support_rank(&self) -> usize {
        let cols: Vec<DVector<f64>> = self
            .points
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(p, _)| p.clone())
            .collect();
        if cols.is_empty() {
            return 0;
        }
        linalg::matrix_rank(&DMatrix::from_columns(&cols))
    }

    /// Inverse-CDF sampling over the weights; deterministic given `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
        if count == 0 {
            return Err(Error::ZeroSampleCount);
        }
        let mut rng = trial_rng(seed, 0);
        Ok((0..count)
            .map(|_| self.points[self.pick_index(&mut rng)].clone())
            .collect())
    }

    pub(crate) fn pick_index(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let mut cum = 0.0;
        for (k, w) in self.weights.iter().enumerate() {
            cum += w;
            if u < cum {
                return k;
            }
        }
        self.points.len() - 1
    }
}

/// One Gaussian component: weight, mean, and covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl GaussianComponent {
    /// Second moment contribution `trace(Σ) + ‖m‖²` (unweighted).
    fn second_moment(&self) -> f64 {
        self.covariance.trace() + self.mean.norm_squared()
    }

    /// Closed-form fourth moment when the component is centered isotropic
    /// (`mean = 0`, `Σ = σ²I`): `E‖z‖⁴ = σ⁴ N(N+2)`.
    fn fourth_moment_closed(&self) -> Option<f64> {
        let n = self.mean.len();
        if self.mean.norm() > 1e-12 {
            return None;
        }
        let sigma2 = self.covariance.trace() / n as f64;
        let iso = DMatrix::from_diagonal_element(n, n, sigma2);
        if linalg::frobenius_distance(&self.covariance, &iso) > 1e-12 * (1.0 + sigma2) {
            return None;
        }
        Some(sigma2 * sigma2 * (n as f64) * (n as f64 + 2.0))
    }
}

/// A moment value together with the standard error of its estimator.
///
/// Exact values carry a zero standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// A finite mixture of Gaussian components in R^N.
///
/// Component weights follow the same renormalization rule as
/// [`DiscreteMeasure`]; covariances must be symmetric and PSD. A
/// zero-covariance component is a valid point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureMeasure {
    dim: usize,
    components: Vec<GaussianComponent>,
}

impl GaussianMixtureMeasure {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Empty);
        }
        let dim = components[0].mean.len();
        for (index, c) in components.iter().enumerate() {
            if c.mean.len() != dim {
                return Err(Error::PointDim {
                    index,
                    expected: dim,
                    actual: c.mean.len(),
                });
            }
            if c.covariance.nrows() != dim || c.covariance.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    left: c.covariance.nrows(),
                    right: dim,
                });
            }
            let deviation = linalg::asymmetry(&c.covariance);
            if deviation > COV_SYM_TOL {
                return Err(Error::NotSymmetric { deviation });
            }
            let (vals, _) = linalg::sym_eigen(&c.covariance);
            let min_eigenvalue = vals[dim - 1];
            if min_eigenvalue < COV_PSD_TOL {
                return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
            }
        }
        let weights = validate_weights(&components.iter().map(|c| c.weight).collect::<Vec<_>>())?;
        let components = components
            .into_iter()
            .zip(weights)
            .map(|(c, weight)| GaussianComponent { weight, ..c })
            .collect();
        Ok(Self { dim, components })
    }

    /// A single Gaussian N(mean, covariance).
    pub fn single(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        Self::new(vec![GaussianComponent {
            weight: 1.0,
            mean,
            covariance,
        }])
    }

    /// Centered isotropic Gaussian N(0, σ²I).
    pub fn isotropic(dim: usize, sigma2: f64) -> Self {
        Self::single(
            DVector::zeros(dim),
            DMatrix::from_diagonal_element(dim, dim, sigma2),
        )
        .expect("isotropic covariance is symmetric PSD")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn second_moment(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.second_moment())
            .sum()
    }

    /// `M₄⁴ = ∫‖y‖⁴ dμ`, exact per component where a closed form exists and
    /// estimated by seeded sampling otherwise.
    pub fn fourth_moment_estimate(&self) -> MomentEstimate {
        let mut value = 0.0;
        let mut variance = 0.0;
        for (k, c) in self.components.iter().enumerate() {
            if let Some(exact) = c.fourth_moment_closed() {
                value += c.weight * exact;
                continue;
            }
            let mut rng = trial_rng(FOURTH_MOMENT_SEED, k as u64);
            let factor = linalg::psd_sqrt(&c.covariance);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..FOURTH_MOMENT_SAMPLES {
                let z = standard_normal_vector(self.dim, &mut rng);
                let y = &c.mean + &factor * z;
                let n2 = y.norm_squared();
                let v = n2 * n2;
                sum += v;
                sum_sq += v * v;
            }
            let samples = FOURTH_MOMENT_SAMPLES as f64;
            let mean = sum / samples;
            let var = ((sum_sq / samples) - mean * mean).max(0.0) / (samples - 1.0);
            value += c.weight * mean;
            variance += c.weight * c.weight * var;
        }
        MomentEstimate {
            value,
            std_error: variance.sqrt(),
        }
    }

    pub fn mean(&self) -> DVector<f64> {
        let mut acc = DVector::zeros(self.dim);
        for c in &self.components {
            acc += &c.mean * c.weight;
        }
        acc
    }

    /// Rank of the span of component means and covariance ranges. A
    /// full-rank covariance anywhere forces the full dimension.
    pub fn support_rank(&self) -> usize {
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for c in &self.components {
            if c.weight == 0.0 {
                continue;
            }
            cols.push(c.mean.clone());
            for j in 0..self.dim {
                cols.push(c.covariance.column(j).into_owned());
            }
        }
        if cols.is_empty() {
            return 0;
        }
        linalg::matrix_rank(&DMatrix::from_columns(&cols))
    }

    /// Component choice by inverse CDF, then an affine transform of a
    /// standard normal draw; deterministic given `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
        if count == 0 {
            return Err(Error::ZeroSampleCount);
        }
        let factors: Vec<DMatrix<f64>> = self
            .components
            .iter()
            .map(|c| linalg::psd_sqrt(&c.covariance))
            .collect();
        let mut rng = trial_rng(seed, 0);
        Ok((0..count)
            .map(|_| {
                let k = self.pick_component(&mut rng);
                let z = standard_normal_vector(self.dim, &mut rng);
                &self.components[k].mean + &factors[k] * z
            })
            .collect())
    }

    fn pick_component(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let mut cum = 0.0;
        for (k, c) in self.components.iter().enumerate() {
            cum += c.weight;
            if u < cum {
                return k;
            }
        }
        self.components.len() - 1
    }

    /// Mixture density at `x`; requires every covariance to be positive
    /// definite (point-mass components have no density).
    pub fn density(&self, x: &DVector<f64>) -> Result<f64> {
        let mut total = 0.0;
        for c in &self.components {
            let chol = c
                .covariance
                .clone()
                .cholesky()
                .ok_or(Error::NotPositiveDefinite)?;
            let diff = x - &c.mean;
            let solved = chol.solve(&diff);
            let quad = diff.dot(&solved);
            let log_det: f64 = chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0;
            let log_norm = -0.5 * (self.dim as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
            total += c.weight * (log_norm - 0.5 * quad).exp();
        }
        Ok(total)
    }
}

pub(crate) fn standard_normal_vector(dim: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| rng.sample(StandardNormal)))
}

/// A probability measure with finite second moment: either a weighted
/// point cloud or a Gaussian mixture.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Discrete(DiscreteMeasure),
    Mixture(GaussianMixtureMeasure),
}

impl From<DiscreteMeasure> for Measure {
    fn from(m: DiscreteMeasure) -> Self {
        Measure::Discrete(m)
    }
}

impl From<GaussianMixtureMeasure> for Measure {
    fn from(m: GaussianMixtureMeasure) -> Self {
        Measure::Mixture(m)
    }
}

impl Measure {
    pub fn dim(&self) -> usize {
        match self {
            Measure::Discrete(m) => m.dim(),
            Measure::Mixture(m) => m.dim(),
        }
    }

    /// `M₂²(μ) = ∫‖x‖² dμ(x)`.
    pub fn second_moment(&self) -> f64 {
        match self {
            Measure::Discrete(m) => m.second_moment(),
            Measure::Mixture(m) => m.second_moment(),
        }
    }

    /// `M₄⁴(μ) = ∫‖y‖⁴ dμ(y)`.
    pub fn fourth_moment(&self) -> f64 {
        match self {
            Measure::Discrete(m) => m.fourth_moment(),
            Measure::Mixture(m) => m.fourth_moment_estimate().value,
        }
    }

    /// `∫ y dμ(y)`.
    pub fn mean(&self) -> DVector<f64> {
        match self {
            Measure::Discrete(m) => m.mean(),
            Measure::Mixture(m) => m.mean(),
        }
    }

    /// Dimension of `E_μ`, the span of the support.
    pub fn support_rank(&self) -> usize {
        match self {
            Measure::Discrete(m) => m.support_rank(),
            Measure::Mixture(m) => m.support_rank(),
        }
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
        match self {
            Measure::Discrete(m) => m.sample(count, seed),
            Measure::Mixture(m) => m.sample(count, seed),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteMeasure> {
        match self {
            Measure::Discrete(m) => Some(m),
            Measure::Mixture(_) => None,
        }
    }

    pub fn as_mixture(&self) -> Option<&GaussianMixtureMeasure> {
        match self {
            Measure::Mixture(m) => Some(m),
            Measure::Discrete(_) => None,
        }
    }
}
