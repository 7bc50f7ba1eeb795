//! Directional statistics and random analysis operators: the Bingham
//! scatter statistic, angular central Gaussian sampling, Tyler's
//! M-estimator, and Monte Carlo verification of the expected deviation
//! `E‖(1/M)FᵀF − (L₁/N)I‖²_F = (1/M)(L₄ − L₂/N)` for random frames with
//! tight row distributions.
//!
//! Trials are embarrassingly parallel; every trial draws from its own
//! [`crate::parallel::trial_rng`] stream, so reports are reproducible and
//! independent of scheduling.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{standard_normal_vector, DiscreteMeasure};
use crate::parallel::{map_indexed, trial_rng};

/// Default convergence tolerance for Tyler's iteration.
pub const TYLER_TOL: f64 = 1e-10;

/// Default iteration cap for Tyler's iteration.
pub const TYLER_MAX_ITER: usize = 500;

const UNIT_NORM_TOL: f64 = 1e-10;

fn check_unit_norm(points: &[DVector<f64>]) -> Result<()> {
    for (index, p) in points.iter().enumerate() {
        let norm = p.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::OffSphere { index, norm });
        }
    }
    Ok(())
}

/// `‖(1/M)Σφφᵀ − (1/N)I‖_F`: how far the scatter matrix of a unit-norm
/// sample sits from the uniform (tight) one. Zero exactly when the
/// counting measure of the sample is tight.
pub fn bingham_statistic(points: &[DVector<f64>]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    check_unit_norm(points)?;
    let n = points[0].len();
    let mut scatter = DMatrix::zeros(n, n);
    for p in points {
        scatter.syger(1.0 / points.len() as f64, p, p, 1.0);
    }
    scatter.fill_upper_triangle_with_lower_triangle();
    let target = DMatrix::from_diagonal_element(n, n, 1.0 / n as f64);
    Ok(linalg::frobenius_distance(&scatter, &target))
}

/// Draws from the angular central Gaussian with shape matrix `gamma`:
/// `z/‖z‖` for `z ~ N(0, Γ)`. Deterministic given `seed`.
pub fn sample_acg(gamma: &DMatrix<f64>, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
    if count == 0 {
        return Err(Error::ZeroSampleCount);
    }
    let factor = acg_factor(gamma)?;
    let mut rng = trial_rng(seed, 0);
    Ok((0..count).map(|_| acg_draw(&factor, &mut rng)).collect())
}

fn acg_factor(gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let deviation = linalg::asymmetry(gamma);
    if deviation > 1e-10 {
        return Err(Error::NotSymmetric { deviation });
    }
    Ok(gamma
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?
        .l())
}

fn acg_draw(factor: &DMatrix<f64>, rng: &mut impl Rng) -> DVector<f64> {
    let n = factor.nrows();
    loop {
        let z = factor * standard_normal_vector(n, rng);
        let norm = z.norm();
        if norm > 0.0 {
            return z / norm;
        }
    }
}

/// Result of Tyler's fixed-point iteration.
#[derive(Debug, Clone)]
pub struct TylerResult {
    /// The shape estimate Γ̂, SPD and trace-normalized to N.
    pub gamma_hat: DMatrix<f64>,
    /// Iterations actually performed.
    pub iterations: usize,
    /// `‖Γ_{k+1} − Γ_k‖_F` at exit.
    pub residual: f64,
    /// The whitened directions `Γ̂^{-1/2}φᵢ/‖Γ̂^{-1/2}φᵢ‖` as a uniform
    /// measure; always a tight unit-norm frame.
    pub tight_frame: DiscreteMeasure,
}

/// Tyler's M-estimator of the ACG shape matrix.
///
/// Iterates `Γ_{k+1} = [N / Σᵢ qᵢ⁻¹] · Σᵢ φᵢφᵢᵀ/qᵢ` with
/// `qᵢ = φᵢᵀΓ_k⁻¹φᵢ` from `Γ₀ = I` until the Frobenius update drops to
/// `tol`. The scheme keeps `trace Γ_k = N` for unit-norm data, and a tight
/// input is a fixed point after a single step.
pub fn tyler_iterate(points: &[DVector<f64>], tol: f64, max_iter: usize) -> Result<TylerResult> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    check_unit_norm(points)?;
    let n = points[0].len();
    let rank = linalg::matrix_rank(&DMatrix::from_columns(points));
    if points.len() < n || rank < n {
        return Err(Error::NotSpanning { rank, dim: n });
    }

    let mut gamma = DMatrix::identity(n, n);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < max_iter {
        let chol = gamma.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let mut next = DMatrix::zeros(n, n);
        let mut inv_sum = 0.0;
        for p in points {
            let q = p.dot(&chol.solve(p));
            next.syger(1.0 / q, p, p, 1.0);
            inv_sum += 1.0 / q;
        }
        next.fill_upper_triangle_with_lower_triangle();
        next *= n as f64 / inv_sum;
        residual = linalg::frobenius_distance(&next, &gamma);
        gamma = next;
        iterations += 1;
        if residual <= tol {
            break;
        }
    }
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }

    gamma *= n as f64 / gamma.trace();
    let (vals, vecs) = linalg::sym_eigen(&gamma);
    let inv_sqrt = linalg::spectral_map(&vals, &vecs, |l| 1.0 / l.sqrt());
    let whitened: Vec<DVector<f64>> = points
        .iter()
        .map(|p| {
            let y = &inv_sqrt * p;
            let norm = y.norm();
            y / norm
        })
        .collect();
    Ok(TylerResult {
        gamma_hat: gamma,
        iterations,
        residual,
        tight_frame: DiscreteMeasure::uniform(whitened)?,
    })
}

/// Row distribution of the random analysis operator under test.
#[derive(Debug, Clone)]
pub enum RowSpec {
    /// Entries i.i.d. ±1/√N: a unit-norm tight frame on the hypercube.
    Bernoulli,
    /// Entries i.i.d. N(0, 1/N): covariance I/N, a tight frame.
    Gaussian,
    /// Angular central Gaussian with the given SPD shape matrix.
    Acg(DMatrix<f64>),
    /// Rows drawn from a discrete measure.
    DiscreteFrame(DiscreteMeasure),
}

impl RowSpec {
    /// `M₂²` of the row distribution.
    pub fn second_moment(&self, dim: usize) -> f64 {
        match self {
            RowSpec::Bernoulli | RowSpec::Gaussian | RowSpec::Acg(_) => {
                let _ = dim;
                1.0
            }
            RowSpec::DiscreteFrame(m) => m.second_moment(),
        }
    }

    /// `M₄⁴` of the row distribution.
    pub fn fourth_moment(&self, dim: usize) -> f64 {
        match self {
            // ‖x‖ ≡ 1 on the hypercube vertices and on the sphere.
            RowSpec::Bernoulli | RowSpec::Acg(_) => 1.0,
            RowSpec::Gaussian => 1.0 + 2.0 / dim as f64,
            RowSpec::DiscreteFrame(m) => m.fourth_moment(),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            RowSpec::Acg(gamma) => {
                if gamma.nrows() != dim {
                    return Err(Error::DimensionMismatch {
                        left: gamma.nrows(),
                        right: dim,
                    });
                }
                acg_factor(gamma).map(|_| ())
            }
            RowSpec::DiscreteFrame(m) => {
                if m.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        left: m.dim(),
                        right: dim,
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn draw_row(&self, dim: usize, rng: &mut impl Rng) -> DVector<f64> {
        match self {
            RowSpec::Bernoulli => {
                let scale = 1.0 / (dim as f64).sqrt();
                DVector::from_iterator(
                    dim,
                    (0..dim).map(|_| if rng.random::<bool>() { scale } else { -scale }),
                )
            }
            RowSpec::Gaussian => standard_normal_vector(dim, rng) / (dim as f64).sqrt(),
            RowSpec::Acg(gamma) => {
                let factor = acg_factor(gamma).expect("validated before the trial loop");
                acg_draw(&factor, rng)
            }
            RowSpec::DiscreteFrame(m) => m.points()[m.pick_index(rng)].clone(),
        }
    }
}

/// A Monte Carlo estimate next to its theoretical target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCReport {
    pub estimate: f64,
    pub std_error: f64,
    pub theory: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Estimates `E‖(1/M)FᵀF − (L₁/N)I‖²_F` over independent draws of the
/// M×N analysis matrix F and compares it with `(1/M)(L₄ − L₂/N)`.
///
/// All rows share one spec, so `L₁ = M₂²`, `L₂ = (M₂²)²`, `L₄ = M₄⁴` of
/// that row distribution. The identity assumes the row distribution is a
/// tight probabilistic frame; running a non-tight spec simply shows the
/// estimate pulling away from the theory column.
pub fn mc_verify_random_frame(
    spec: &RowSpec,
    rows: usize,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<MCReport> {
    if trials < 2 {
        return Err(Error::TooFewTrials { trials });
    }
    if rows == 0 || dim == 0 {
        return Err(Error::Empty);
    }
    spec.validate(dim)?;

    let m2 = spec.second_moment(dim);
    let centering = m2 / dim as f64;
    let values = map_indexed(trials, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let mut gram = DMatrix::zeros(dim, dim);
        for _ in 0..rows {
            let row = spec.draw_row(dim, &mut rng);
            gram.syger(1.0 / rows as f64, &row, &row, 1.0);
        }
        gram.fill_upper_triangle_with_lower_triangle();
        for k in 0..dim {
            gram[(k, k)] -= centering;
        }
        gram.norm().powi(2)
    });

    let trials_f = trials as f64;
    let estimate = values.iter().sum::<f64>() / trials_f;
    let variance = values.iter().map(|v| (v - estimate).powi(2)).sum::<f64>() / (trials_f - 1.0);
    let theory = (spec.fourth_moment(dim) - m2 * m2 / dim as f64) / rows as f64;
    Ok(MCReport {
        estimate,
        std_error: (variance / trials_f).sqrt(),
        theory,
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::operators::{frame_operator, is_probabilistic_frame};
    use nalgebra::dvector;

    fn mercedes_benz_points() -> Vec<DVector<f64>> {
        let s = 3.0f64.sqrt() / 2.0;
        vec![dvector![0.0, 1.0], dvector![-s, -0.5], dvector![s, -0.5]]
    }

    #[test]
    fn bingham_vanishes_for_tight_configurations() {
        assert!(bingham_statistic(&mercedes_benz_points()).unwrap() < 1e-15);
        let cross = vec![
            dvector![1.0, 0.0],
            dvector![-1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![0.0, -1.0],
        ];
        assert!(bingham_statistic(&cross).unwrap() < 1e-15);
    }

    #[test]
    fn bingham_of_repeated_point_is_sqrt_half() {
        // Scatter = diag(1, 0); ‖diag(1,0) − I/2‖_F = √2/2.
        let points = vec![dvector![1.0, 0.0]; 7];
        let stat = bingham_statistic(&points).unwrap();
        assert!((stat - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bingham_rejects_off_sphere_points() {
        assert!(matches!(
            bingham_statistic(&[dvector![0.5, 0.0]]),
            Err(Error::OffSphere { .. })
        ));
    }

    #[test]
    fn bingham_zero_iff_counting_measure_tight() {
        let mut rng = trial_rng(211, 0);
        for k in 0..20 {
            let points = generate::random_unit_points(3, 6 + k % 5, &mut rng);
            let stat = bingham_statistic(&points).unwrap();
            let m = crate::transport::embed_counting(&points).unwrap();
            let b = crate::operators::frame_bounds(&m.into(), 1e-9);
            // ‖S − I/N‖_F = 0 iff A = B = 1/N for unit-norm rows.
            assert_eq!(stat <= 1e-9, b.tight, "iteration {k}");
        }
    }

    #[test]
    fn acg_draws_sit_on_the_sphere() {
        let gamma = DMatrix::identity(3, 3);
        for p in sample_acg(&gamma, 500, 7).unwrap() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn acg_isotropic_scatter_is_uniform() {
        let gamma = DMatrix::identity(3, 3);
        let draws = sample_acg(&gamma, 100_000, 11).unwrap();
        assert!(bingham_statistic(&draws).unwrap() < 0.01);
    }

    #[test]
    fn acg_anisotropic_mass_concentrates() {
        let gamma = DMatrix::from_diagonal(&dvector![100.0, 1.0]);
        let draws = sample_acg(&gamma, 20_000, 13).unwrap();
        let first_axis: f64 = draws.iter().map(|p| p[0] * p[0]).sum::<f64>() / draws.len() as f64;
        assert!(first_axis > 0.8, "scatter[0][0] = {first_axis}");
    }

    #[test]
    fn acg_requires_spd_shape() {
        let singular = DMatrix::from_diagonal(&dvector![1.0, 0.0]);
        assert!(matches!(
            sample_acg(&singular, 10, 1),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn tyler_fixed_point_on_tight_input() {
        let result = tyler_iterate(&mercedes_benz_points(), 1e-12, 50).unwrap();
        assert_eq!(result.iterations, 1);
        assert!(result.residual < 1e-14);
        assert!(linalg::frobenius_distance(&result.gamma_hat, &DMatrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn tyler_output_frame_is_tight() {
        let mut rng = trial_rng(223, 0);
        for _ in 0..5 {
            let points = generate::random_unit_points(4, 20, &mut rng);
            let result = tyler_iterate(&points, 1e-10, 500).unwrap();
            let op = frame_operator(&result.tight_frame.clone().into());
            let target = DMatrix::from_diagonal_element(4, 4, 0.25);
            assert!(linalg::frobenius_distance(op.matrix(), &target) <= 1e-8);
            for p in result.tight_frame.points() {
                assert!((p.norm() - 1.0).abs() < 1e-10);
            }
            assert!(result.gamma_hat.clone().cholesky().is_some());
            assert!((result.gamma_hat.trace() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tyler_recovers_the_acg_shape() {
        let gamma = DMatrix::from_diagonal(&dvector![4.0, 1.0]);
        let draws = sample_acg(&gamma, 10_000, 17).unwrap();
        let result = tyler_iterate(&draws, 1e-10, 500).unwrap();
        // Compare against the trace-N normalization of diag(4, 1).
        let expected = DMatrix::from_diagonal(&dvector![1.6, 0.4]);
        let err = linalg::frobenius_distance(&result.gamma_hat, &expected);
        assert!(err / expected.norm() < 0.05, "relative error {err}");
    }

    #[test]
    fn tyler_is_insensitive_to_input_order() {
        let mut rng = trial_rng(227, 0);
        let mut points = generate::random_unit_points(3, 15, &mut rng);
        let forward = tyler_iterate(&points, 1e-12, 500).unwrap();
        points.reverse();
        let backward = tyler_iterate(&points, 1e-12, 500).unwrap();
        assert!(linalg::frobenius_distance(&forward.gamma_hat, &backward.gamma_hat) < 1e-9);
    }

    #[test]
    fn tyler_residual_decreases_after_warmup() {
        // Practical convergence: once past the first few steps the update
        // norm shrinks monotonically. Checked by rerunning with growing
        // iteration caps and comparing exit residuals.
        let mut rng = trial_rng(229, 0);
        let points = generate::random_unit_points(3, 12, &mut rng);
        let full = tyler_iterate(&points, 1e-10, 500).unwrap();
        let mut last = f64::INFINITY;
        for cap in 3..full.iterations.min(12) {
            let res = match tyler_iterate(&points, 0.0, cap) {
                Err(Error::NoConvergence { residual, .. }) => residual,
                Ok(r) => r.residual,
                Err(e) => panic!("unexpected error {e}"),
            };
            assert!(res <= last * (1.0 + 1e-9), "residual rose at cap {cap}");
            last = res;
        }
    }

    #[test]
    fn tyler_rejects_deficient_inputs() {
        let line = vec![dvector![1.0, 0.0], dvector![-1.0, 0.0]];
        assert!(matches!(
            tyler_iterate(&line, 1e-10, 100),
            Err(Error::NotSpanning { rank: 1, dim: 2 })
        ));
        let few = vec![dvector![1.0, 0.0]];
        assert!(matches!(
            tyler_iterate(&few, 1e-10, 100),
            Err(Error::NotSpanning { .. })
        ));
    }

    #[test]
    fn tyler_reports_non_convergence_distinctly() {
        let mut rng = trial_rng(233, 0);
        let points = generate::random_unit_points(3, 12, &mut rng);
        assert!(matches!(
            tyler_iterate(&points, 0.0, 2),
            Err(Error::NoConvergence { iterations: 2, .. })
        ));
    }

    #[test]
    fn mc_gaussian_matches_closed_form() {
        let report = mc_verify_random_frame(&RowSpec::Gaussian, 16, 4, 2000, 42).unwrap();
        assert!((report.theory - 0.078125).abs() < 1e-15);
        assert!(
            (report.estimate - report.theory).abs() <= 3.0 * report.std_error,
            "estimate {} theory {} se {}",
            report.estimate,
            report.theory,
            report.std_error
        );
    }

    #[test]
    fn mc_bernoulli_matches_closed_form() {
        let report = mc_verify_random_frame(&RowSpec::Bernoulli, 16, 4, 2000, 43).unwrap();
        assert!((report.theory - 0.046875).abs() < 1e-15);
        assert!((report.estimate - report.theory).abs() <= 3.0 * report.std_error);
    }

    #[test]
    fn mc_discrete_tight_rows_match_closed_form() {
        let mut rng = trial_rng(239, 0);
        let design = generate::random_two_design(4, 2, &mut rng);
        assert!(is_probabilistic_frame(&design.clone().into()));
        let spec = RowSpec::DiscreteFrame(design);
        let report = mc_verify_random_frame(&spec, 10, 4, 1500, 44).unwrap();
        // Unit-norm rows: theory = (1/M)(L4 - 1/N) with L4 = 1.
        assert!((report.theory - (1.0 - 0.25) / 10.0).abs() < 1e-12);
        assert!((report.estimate - report.theory).abs() <= 3.0 * report.std_error);
    }

    #[test]
    fn mc_within_three_sigma_for_most_seeds() {
        let mut hits = 0;
        for seed in 0..20 {
            let r = mc_verify_random_frame(&RowSpec::Gaussian, 16, 4, 400, seed).unwrap();
            if (r.estimate - r.theory).abs() <= 3.0 * r.std_error {
                hits += 1;
            }
        }
        assert!(hits >= 19, "only {hits}/20 seeds inside the 3σ band");
    }

    #[test]
    fn mc_rejects_degenerate_requests() {
        assert!(matches!(
            mc_verify_random_frame(&RowSpec::Gaussian, 16, 4, 1, 0),
            Err(Error::TooFewTrials { trials: 1 })
        ));
        let bad = RowSpec::Acg(DMatrix::identity(3, 3));
        assert!(matches!(
            mc_verify_random_frame(&bad, 8, 4, 10, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mc_report_is_deterministic() {
        let a = mc_verify_random_frame(&RowSpec::Gaussian, 8, 3, 200, 7).unwrap();
        let b = mc_verify_random_frame(&RowSpec::Gaussian, 8, 3, 200, 7).unwrap();
        assert_eq!(a, b);
    }
}
