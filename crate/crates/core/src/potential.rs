//! Probabilistic frame potential, spherical 2-design predicates, and the
//! John decomposition check.
//!
//! The frame potential `PFP(μ) = ∬|⟨x,y⟩|² dμ(x)dμ(y)` equals the squared
//! Frobenius norm of the frame operator, so potential minimization and
//! tightness are two views of the same thing: `PFP ≥ M₂⁴/N` always, with
//! equality exactly for tight frames, and `PFP ≥ 1/n` for unit-second-
//! moment measures whose frame operator has `n` nonzero eigenvalues.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::DiscreteMeasure;
use crate::operators::{frame_operator, FrameOperator};

/// Tolerance on `‖φ‖ − 1` for support-on-sphere preconditions.
pub const SPHERE_TOL: f64 = 1e-10;

/// Tolerance for the equality checks of the John conditions.
pub const JOHN_TOL: f64 = 1e-8;

/// Frame potential of a measure with the bounds it is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialReport {
    /// `PFP(μ) = Σᵢⱼ wᵢwⱼ⟨φᵢ,φⱼ⟩²`.
    pub pfp: f64,
    /// `M₂⁴(μ)/N`, the tightness lower bound in the ambient dimension.
    pub m2_fourth_over_n: f64,
    /// Number of nonzero eigenvalues of the frame operator.
    pub nonzero_eigs: usize,
    /// `1/n`, the minimal potential over unit-second-moment measures
    /// spanning an n-dimensional subspace (0 for the zero measure).
    pub lower_bound_1_over_n: f64,
    /// Whether `pfp = (Σλ)²/n`, i.e. the measure is tight for its span.
    pub tight_for_span: bool,
}

fn double_sum_potential(measure: &DiscreteMeasure) -> f64 {
    let points = measure.points();
    let weights = measure.weights();
    let m = points.len();
    let mut acc = 0.0;
    for i in 0..m {
        acc += weights[i] * weights[i] * points[i].dot(&points[i]).powi(2);
        for j in 0..i {
            acc += 2.0 * weights[i] * weights[j] * points[i].dot(&points[j]).powi(2);
        }
    }
    acc
}

/// Frame potential of a discrete measure via the explicit double sum.
///
/// The spectral route `Σλ²` agrees with the double sum; the tests hold the
/// two against each other.
pub fn frame_potential(measure: &DiscreteMeasure) -> PotentialReport {
    let op = frame_operator(&measure.clone().into());
    report_from(double_sum_potential(measure), &op, measure.dim())
}

fn report_from(pfp: f64, op: &FrameOperator, dim: usize) -> PotentialReport {
    let trace = op.trace();
    let n = op.rank();
    let tight_for_span = if n == 0 {
        false
    } else {
        (pfp - trace * trace / n as f64).abs() <= 1e-9
    };
    PotentialReport {
        pfp,
        m2_fourth_over_n: trace * trace / dim as f64,
        nonzero_eigs: n,
        lower_bound_1_over_n: if n == 0 { 0.0 } else { 1.0 / n as f64 },
        tight_for_span,
    }
}

fn check_support_on_sphere(measure: &DiscreteMeasure) -> Result<()> {
    for (index, (p, &w)) in measure.points().iter().zip(measure.weights()).enumerate() {
        if w > 0.0 {
            let norm = p.norm();
            if (norm - 1.0).abs() > SPHERE_TOL {
                return Err(Error::OffSphere { index, norm });
            }
        }
    }
    Ok(())
}

/// Ratio of the quadratic potential to the pairwise squared distance,
/// `∬⟨x,y⟩²dμdμ / ∬‖x−y‖²dμdμ`, for sphere-supported measures.
///
/// Minimized exactly by probabilistic spherical 2-designs, at `1/(2N)`.
/// Returns `+∞` when the denominator vanishes (a point mass), so sweeps
/// can still rank degenerate measures.
pub fn mixed_potential_ratio(measure: &DiscreteMeasure) -> Result<f64> {
    check_support_on_sphere(measure)?;
    let numerator = double_sum_potential(measure);
    let m2 = measure.second_moment();
    let denominator = 2.0 * m2 - 2.0 * measure.mean().norm_squared();
    if denominator <= 1e-14 {
        return Ok(f64::INFINITY);
    }
    Ok(numerator / denominator)
}

/// True iff the measure matches the uniform sphere measure up to degree-2
/// moments: unit-norm support, zero mean, and frame operator `I/N`, each
/// within `tolerance`.
pub fn is_spherical_2design(measure: &DiscreteMeasure, tolerance: f64) -> bool {
    let on_sphere = measure
        .points()
        .iter()
        .zip(measure.weights())
        .all(|(p, &w)| w == 0.0 || (p.norm() - 1.0).abs() <= tolerance);
    if !on_sphere {
        return false;
    }
    if measure.mean().norm() > tolerance {
        return false;
    }
    let n = measure.dim();
    let op = frame_operator(&measure.clone().into());
    let target = DMatrix::from_diagonal_element(n, n, 1.0 / n as f64);
    linalg::frobenius_distance(op.matrix(), &target) <= tolerance
}

/// The symmetrization ν(A) = (μ(A) + μ(−A))/2: every point reappears
/// negated, each copy carrying half the original weight.
///
/// Preserves the frame operator and zeroes the mean; applied to a tight
/// unit-norm measure it produces a spherical 2-design.
pub fn symmetrize(measure: &DiscreteMeasure) -> DiscreteMeasure {
    let mut points = Vec::with_capacity(2 * measure.len());
    let mut weights = Vec::with_capacity(2 * measure.len());
    for (p, &w) in measure.points().iter().zip(measure.weights()) {
        points.push(p.clone());
        points.push(-p);
        weights.push(w / 2.0);
        weights.push(w / 2.0);
    }
    DiscreteMeasure::new(points, weights).expect("halved weights still sum to 1")
}

/// John's decomposition test: do the unit vectors and positive coefficients
/// satisfy `Σcᵢφᵢ = 0` and `Σcᵢφᵢφᵢᵀ = I`?
///
/// Equivalently, `(1/N)Σcᵢδ_{φᵢ}` is a unit-norm tight probabilistic frame
/// with zero mean. The coefficients are not probability weights; condition
/// (b) forces them to sum to N.
pub fn john_conditions(points: &[DVector<f64>], coefficients: &[f64]) -> Result<bool> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    if points.len() != coefficients.len() {
        return Err(Error::CardinalityMismatch {
            left: points.len(),
            right: coefficients.len(),
        });
    }
    let dim = points[0].len();
    for (index, p) in points.iter().enumerate() {
        let norm = p.norm();
        if (norm - 1.0).abs() > SPHERE_TOL {
            return Err(Error::OffSphere { index, norm });
        }
    }
    for (index, &value) in coefficients.iter().enumerate() {
        if value <= 0.0 {
            return Err(Error::NegativeWeight { index, value });
        }
    }
    let mut resultant = DVector::zeros(dim);
    let mut scatter = DMatrix::zeros(dim, dim);
    for (p, &c) in points.iter().zip(coefficients) {
        resultant += p * c;
        scatter.syger(c, p, p, 1.0);
    }
    scatter.fill_upper_triangle_with_lower_triangle();
    Ok(resultant.norm() <= JOHN_TOL
        && linalg::frobenius_distance(&scatter, &DMatrix::identity(dim, dim)) <= JOHN_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::operators::{frame_bounds, DEFAULT_TIGHT_TOL};
    use crate::parallel::trial_rng;
    use nalgebra::dvector;
    use proptest::prelude::*;

    fn onb2() -> DiscreteMeasure {
        DiscreteMeasure::uniform(vec![dvector![1.0, 0.0], dvector![0.0, 1.0]]).unwrap()
    }

    fn mercedes_benz() -> DiscreteMeasure {
        let s = 3.0f64.sqrt() / 2.0;
        DiscreteMeasure::uniform(vec![
            dvector![0.0, 1.0],
            dvector![-s, -0.5],
            dvector![s, -0.5],
        ])
        .unwrap()
    }

    fn cross2() -> DiscreteMeasure {
        DiscreteMeasure::uniform(vec![
            dvector![1.0, 0.0],
            dvector![-1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![0.0, -1.0],
        ])
        .unwrap()
    }

    #[test]
    fn funtf_potential_is_one_over_n() {
        let report = frame_potential(&mercedes_benz());
        assert!((report.pfp - 0.5).abs() < 1e-12);
        assert!(report.tight_for_span);
    }

    #[test]
    fn unit_dirac_saturates_span_bound() {
        let report = frame_potential(&DiscreteMeasure::dirac(dvector![1.0, 0.0]));
        assert!((report.pfp - 1.0).abs() < 1e-15);
        assert_eq!(report.nonzero_eigs, 1);
        assert!((report.pfp - report.lower_bound_1_over_n).abs() < 1e-12);
        assert!(report.tight_for_span);
    }

    #[test]
    fn onb_potential_saturates_ambient_bound() {
        let report = frame_potential(&onb2());
        assert!((report.pfp - 0.5).abs() < 1e-15);
        assert!((report.pfp - report.m2_fourth_over_n).abs() < 1e-15);
    }

    #[test]
    fn potential_equals_frobenius_norm_of_operator() {
        let mut rng = trial_rng(31, 0);
        for _ in 0..25 {
            let m = generate::random_discrete(4, 9, &mut rng);
            let report = frame_potential(&m);
            let op = frame_operator(&m.into());
            let frob_sq: f64 = op.eigenvalues().iter().map(|l| l * l).sum();
            assert!((report.pfp - frob_sq).abs() <= 1e-10 * (1.0 + frob_sq));
        }
    }

    #[test]
    fn potential_bound_with_equality_iff_tight() {
        let mut rng = trial_rng(37, 0);
        for k in 0..40 {
            let m = if k % 2 == 0 {
                generate::random_discrete(3, 8, &mut rng)
            } else {
                generate::random_tight(3, 8, 1.3, &mut rng)
            };
            let report = frame_potential(&m);
            assert!(report.pfp >= report.m2_fourth_over_n - 1e-10);
            let tight = frame_bounds(&m.into(), DEFAULT_TIGHT_TOL).tight;
            let equality = (report.pfp - report.m2_fourth_over_n).abs() <= 1e-9;
            assert_eq!(tight, equality);
        }
    }

    #[test]
    fn ratio_of_two_design_is_one_over_2n() {
        assert!((mixed_potential_ratio(&cross2()).unwrap() - 0.25).abs() < 1e-12);
        let mut rng = trial_rng(41, 0);
        let design = generate::random_two_design(3, 2, &mut rng);
        assert!((mixed_potential_ratio(&design).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_cross_matches_brute_force() {
        // Oracle: the 16-term double sums over {±e₁,±e₂}.
        let m = cross2();
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, wx) in m.points().iter().zip(m.weights()) {
            for (y, wy) in m.points().iter().zip(m.weights()) {
                num += wx * wy * x.dot(y).powi(2);
                den += wx * wy * (x - y).norm_squared();
            }
        }
        assert!((num / den - mixed_potential_ratio(&m).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn ratio_point_mass_is_infinite() {
        let m = DiscreteMeasure::dirac(dvector![1.0, 0.0]);
        assert_eq!(mixed_potential_ratio(&m).unwrap(), f64::INFINITY);
    }

    #[test]
    fn ratio_rejects_off_sphere_support() {
        let m = DiscreteMeasure::uniform(vec![dvector![2.0, 0.0], dvector![0.0, 1.0]]).unwrap();
        assert!(matches!(
            mixed_potential_ratio(&m),
            Err(Error::OffSphere { index: 0, .. })
        ));
    }

    #[test]
    fn two_design_predicate_cases() {
        assert!(is_spherical_2design(&cross2(), 1e-9));
        // Mercedes-Benz: mean 0 and S = I/2 by the closed-form sums.
        assert!(is_spherical_2design(&mercedes_benz(), 1e-9));
        // ONB has nonzero mean.
        assert!(!is_spherical_2design(&onb2(), 1e-9));
    }

    #[test]
    fn symmetrized_onb_is_a_design() {
        let sym = symmetrize(&onb2());
        assert_eq!(sym.len(), 4);
        assert!(is_spherical_2design(&sym, 1e-12));
    }

    #[test]
    fn symmetrize_preserves_operator_and_kills_mean() {
        let mut rng = trial_rng(43, 0);
        for _ in 0..20 {
            let m = generate::random_discrete(3, 6, &mut rng);
            let sym = symmetrize(&m);
            assert!(sym.mean().norm() < 1e-14);
            let before = frame_operator(&m.into());
            let after = frame_operator(&sym.into());
            assert!(
                linalg::frobenius_distance(before.matrix(), after.matrix())
                    <= 1e-15 * (1.0 + before.trace())
            );
        }
    }

    #[test]
    fn symmetrize_of_symmetric_measure_keeps_operator() {
        let m = cross2();
        let before = frame_operator(&m.clone().into());
        let after = frame_operator(&symmetrize(&m).into());
        assert_eq!(before.matrix(), after.matrix());
    }

    #[test]
    fn john_conditions_hold_for_balanced_configurations() {
        let cross = vec![
            dvector![1.0, 0.0],
            dvector![-1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![0.0, -1.0],
        ];
        assert!(john_conditions(&cross, &[0.5; 4]).unwrap());
        // Mercedes-Benz with c = 2/3: Σφφᵀ = (3/2)I, so (2/3)Σφφᵀ = I.
        let mb = mercedes_benz();
        assert!(john_conditions(mb.points(), &[2.0 / 3.0; 3]).unwrap());
    }

    #[test]
    fn john_conditions_fail_for_unbalanced_configurations() {
        let onb = vec![dvector![1.0, 0.0], dvector![0.0, 1.0]];
        // Condition (a) fails for any positive coefficients.
        assert!(!john_conditions(&onb, &[1.0, 1.0]).unwrap());
        assert!(!john_conditions(&onb, &[0.3, 2.0]).unwrap());
    }

    #[test]
    fn john_conditions_validate_input() {
        let bad = vec![dvector![2.0, 0.0]];
        assert!(matches!(
            john_conditions(&bad, &[1.0]),
            Err(Error::OffSphere { .. })
        ));
        let ok = vec![dvector![1.0, 0.0]];
        assert!(matches!(
            john_conditions(&ok, &[0.0]),
            Err(Error::NegativeWeight { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sphere_ratio_respects_design_bound(seed in 0u64..300) {
            let mut rng = trial_rng(seed, 2);
            let n = 2 + (seed as usize % 3);
            let m = if seed % 3 == 0 {
                generate::random_two_design(n, 1 + seed as usize % 3, &mut rng)
            } else {
                generate::random_sphere_measure(n, 4 + seed as usize % 8, &mut rng)
            };
            let ratio = mixed_potential_ratio(&m).unwrap();
            prop_assert!(ratio >= 1.0 / (2.0 * n as f64) - 1e-9);
            let equality = (ratio - 1.0 / (2.0 * n as f64)).abs() <= 1e-9;
            prop_assert_eq!(equality, is_spherical_2design(&m, 1e-9));

            // Sphere support means M₂ = 1, so the span bound applies.
            let rep = frame_potential(&m);
            prop_assert!(rep.pfp >= rep.lower_bound_1_over_n - 1e-10);
        }
    }
}
