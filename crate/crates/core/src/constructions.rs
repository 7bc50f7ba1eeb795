//! Building new probabilistic frames from old ones: convolution, product
//! measures, δ₀-mixing, and density grids.
//!
//! Convolution acts exactly on the supported representations: two point
//! clouds convolve to the cloud of pairwise sums, and a Gaussian component
//! convolves by adding means and covariances. The frame operator obeys
//! `S_{μ∗ν} = S_μ + S_ν + m_μ m_νᵀ + m_ν m_μᵀ`, so convolving with any
//! zero-mean tight frame adds a multiple of the identity.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, GaussianComponent, GaussianMixtureMeasure, Measure};
use crate::parallel::map_indexed;

/// Cap on the support size a discrete convolution or product may produce.
pub const MAX_SUPPORT: usize = 1_000_000;

/// Tolerance under which a mean counts as zero for the product precondition.
pub const ZERO_MEAN_TOL: f64 = 1e-10;

fn check_dims(a: &Measure, b: &Measure) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

fn check_support(size: usize) -> Result<()> {
    if size > MAX_SUPPORT {
        return Err(Error::SupportTooLarge {
            size,
            limit: MAX_SUPPORT,
        });
    }
    Ok(())
}

fn mixture_of(m: &Measure) -> Vec<GaussianComponent> {
    match m {
        Measure::Mixture(g) => g.components().to_vec(),
        Measure::Discrete(d) => {
            let n = d.dim();
            d.points()
                .iter()
                .zip(d.weights())
                .map(|(p, &w)| GaussianComponent {
                    weight: w,
                    mean: p.clone(),
                    covariance: DMatrix::zeros(n, n),
                })
                .collect()
        }
    }
}

/// The convolution μ∗ν.
///
/// Both discrete: all pairwise sums with product weights. Any Gaussian
/// factor: a mixture whose components add means and covariances. Supports
/// larger than [`MAX_SUPPORT`] are rejected up front.
pub fn convolve(a: &Measure, b: &Measure) -> Result<Measure> {
    check_dims(a, b)?;
    let result: Measure = match (a, b) {
        (Measure::Discrete(x), Measure::Discrete(y)) => {
            check_support(x.len().saturating_mul(y.len()))?;
            // Pairwise sums, one chunk per left point; chunk order is
            // fixed, so the parallel schedule cannot change the result.
            let rows = map_indexed(x.len(), |i| {
                let p = &x.points()[i];
                let w = x.weights()[i];
                y.points()
                    .iter()
                    .zip(y.weights())
                    .map(|(q, &v)| (p + q, w * v))
                    .collect::<Vec<_>>()
            });
            let mut points = Vec::with_capacity(x.len() * y.len());
            let mut weights = Vec::with_capacity(x.len() * y.len());
            for row in rows {
                for (p, w) in row {
                    points.push(p);
                    weights.push(w);
                }
            }
            DiscreteMeasure::new(points, weights)?.into()
        }
        _ => {
            let xs = mixture_of(a);
            let ys = mixture_of(b);
            check_support(xs.len().saturating_mul(ys.len()))?;
            let mut components = Vec::with_capacity(xs.len() * ys.len());
            for cx in &xs {
                for cy in &ys {
                    components.push(GaussianComponent {
                        weight: cx.weight * cy.weight,
                        mean: &cx.mean + &cy.mean,
                        covariance: &cx.covariance + &cy.covariance,
                    });
                }
            }
            GaussianMixtureMeasure::new(components)?.into()
        }
    };
    debug_assert!(convolution_operator_residual(a, b, &result) < 1e-8);
    Ok(result)
}

/// `‖S_{μ∗ν} − (S_μ + S_ν + m_μm_νᵀ + m_νm_μᵀ)‖_F`, used as an internal
/// consistency check on every convolution.
pub fn convolution_operator_residual(a: &Measure, b: &Measure, conv: &Measure) -> f64 {
    let sa = crate::operators::frame_operator(a);
    let sb = crate::operators::frame_operator(b);
    let sc = crate::operators::frame_operator(conv);
    let ma = a.mean();
    let mb = b.mean();
    let expected = sa.matrix() + sb.matrix() + &ma * mb.transpose() + &mb * ma.transpose();
    crate::linalg::frobenius_distance(sc.matrix(), &expected)
}

/// The adjunction μ_ε = (1−ε)μ + ε δ₀ for ε in the open interval (0, 1).
///
/// Scales both frame bounds by exactly (1−ε) without moving any
/// eigenvector.
pub fn mix_with_delta0(m: &Measure, eps: f64) -> Result<Measure> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsilonRange { eps });
    }
    match m {
        Measure::Discrete(d) => {
            let mut points = d.points().to_vec();
            let mut weights: Vec<f64> = d.weights().iter().map(|w| w * (1.0 - eps)).collect();
            points.push(DVector::zeros(d.dim()));
            weights.push(eps);
            Ok(DiscreteMeasure::new(points, weights)?.into())
        }
        Measure::Mixture(g) => {
            let n = g.dim();
            let mut components: Vec<GaussianComponent> = g
                .components()
                .iter()
                .map(|c| GaussianComponent {
                    weight: c.weight * (1.0 - eps),
                    ..c.clone()
                })
                .collect();
            components.push(GaussianComponent {
                weight: eps,
                mean: DVector::zeros(n),
                covariance: DMatrix::zeros(n, n),
            });
            Ok(GaussianMixtureMeasure::new(components)?.into())
        }
    }
}

fn stack(top: &DVector<f64>, bottom: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(top.len() + bottom.len());
    out.rows_mut(0, top.len()).copy_from(top);
    out.rows_mut(top.len(), bottom.len()).copy_from(bottom);
    out
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(na + nb, na + nb);
    out.view_mut((0, 0), (na, na)).copy_from(a);
    out.view_mut((na, na), (nb, nb)).copy_from(b);
    out
}

/// The product measure μ⊗ν on `R^{N₁+N₂}`.
///
/// Requires at least one factor to have zero mean (the cross terms of the
/// quadratic form cancel only then) and matching representations. The
/// frame operator is `diag(S_μ, S_ν)`, so the bounds are
/// `(min(A_μ, A_ν), max(B_μ, B_ν))`.
pub fn product_measure(a: &Measure, b: &Measure) -> Result<Measure> {
    let (na, nb) = (a.mean().norm(), b.mean().norm());
    if na > ZERO_MEAN_TOL && nb > ZERO_MEAN_TOL {
        return Err(Error::NoZeroMeanFactor {
            left: na,
            right: nb,
        });
    }
    match (a, b) {
        (Measure::Discrete(x), Measure::Discrete(y)) => {
            check_support(x.len().saturating_mul(y.len()))?;
            let mut points = Vec::with_capacity(x.len() * y.len());
            let mut weights = Vec::with_capacity(x.len() * y.len());
            for (p, &w) in x.points().iter().zip(x.weights()) {
                for (q, &v) in y.points().iter().zip(y.weights()) {
                    points.push(stack(p, q));
                    weights.push(w * v);
                }
            }
            Ok(DiscreteMeasure::new(points, weights)?.into())
        }
        (Measure::Mixture(x), Measure::Mixture(y)) => {
            check_support(x.components().len().saturating_mul(y.components().len()))?;
            let mut components = Vec::new();
            for cx in x.components() {
                for cy in y.components() {
                    components.push(GaussianComponent {
                        weight: cx.weight * cy.weight,
                        mean: stack(&cx.mean, &cy.mean),
                        covariance: block_diag(&cx.covariance, &cy.covariance),
                    });
                }
            }
            Ok(GaussianMixtureMeasure::new(components)?.into())
        }
        _ => Err(Error::UnsupportedPair(
            "product requires discrete×discrete or mixture×mixture",
        )),
    }
}

/// Density of a planar mixture sampled on a `cells × cells` grid over
/// `[-range, range]²`, row-major as `(x, y, density)` triples.
///
/// This is the export behind the CLI heatmap flag; rendering is left to
/// external tools.
pub fn density_grid(
    m: &GaussianMixtureMeasure,
    cells: usize,
    range: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: m.dim(),
            right: 2,
        });
    }
    if cells < 2 || range <= 0.0 {
        return Err(Error::Schema(format!(
            "density grid needs cells >= 2 and range > 0, got {cells} and {range}"
        )));
    }
    let step = 2.0 * range / (cells - 1) as f64;
    let mut rows = Vec::with_capacity(cells * cells);
    for iy in 0..cells {
        let y = range - iy as f64 * step;
        for ix in 0..cells {
            let x = -range + ix as f64 * step;
            let d = m.density(&DVector::from_column_slice(&[x, y]))?;
            rows.push((x, y, d));
        }
    }
    Ok(rows)
}
