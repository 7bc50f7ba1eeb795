//! Exact 2-Wasserstein distance between discrete measures, frame
//! embeddings, and the permutation-distance oracle.
//!
//! `W₂²(μ, ν)` is the minimum of `Σ γᵢⱼ‖xᵢ−yⱼ‖²` over couplings γ with
//! marginals μ and ν. For uniform measures of equal cardinality M it
//! coincides with `(1/M) min_π Σ‖φᵢ−ψ_{π(i)}‖²`, which
//! [`permutation_distance`] computes by brute force as an independent
//! check on the simplex solver.
//!
//! ```
//! use nalgebra::dvector;
//! use pframes::transport::wasserstein2;
//! use pframes::DiscreteMeasure;
//!
//! let a = DiscreteMeasure::dirac(dvector![0.0, 0.0]);
//! let b = DiscreteMeasure::uniform(vec![dvector![1.0, 0.0], dvector![-1.0, 0.0]])?;
//! let plan = wasserstein2(&a, &b)?;
//! assert!((plan.cost() - 1.0).abs() < 1e-12); // both halves travel distance 1
//! # Ok::<(), pframes::Error>(())
//! ```

mod simplex;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// Largest support for the exhaustive permutation search (10! plans).
pub const PERMUTATION_LIMIT: usize = 10;

/// Certification threshold for dual feasibility and complementary
/// slackness of a returned plan.
const OPTIMALITY_TOL: f64 = 1e-9;

/// A coupling between two discrete measures with its squared-cost value.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    coupling: DMatrix<f64>,
    cost: f64,
}

impl TransportPlan {
    /// The coupling matrix; row sums are the source weights, column sums
    /// the target weights.
    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    /// `W₂²`: the squared-distance objective value of the plan.
    pub fn cost(&self) -> f64 {
        self.cost
    }
}

/// Collapses exactly-coincident support points, dropping zero weights.
/// Returns (representative points, merged weights, original→group map).
fn merge_duplicates(m: &DiscreteMeasure) -> (Vec<DVector<f64>>, Vec<f64>, Vec<Option<usize>>) {
    let mut groups: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut points = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut assignment = Vec::with_capacity(m.len());
    for (p, &w) in m.points().iter().zip(m.weights()) {
        if w == 0.0 {
            assignment.push(None);
            continue;
        }
        let key: Vec<u64> = p.iter().map(|x| (x + 0.0).to_bits()).collect();
        let g = *groups.entry(key).or_insert_with(|| {
            points.push(p.clone());
            weights.push(0.0);
            points.len() - 1
        });
        weights[g] += w;
        assignment.push(Some(g));
    }
    (points, weights, assignment)
}

/// Optimal coupling between two discrete measures on the same space.
///
/// Exact transportation simplex; coincident support points are merged
/// before solving and the plan is re-expanded afterwards. The result is
/// certified optimal through its dual: any feasibility or slackness
/// residual above `1e-9` is a solver bug and panics.
pub fn wasserstein2(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<TransportPlan> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let (xs, mut wa, map_a) = merge_duplicates(a);
    let (ys, mut wb, map_b) = merge_duplicates(b);

    // Rebalance away accumulated rounding so supply and demand match.
    let sa: f64 = wa.iter().sum();
    let sb: f64 = wb.iter().sum();
    for w in wa.iter_mut() {
        *w /= sa;
    }
    for w in wb.iter_mut() {
        *w /= sb;
    }

    let cost = DMatrix::from_fn(xs.len(), ys.len(), |i, j| (&xs[i] - &ys[j]).norm_squared());
    let solution = simplex::solve(&wa, &wb, &cost);
    assert!(
        solution.dual_infeasibility(&cost) <= OPTIMALITY_TOL
            && solution.slackness_residual(&cost) <= OPTIMALITY_TOL,
        "transport simplex failed its optimality certificate"
    );

    let mut merged = DMatrix::<f64>::zeros(xs.len(), ys.len());
    for &(i, j, f) in &solution.basis {
        merged[(i, j)] += f;
    }
    let mut coupling = DMatrix::<f64>::zeros(a.len(), b.len());
    for (i, gi) in map_a.iter().enumerate() {
        let Some(gi) = gi else { continue };
        let share_i = a.weights()[i] / (wa[*gi] * sa);
        for (j, gj) in map_b.iter().enumerate() {
            let Some(gj) = gj else { continue };
            let share_j = b.weights()[j] / (wb[*gj] * sb);
            coupling[(i, j)] = merged[(*gi, *gj)] * share_i * share_j;
        }
    }
    Ok(TransportPlan {
        coupling,
        cost: solution.cost,
    })
}

/// `min_π Σᵢ ‖φᵢ − ψ_{π(i)}‖²` over all permutations, by exhaustive
/// search with partial-sum pruning.
///
/// Only defined for uniform measures of equal cardinality `M ≤ 10`;
/// satisfies `M · W₂²(μ_Φ, μ_Ψ)` = this value.
pub fn permutation_distance(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if a.len() != b.len() {
        return Err(Error::CardinalityMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let m = a.len();
    if m > PERMUTATION_LIMIT {
        return Err(Error::PermutationLimit {
            size: m,
            limit: PERMUTATION_LIMIT,
        });
    }
    let uniform = 1.0 / m as f64;
    for w in a.weights().iter().chain(b.weights()) {
        if (w - uniform).abs() > 1e-12 {
            return Err(Error::NonUniformWeights);
        }
    }
    let cost = DMatrix::from_fn(m, m, |i, j| {
        (&a.points()[i] - &b.points()[j]).norm_squared()
    });

    fn search(row: usize, used: u16, partial: f64, best: &mut f64, cost: &DMatrix<f64>) {
        let m = cost.nrows();
        if partial >= *best {
            return;
        }
        if row == m {
            *best = partial;
            return;
        }
        for j in 0..m {
            if used & (1 << j) == 0 {
                search(
                    row + 1,
                    used | (1 << j),
                    partial + cost[(row, j)],
                    best,
                    cost,
                );
            }
        }
    }

    let mut best = f64::INFINITY;
    search(0, 0, 0.0, &mut best, &cost);
    Ok(best)
}

/// Matrix of squared distances `W₂²(μᵢ, μⱼ)` over a family of measures.
///
/// Solver instances are independent, so the upper triangle is computed in
/// parallel (under the `parallel` feature) and mirrored; the result does
/// not depend on scheduling.
pub fn pairwise_wasserstein2(measures: &[DiscreteMeasure]) -> Result<DMatrix<f64>> {
    let count = measures.len();
    let pairs: Vec<(usize, usize)> = (0..count)
        .flat_map(|i| (i + 1..count).map(move |j| (i, j)))
        .collect();
    let costs = crate::parallel::map_indexed(pairs.len(), |k| {
        let (i, j) = pairs[k];
        wasserstein2(&measures[i], &measures[j]).map(|plan| plan.cost())
    });
    let mut out = DMatrix::zeros(count, count);
    for (&(i, j), cost) in pairs.iter().zip(costs) {
        let cost = cost?;
        out[(i, j)] = cost;
        out[(j, i)] = cost;
    }
    Ok(out)
}

/// The counting-measure embedding `μ_Φ = (1/M) Σ δ_{φᵢ}`.
///
/// A frame with bounds (A, B) maps to a probabilistic frame with bounds
/// (A/M, B/M).
pub fn embed_counting(points: &[DVector<f64>]) -> Result<DiscreteMeasure> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    DiscreteMeasure::uniform(points.to_vec())
}

/// The normalized embedding `μ^Φ`: each nonzero φ moves to the sphere and
/// carries weight `‖φ‖²/Σ‖φⱼ‖²`. Tight inputs give tight unit-norm outputs.
pub fn embed_normalized(points: &[DVector<f64>]) -> Result<DiscreteMeasure> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    let mut total = 0.0;
    for (index, p) in points.iter().enumerate() {
        let n2 = p.norm_squared();
        if n2 == 0.0 {
            return Err(Error::ZeroVector { index });
        }
        total += n2;
    }
    let normalized = points.iter().map(|p| p / p.norm()).collect();
    let weights = points.iter().map(|p| p.norm_squared() / total).collect();
    DiscreteMeasure::new(normalized, weights)
}
