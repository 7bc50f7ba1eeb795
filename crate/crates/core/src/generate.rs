//! Seeded generators for random measures, frames, and rotations.
//!
//! Used by the test and bench suites, and handy for experiments. All
//! functions are pure in the supplied RNG, so a fixed seed reproduces the
//! same objects on any platform or thread count.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::measures::{standard_normal_vector, DiscreteMeasure};
use crate::operators;

/// A standard normal vector.
pub fn random_vector(dim: usize, rng: &mut impl Rng) -> DVector<f64> {
    standard_normal_vector(dim, rng)
}

/// `count` standard normal points.
pub fn random_points(dim: usize, count: usize, rng: &mut impl Rng) -> Vec<DVector<f64>> {
    (0..count).map(|_| random_vector(dim, rng)).collect()
}

/// `count` points drawn uniformly on the unit sphere.
pub fn random_unit_points(dim: usize, count: usize, rng: &mut impl Rng) -> Vec<DVector<f64>> {
    (0..count)
        .map(|_| {
            let v = random_vector(dim, rng);
            let n = v.norm();
            if n == 0.0 {
                DVector::from_fn(dim, |i, _| if i == 0 { 1.0 } else { 0.0 })
            } else {
                v / n
            }
        })
        .collect()
}

fn random_weights(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.random::<f64>() + 0.05).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Random discrete measure: normal points, positive random weights.
pub fn random_discrete(dim: usize, count: usize, rng: &mut impl Rng) -> DiscreteMeasure {
    let weights = random_weights(count, rng);
    DiscreteMeasure::new(random_points(dim, count, rng), weights)
        .expect("generated weights are valid")
}

/// Random measure supported on the unit sphere.
pub fn random_sphere_measure(dim: usize, count: usize, rng: &mut impl Rng) -> DiscreteMeasure {
    let weights = random_weights(count, rng);
    DiscreteMeasure::new(random_unit_points(dim, count, rng), weights)
        .expect("generated weights are valid")
}

/// Random tight discrete measure with frame operator `scale²·I`, built by
/// passing a random spanning measure through the canonical tight transform.
pub fn random_tight(dim: usize, count: usize, scale: f64, rng: &mut impl Rng) -> DiscreteMeasure {
    assert!(count >= dim, "need at least dim points to span");
    loop {
        let m = random_discrete(dim, count, rng);
        if let Ok(t) = operators::canonical_tight(&m) {
            let points = t.points().iter().map(|p| p * scale).collect();
            return DiscreteMeasure::new(points, t.weights().to_vec())
                .expect("scaling preserves validity");
        }
    }
}

/// Haar-ish random rotation from the QR factorization of a Gaussian matrix.
pub fn random_rotation(dim: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        rng.sample::<f64, _>(rand_distr::StandardNormal)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix signs so the distribution does not favor an orthant.
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random probabilistic spherical 2-design: a weighted union of
/// symmetrized rotated orthonormal bases `±Q_b e_i`, each basis carrying a
/// random share of the mass. Every such measure is unit-norm, zero-mean,
/// and tight with frame operator `I/N`.
pub fn random_two_design(dim: usize, bases: usize, rng: &mut impl Rng) -> DiscreteMeasure {
    let shares = random_weights(bases, rng);
    let mut points = Vec::with_capacity(bases * 2 * dim);
    let mut weights = Vec::with_capacity(bases * 2 * dim);
    for share in shares {
        let q = random_rotation(dim, rng);
        for j in 0..dim {
            let col = q.column(j).into_owned();
            points.push(col.clone());
            points.push(-col);
            weights.push(share / (2.0 * dim as f64));
            weights.push(share / (2.0 * dim as f64));
        }
    }
    DiscreteMeasure::new(points, weights).expect("construction yields valid weights")
}
