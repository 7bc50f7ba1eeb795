//! Probabilistic frames made computable.
//!
//! A probability measure on R^N with finite second moment is a
//! *probabilistic frame* when its support spans the space; finite frames
//! embed as discrete measures. This crate represents such measures,
//! computes their frame-theoretic operators and invariants, constructs new
//! frames from old ones, and measures distances between frames via exact
//! optimal transport.
//!
//! - [`measures`]: discrete and Gaussian-mixture measures, moments,
//!   support diagnostics, seeded sampling.
//! - [`operators`]: frame operator, Gram matrix, frame bounds, canonical
//!   dual and canonical tight transforms.
//! - [`potential`]: frame potential, spherical 2-design predicates, the
//!   John decomposition check.
//! - [`transport`]: exact 2-Wasserstein distance between discrete measures
//!   and the permutation-distance oracle.
//! - [`constructions`]: convolution, product measures, δ₀-mixing, density
//!   grids.
//! - [`estimation`]: Bingham statistic, angular central Gaussian sampling,
//!   Tyler's M-estimator, Monte Carlo checks of random analysis operators.
//! - [`povm`]: positive operator-valued measures induced by tight frames.
//!
//! With the `parallel` feature (default) batch workloads fan out over
//! rayon; disabling it yields a rayon-free sequential build with
//! bit-identical results.
//!
//! ```
//! use nalgebra::dvector;
//! use pframes::operators::{canonical_dual, frame_bounds, DEFAULT_TIGHT_TOL};
//! use pframes::DiscreteMeasure;
//!
//! // Three unit vectors at 120° carry a tight probabilistic frame.
//! let s = 3f64.sqrt() / 2.0;
//! let mb = DiscreteMeasure::uniform(vec![
//!     dvector![0.0, 1.0],
//!     dvector![-s, -0.5],
//!     dvector![s, -0.5],
//! ])?;
//! let bounds = frame_bounds(&mb.clone().into(), DEFAULT_TIGHT_TOL);
//! assert!(bounds.tight);
//! assert!((bounds.lower - 0.5).abs() < 1e-12);
//!
//! // Its canonical dual just rescales by 1/A = 2.
//! let dual = canonical_dual(&mb)?;
//! assert!((&dual.points()[0] - dvector![0.0, 2.0]).norm() < 1e-12);
//! # Ok::<(), pframes::Error>(())
//! ```

pub mod constructions;
pub mod error;
pub mod estimation;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod operators;
pub mod parallel;
pub mod potential;
pub mod povm;
pub mod transport;

pub use error::{Error, Result};
pub use measures::{DiscreteMeasure, GaussianComponent, GaussianMixtureMeasure, Measure};
