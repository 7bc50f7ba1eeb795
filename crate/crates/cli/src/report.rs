//! JSON report bodies emitted by the subcommands.
//!
//! Field order is declaration order, and floats use the shortest
//! round-trip representation, so a fixed invocation always produces
//! byte-identical output. Non-finite ratios serialize as `null`.

use serde::Serialize;

use pframes::operators::FrameBounds;
use pframes::potential::PotentialReport;

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub dim: usize,
    pub kind: &'static str,
    pub second_moment: f64,
    pub fourth_moment: f64,
    pub mean: Vec<f64>,
    pub support_rank: usize,
    pub is_frame: bool,
    pub bounds: FrameBounds,
    pub eigenvalues: Vec<f64>,
    pub frame_operator: Vec<Vec<f64>>,
}

#[derive(Serialize)]
pub struct PotentialCommandReport {
    pub dim: usize,
    #[serde(flatten)]
    pub potential: PotentialReport,
}

#[derive(Serialize)]
pub struct DesignReport {
    pub dim: usize,
    pub is_design: bool,
    pub tolerance: f64,
    pub max_norm_deviation: f64,
    pub mean_norm: f64,
    pub operator_deviation: f64,
    /// `∬⟨x,y⟩²/∬‖x−y‖²`; only present for sphere-supported measures,
    /// `null` for a point mass (infinite ratio).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixed_potential_ratio: Option<f64>,
}

#[derive(Serialize)]
pub struct DistanceReport {
    pub dim: usize,
    pub cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
pub struct TylerReport {
    pub dim: usize,
    pub points: usize,
    pub iterations: usize,
    pub residual: f64,
    pub gamma_hat: Vec<Vec<f64>>,
    pub tight_frame: serde_json::Value,
}

#[derive(Serialize)]
pub struct McCommandReport {
    pub spec: String,
    pub rows: usize,
    pub dim: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub theory: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct PovmCellReport {
    pub label: String,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
pub struct PovmReport {
    pub dim: usize,
    pub cells: Vec<PovmCellReport>,
    pub valid: bool,
    pub diagnostics: Vec<String>,
}
