//! Iteratively reweighted least squares for
//!
//! ```text
//! min_x  Σ_i w_i (‖x[i]‖² + ε²)^{1/2} + (1/2τ) ‖y − Ax‖²
//! ```
//!
//! with the smoothing `ε` driven to zero by the (k̂+1)-th largest block norm.

use std::fmt;
use std::sync::Arc;

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};

use super::linalg::{min_norm_least_squares, scaled_ridge_solve};
use crate::block::{BlockSignal, BlockStructure};
use crate::error::{Error, Result};
use crate::support::SupportEstimate;

/// Per-block weights in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && **w <= 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "IRLS weights must lie in (0, 1], got {w}"
            )));
        }
        Ok(Self(weights))
    }

    pub fn ones(num_blocks: usize) -> Self {
        Self(vec![1.0; num_blocks])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Expands a support estimate into block weights: `ω_j` on `T̃_j`, 1 elsewhere.
pub fn weights_from_estimate(
    estimate: &SupportEstimate,
    num_blocks: usize,
) -> Result<WeightVector> {
    let mut w = vec![1.0; num_blocks];
    let mut seen = vec![false; num_blocks];
    for (set, &omega) in estimate.sets().iter().zip(estimate.weights()) {
        for i in set.iter() {
            if i >= num_blocks {
                return Err(Error::InvalidArgument(format!(
                    "block index {i} out of range for {num_blocks} blocks"
                )));
            }
            if seen[i] {
                return Err(Error::InfeasibleEstimate(format!(
                    "block {i} appears in more than one estimate"
                )));
            }
            seen[i] = true;
            w[i] = omega;
        }
    }
    WeightVector::new(w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrlsConfig {
    pub tau: f64,
    pub nu: f64,
    pub k_hat: usize,
    pub eps_tol: f64,
    pub step_tol: f64,
    pub max_iters: usize,
}

impl IrlsConfig {
    /// Experiment defaults: ν = 0.7, ε-stop 1e-7, step-stop 1e-8, 1000 iterations.
    pub fn new(k_hat: usize, tau: f64) -> Self {
        Self {
            tau,
            nu: 0.7,
            k_hat,
            eps_tol: 1e-7,
            step_tol: 1e-8,
            max_iters: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau", self.tau),
            ("eps_tol", self.eps_tol),
            ("step_tol", self.step_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "nu must lie in (0, 1), got {}",
                self.nu
            )));
        }
        if self.k_hat == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument(
                "k_hat and max_iters must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    EpsConverged,
    StepConverged,
    MaxIters,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::EpsConverged => "eps_converged",
            Termination::StepConverged => "step_converged",
            Termination::MaxIters => "max_iters",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrlsResult {
    pub solution: BlockSignal,
    pub iterations: usize,
    pub final_eps: f64,
    pub termination: Termination,
}

/// State handed to an observer after each completed iteration.
#[derive(Debug)]
pub struct IrlsStep<'a> {
    /// 1-based count of completed iterations.
    pub iteration: usize,
    pub previous: &'a DVector<f64>,
    pub current: &'a DVector<f64>,
    pub previous_eps: f64,
    pub eps: f64,
}

/// Diagonal of `W = diag(√w_i (ε² + ‖x[i]‖²)^{-1/4})`, expanded to coordinates.
pub fn irls_weight_matrix_diag(
    structure: &BlockStructure,
    x: &[f64],
    weights: &WeightVector,
    eps: f64,
) -> Result<DVector<f64>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    check_lengths(structure, x.len(), weights)?;
    let mut diag = DVector::zeros(structure.dim());
    for (i, norm) in structure.block_norms_of(x).into_iter().enumerate() {
        let v = weights.0[i].sqrt() * (eps * eps + norm * norm).powf(-0.25);
        for c in structure.range(i) {
            diag[c] = v;
        }
    }
    Ok(diag)
}

fn check_lengths(structure: &BlockStructure, len: usize, weights: &WeightVector) -> Result<()> {
    if len != structure.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {len} for dimension {}",
            structure.dim()
        )));
    }
    if weights.len() != structure.num_blocks() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} blocks",
            weights.len(),
            structure.num_blocks()
        )));
    }
    Ok(())
}

/// Smoothed objective `f(x, ε, τ)`.
pub fn objective(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    structure: &BlockStructure,
    weights: &WeightVector,
    x: &DVector<f64>,
    eps: f64,
    tau: f64,
) -> f64 {
    let penalty: f64 = structure
        .block_norms_of(x.as_slice())
        .iter()
        .zip(weights.as_slice())
        .map(|(n, w)| w * (n * n + eps * eps).sqrt())
        .sum();
    penalty + (y - a * x).norm_squared() / (2.0 * tau)
}

/// `(k̂+1)`-th largest block norm, or 0 when there are at most `k̂` blocks.
fn kth_block_norm(structure: &BlockStructure, x: &DVector<f64>, k_hat: usize) -> f64 {
    let mut norms = structure.block_norms_of(x.as_slice());
    if k_hat >= norms.len() {
        return 0.0;
    }
    norms.sort_by(|a, b| b.total_cmp(a));
    norms[k_hat]
}

pub fn irls_solve(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    structure: Arc<BlockStructure>,
    weights: &WeightVector,
    cfg: &IrlsConfig,
) -> Result<IrlsResult> {
    irls_solve_observed(a, y, structure, weights, cfg, |_| {})
}

/// [`irls_solve`], calling `observe` after every iteration.
pub fn irls_solve_observed<F>(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    structure: Arc<BlockStructure>,
    weights: &WeightVector,
    cfg: &IrlsConfig,
    mut observe: F,
) -> Result<IrlsResult>
where
    F: FnMut(&IrlsStep<'_>),
{
    cfg.validate()?;
    if a.ncols() != structure.dim() || a.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, y has {} entries, dimension is {}",
            a.nrows(),
            a.ncols(),
            y.len(),
            structure.dim()
        )));
    }
    check_lengths(&structure, a.ncols(), weights)?;
    let dim = structure.dim() as f64;

    let mut x = min_norm_least_squares(a, y)?.x;
    let mut eps = 1.0;
    let mut termination = Termination::MaxIters;
    let mut iterations = 0;

    for t in 0..cfg.max_iters {
        let w_diag = irls_weight_matrix_diag(&structure, x.as_slice(), weights, eps)?;
        let inv = w_diag.map(|v| 1.0 / v);
        let next = scaled_ridge_solve(a, y, &inv, cfg.tau)?;

        let r = kth_block_norm(&structure, &next, cfg.k_hat);
        if t == 0 && cfg.nu * r / dim >= 1.0 {
            warn!("nu * r(x1)_(k+1) / N = {} is not below 1", cfg.nu * r / dim);
        }
        let next_eps = eps.min(cfg.nu * r / dim);
        let step = (&next - &x).norm();
        iterations = t + 1;
        observe(&IrlsStep {
            iteration: iterations,
            previous: &x,
            current: &next,
            previous_eps: eps,
            eps: next_eps,
        });
        x = next;
        eps = next_eps;

        if eps < cfg.eps_tol {
            termination = Termination::EpsConverged;
            break;
        }
        if step < cfg.step_tol {
            termination = Termination::StepConverged;
            break;
        }
    }
    debug!("irls: {iterations} iterations, eps = {eps:e}, {termination}");

    Ok(IrlsResult {
        solution: BlockSignal::new(structure, x.data.into())?,
        iterations,
        final_eps: eps,
        termination,
    })
}
