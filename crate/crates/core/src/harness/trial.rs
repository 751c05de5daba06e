use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::estimate::generate_estimate_with;
use crate::block::{random_block_sparse_with, BlockSignal, BlockStructure};
use crate::ensembles::{sample_entries, stream_rng, Ensemble};
use crate::error::{Error, Result};
use crate::solver::{irls_solve, weights_from_estimate, IrlsConfig, Termination};
use crate::support::SupportEstimate;
use crate::theory::PriorProfile;

/// Relative ℓ2 error at or below which a recovery counts as exact.
pub const EXACT_TOLERANCE: f64 = 1e-4;

/// Random streams carved out of one trial seed.
const SIGNAL_STREAM: u64 = 0;
const MATRIX_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const ESTIMATE_STREAM: u64 = 3;

/// How the IRLS regularisation `τ` is chosen for a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauPolicy {
    /// `1e-3` without noise, `0.1·max|A'y|` with noise.
    Auto,
    Fixed(f64),
    /// `c · max|A'y|`.
    MaxCorrelation(f64),
}

impl TauPolicy {
    pub fn resolve(self, sigma: f64, max_correlation: f64) -> f64 {
        match self {
            TauPolicy::Auto if sigma == 0.0 => 1e-3,
            TauPolicy::Auto => 0.1 * max_correlation,
            TauPolicy::Fixed(t) => t,
            TauPolicy::MaxCorrelation(c) => c * max_correlation,
        }
    }
}

impl fmt::Display for TauPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauPolicy::Auto => f.write_str("auto"),
            TauPolicy::Fixed(t) => write!(f, "fixed:{t}"),
            TauPolicy::MaxCorrelation(c) => write!(f, "maxcorr:{c}"),
        }
    }
}

impl FromStr for TauPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("bad tau policy `{s}`"));
        let positive = |v: &str| -> Result<f64> {
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        if s == "auto" {
            Ok(TauPolicy::Auto)
        } else if let Some(v) = s.strip_prefix("fixed:") {
            Ok(TauPolicy::Fixed(positive(v)?))
        } else if let Some(v) = s.strip_prefix("maxcorr:") {
            Ok(TauPolicy::MaxCorrelation(positive(v)?))
        } else {
            Ok(TauPolicy::Fixed(positive(s)?))
        }
    }
}

/// Everything that defines one Monte-Carlo trial apart from its seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialParams {
    pub num_blocks: usize,
    pub block_len: usize,
    pub k: usize,
    pub n: usize,
    pub ensemble: Ensemble,
    pub sigma: f64,
    pub tau: TauPolicy,
    pub profile: PriorProfile,
    /// Sparsity handed to the solver; `None` means the true `k`.
    pub k_hat: Option<usize>,
    pub max_iters: usize,
}

impl TrialParams {
    /// Noiseless standard-Gaussian trial with experiment solver settings.
    pub fn new(
        num_blocks: usize,
        block_len: usize,
        k: usize,
        n: usize,
        profile: PriorProfile,
    ) -> Self {
        Self {
            num_blocks,
            block_len,
            k,
            n,
            ensemble: Ensemble::GaussianUnit,
            sigma: 0.0,
            tau: TauPolicy::Auto,
            profile,
            k_hat: None,
            max_iters: 1000,
        }
    }

    pub fn dim(&self) -> usize {
        self.num_blocks * self.block_len
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_blocks == 0 || self.block_len == 0 || self.n == 0 {
            return Err(Error::InvalidArgument(
                "M, block_len and n must be positive".into(),
            ));
        }
        if self.k > self.num_blocks {
            return Err(Error::InvalidArgument(format!(
                "k = {} exceeds M = {}",
                self.k, self.num_blocks
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma = {} must be >= 0",
                self.sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialStatus {
    Solved(Termination),
    /// Zero signal: relative error and SNR are undefined.
    Degenerate,
    Failed(String),
}

impl fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialStatus::Solved(t) => t.fmt(f),
            TrialStatus::Degenerate => f.write_str("degenerate"),
            TrialStatus::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub ensemble: Ensemble,
    pub dim: usize,
    pub num_blocks: usize,
    pub k: usize,
    pub block_len: usize,
    pub sigma: f64,
    pub profile: PriorProfile,
    pub tau: f64,
    pub relative_error: f64,
    pub snr_db: f64,
    pub exact: bool,
    pub iterations: usize,
    pub status: TrialStatus,
}

/// A trial record together with the objects it was computed from.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    pub signal: BlockSignal,
    pub estimate: Option<SupportEstimate>,
    pub solution: Option<BlockSignal>,
}

/// `‖x̂ − x‖₂ / ‖x‖₂`.
pub fn relative_error(estimate: &[f64], truth: &[f64]) -> f64 {
    let (diff, norm) = error_energies(estimate, truth);
    (diff / norm).sqrt()
}

/// `20 log10(‖x‖² / ‖x̂ − x‖²)` in dB.
pub fn snr_db(estimate: &[f64], truth: &[f64]) -> f64 {
    let (diff, norm) = error_energies(estimate, truth);
    20.0 * (norm / diff).log10()
}

fn error_energies(estimate: &[f64], truth: &[f64]) -> (f64, f64) {
    assert_eq!(estimate.len(), truth.len());
    let diff = estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let norm = truth.iter().map(|v| v * v).sum();
    (diff, norm)
}

pub fn run_trial(params: &TrialParams, seed: u64) -> Result<TrialRecord> {
    Ok(run_trial_detailed(params, seed)?.record)
}

/// Runs one seeded trial. Parameter errors are returned; anything that goes
/// wrong after sampling (an infeasible estimate, a solver failure) is
/// recorded in the trial's status instead.
pub fn run_trial_detailed(params: &TrialParams, seed: u64) -> Result<TrialOutcome> {
    params.validate()?;
    let structure = Arc::new(BlockStructure::uniform(
        params.num_blocks,
        params.block_len,
    )?);
    let mut record = TrialRecord {
        seed,
        n: params.n,
        ensemble: params.ensemble,
        dim: params.dim(),
        num_blocks: params.num_blocks,
        k: params.k,
        block_len: params.block_len,
        sigma: params.sigma,
        profile: params.profile.clone(),
        tau: f64::NAN,
        relative_error: f64::NAN,
        snr_db: f64::NAN,
        exact: false,
        iterations: 0,
        status: TrialStatus::Degenerate,
    };
    if params.k == 0 {
        return Ok(TrialOutcome {
            record,
            signal: BlockSignal::zeros(structure),
            estimate: None,
            solution: None,
        });
    }

    let signal = random_block_sparse_with(
        Arc::clone(&structure),
        params.k,
        &mut stream_rng(seed, SIGNAL_STREAM),
    )?;
    let a = sample_entries(
        params.ensemble,
        params.n,
        params.dim(),
        &mut stream_rng(seed, MATRIX_STREAM),
    )?;
    let x = DVector::from_column_slice(signal.values());
    let mut y = &a * &x;
    if params.sigma > 0.0 {
        let mut rng = stream_rng(seed, NOISE_STREAM);
        for v in y.iter_mut() {
            *v += params.sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }

    let truth = signal.block_support(0.0);
    let estimate = match generate_estimate_with(
        &truth,
        params.num_blocks,
        params.k,
        &params.profile,
        &mut stream_rng(seed, ESTIMATE_STREAM),
    ) {
        Ok(e) => e,
        Err(e) => {
            record.status = TrialStatus::Failed(e.to_string());
            return Ok(TrialOutcome {
                record,
                signal,
                estimate: None,
                solution: None,
            });
        }
    };

    let max_correlation = a.tr_mul(&y).amax();
    let tau = params.tau.resolve(params.sigma, max_correlation);
    record.tau = tau;
    let mut cfg = IrlsConfig::new(params.k_hat.unwrap_or(params.k), tau);
    cfg.max_iters = params.max_iters;

    let solved = weights_from_estimate(&estimate, params.num_blocks)
        .and_then(|w| irls_solve(&a, &y, Arc::clone(&structure), &w, &cfg));
    let solution = match solved {
        Ok(res) => {
            record.relative_error = relative_error(res.solution.values(), signal.values());
            record.snr_db = snr_db(res.solution.values(), signal.values());
            record.exact = record.relative_error <= EXACT_TOLERANCE;
            record.iterations = res.iterations;
            record.status = TrialStatus::Solved(res.termination);
            Some(res.solution)
        }
        Err(e) => {
            record.status = TrialStatus::Failed(e.to_string());
            None
        }
    };
    Ok(TrialOutcome {
        record,
        signal,
        estimate: Some(estimate),
        solution,
    })
}
