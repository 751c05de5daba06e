//! Closed-form recovery constants for weighted ℓ2/ℓ1 minimization with
//! prior block-support estimates, and the baselines they are compared
//! against.
//!
//! All formulas take the estimate sizes and accuracies as ratios
//! (`|T̃_i| = ρ_i k`, `|T̃_i ∩ T| = α_i ρ_i k`) so they can be swept over real
//! grids; nothing here rounds.

use crate::block::{BlockIndexSet, BlockSignal};
use crate::error::{Error, Result};
use crate::support::SupportEstimate;

/// Weights `ω_1 ≥ … ≥ ω_L`, size ratios `ρ_i` and accuracies `α_i` of `L`
/// disjoint support estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorProfile {
    weights: Vec<f64>,
    rhos: Vec<f64>,
    alphas: Vec<f64>,
}

impl PriorProfile {
    pub fn new(weights: Vec<f64>, rhos: Vec<f64>, alphas: Vec<f64>) -> Result<Self> {
        let l = weights.len();
        if l == 0 {
            return Err(Error::InvalidArgument("profile needs L >= 1".into()));
        }
        if rhos.len() != l || alphas.len() != l {
            return Err(Error::InvalidArgument(format!(
                "profile lengths differ: {} weights, {} rhos, {} alphas",
                l,
                rhos.len(),
                alphas.len()
            )));
        }
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidArgument("weights must lie in [0, 1]".into()));
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "weights must be nonincreasing (ω_1 ≥ … ≥ ω_L)".into(),
            ));
        }
        if rhos.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidArgument("size ratios must be >= 0".into()));
        }
        if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidArgument(
                "accuracies must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            weights,
            rhos,
            alphas,
        })
    }

    /// One estimate with weight `omega`.
    pub fn single(omega: f64, rho: f64, alpha: f64) -> Result<Self> {
        Self::new(vec![omega], vec![rho], vec![alpha])
    }

    /// The same profile with every weight replaced by `omega`.
    pub fn with_uniform_weight(&self, omega: f64) -> Result<Self> {
        Self::new(
            vec![omega; self.len()],
            self.rhos.clone(),
            self.alphas.clone(),
        )
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `ρ = Σ ρ_i`.
    pub fn total_rho(&self) -> f64 {
        self.rhos.iter().sum()
    }

    /// `Σ_{j≥i} α_j ρ_j` (zero-based `i`).
    fn hit_mass_from(&self, i: usize) -> f64 {
        (i..self.len()).map(|j| self.alphas[j] * self.rhos[j]).sum()
    }

    /// `Σ_{j≥i} (1 − α_j) ρ_j`.
    fn miss_mass_from(&self, i: usize) -> f64 {
        (i..self.len())
            .map(|j| (1.0 - self.alphas[j]) * self.rhos[j])
            .sum()
    }

    /// `√(1 + Σ_{j≥i} ρ_j − 2 Σ_{j≥i} α_j ρ_j)`.
    fn tail_root(&self, i: usize) -> f64 {
        let rho: f64 = self.rhos[i..].iter().sum();
        (1.0 + rho - 2.0 * self.hit_mass_from(i)).max(0.0).sqrt()
    }
}

/// Telescoping weight/accuracy aggregate `Υ_L`. The same expression is the
/// `K_L` of the standard-RIP weighted ℓ1 baseline.
pub fn upsilon(profile: &PriorProfile) -> f64 {
    let w = profile.weights();
    let l = profile.len();
    let mut acc = w[l - 1] + (1.0 - w[0]) * profile.tail_root(0);
    for i in 1..l {
        acc += (w[i - 1] - w[i]) * profile.tail_root(i);
    }
    acc
}

/// The order shift `d`; real-valued for non-integral `ρ_i k`.
pub fn d_param(profile: &PriorProfile) -> f64 {
    let w = profile.weights();
    if w.iter().product::<f64>() == 1.0 {
        return 1.0;
    }
    (0..profile.len())
        .map(|i| {
            let sign = if i == 0 {
                1.0
            } else {
                signum0(w[i - 1] - w[i])
            };
            let hits = profile.hit_mass_from(i);
            let a_i = hits.max(profile.miss_mass_from(i));
            sign * (1.0 - hits + a_i)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn signum0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_t(t: f64, d: f64) -> Result<()> {
    if !(t > d) {
        return Err(Error::Inadmissible(format!("t = {t} must exceed d = {d}")));
    }
    Ok(())
}

/// Upper bound on `δ_{tk}` that guarantees weighted recovery:
/// `√((t−d)/(t−d+Υ²))`.
pub fn delta_bound(t: f64, profile: &PriorProfile) -> Result<f64> {
    let d = d_param(profile);
    check_t(t, d)?;
    let ups = upsilon(profile);
    Ok(((t - d) / (t - d + ups * ups)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    pub d0: f64,
    pub d1: f64,
}

/// Noise and tail constants `(D0, D1)` of the weighted error bound.
pub fn stability_constants(
    delta: f64,
    t: f64,
    profile: &PriorProfile,
) -> Result<StabilityConstants> {
    let d = d_param(profile);
    check_t(t, d)?;
    let ups = upsilon(profile);
    let s = t - d + ups * ups;
    let bound = ((t - d) / s).sqrt();
    if !(0.0..bound).contains(&delta) {
        return Err(Error::Inadmissible(format!(
            "δ = {delta} outside [0, {bound})"
        )));
    }
    let gap = bound - delta;
    let denom = s * gap;
    let d0 = (2.0 * (t - d) * s * (1.0 + delta)).sqrt() / denom;
    let d1 = (2f64.sqrt() * delta * ups + (s * gap * delta).sqrt()) / denom + 1.0 / d.sqrt();
    Ok(StabilityConstants { d0, d1 })
}

/// `(C0, C1)` of the unweighted ℓ2/ℓ1 baseline under `δ_{tk} < √((t−1)/t)`.
pub fn baseline_constants(delta: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 1.0) {
        return Err(Error::Inadmissible(format!("t = {t} must exceed 1")));
    }
    let bound = ((t - 1.0) / t).sqrt();
    if !(0.0..bound).contains(&delta) {
        return Err(Error::Inadmissible(format!(
            "δ = {delta} outside [0, {bound})"
        )));
    }
    let gap = bound - delta;
    let c0 = (2.0 * t * (t - 1.0) * (1.0 + delta)).sqrt() / (t * gap);
    let c1 = (2f64.sqrt() * delta + (t * gap * delta).sqrt()) / (t * gap) + 1.0;
    Ok((c0, c1))
}

/// Constants of the weighted ℓ1 baseline stated with the standard RIP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NswConstants {
    pub k_l: f64,
    /// `δ(a+1, K_L) = (a − K_L²)/(a + K_L²)`.
    pub delta_bound: f64,
    pub c0: f64,
    pub c1: f64,
}

pub fn nsw_constants(
    profile: &PriorProfile,
    a: f64,
    delta_ak: f64,
    delta_a1k: f64,
) -> Result<NswConstants> {
    if !(a > 1.0) {
        return Err(Error::Inadmissible(format!("a = {a} must exceed 1")));
    }
    for (name, v) in [("δ_ak", delta_ak), ("δ_(a+1)k", delta_a1k)] {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::Inadmissible(format!("{name} = {v} outside [0, 1)")));
        }
    }
    let k_l = upsilon(profile);
    let root_a = a.sqrt();
    let denom = (1.0 - delta_a1k).sqrt() - k_l / root_a * (1.0 + delta_ak).sqrt();
    if !(denom > 0.0) {
        return Err(Error::Inadmissible(
            "RIP constants too large for the baseline bound".into(),
        ));
    }
    let c0 = (1.0 + k_l / root_a) / denom;
    let c1 = ((1.0 - delta_a1k).sqrt() + (1.0 + delta_ak).sqrt()) / root_a / denom;
    Ok(NswConstants {
        k_l,
        delta_bound: (a - k_l * k_l) / (a + k_l * k_l),
        c0,
        c1,
    })
}

/// Everything the weighted sufficient condition needs at one `(t, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    pub t: f64,
    pub upsilon: f64,
    pub d: f64,
    pub delta_bound: f64,
    /// `None` when `δ` is not below `delta_bound`.
    pub stability: Option<StabilityConstants>,
}

impl TheoryConstants {
    pub fn evaluate(t: f64, delta: f64, profile: &PriorProfile) -> Result<Self> {
        Ok(Self {
            t,
            upsilon: upsilon(profile),
            d: d_param(profile),
            delta_bound: delta_bound(t, profile)?,
            stability: stability_constants(delta, t, profile).ok(),
        })
    }
}

/// The tail combination
/// `Σω_i‖x[Λ^c]‖ + (1−Σω_i)‖x[T̃^c∩Λ^c]‖ − Σ_i(Σ_jω_j − ω_i)‖x[T̃_i∩Λ^c]‖`
/// for a block set `Λ` (the true support `T` or any `Γ`).
fn weighted_tail(
    x: &BlockSignal,
    outside: &BlockIndexSet,
    sets: &[BlockIndexSet],
    weights: &[f64],
) -> f64 {
    let m = x.structure().num_blocks();
    let total: f64 = weights.iter().sum();
    let union = sets
        .iter()
        .fold(BlockIndexSet::empty(), |acc, s| acc.union(s));
    let mut tail = total * x.restricted_l21(outside)
        + (1.0 - total) * x.restricted_l21(&union.complement(m).intersection(outside));
    for (set, w) in sets.iter().zip(weights) {
        tail -= (total - w) * x.restricted_l21(&set.intersection(outside));
    }
    tail
}

/// Right-hand side of the weighted ℓ2/ℓ1 error bound,
/// `2 D0 ε + 2 D1 k^{-1/2} · tail(x, T, T̃)`, where `support` is the block
/// support `T` of the best block-`k` approximation.
pub fn error_bound_rhs(
    x: &BlockSignal,
    support: &BlockIndexSet,
    estimate: &SupportEstimate,
    k: usize,
    constants: StabilityConstants,
    eps: f64,
) -> f64 {
    let m = x.structure().num_blocks();
    let (sets, weights) = estimate.effective();
    let tail = weighted_tail(x, &support.complement(m), &sets, &weights);
    2.0 * constants.d0 * eps + 2.0 * constants.d1 / (k as f64).sqrt() * tail
}

/// Slack in the block cone constraint: RHS − ‖h[Γ^c]‖_{2,1}. Nonnegative
/// for every `Γ` whenever `x + h` minimizes the weighted ℓ2/ℓ1 program.
pub fn cone_constraint_gap(
    h: &BlockSignal,
    x: &BlockSignal,
    gamma: &BlockIndexSet,
    estimate: &SupportEstimate,
) -> Result<f64> {
    if h.structure() != x.structure() {
        return Err(Error::DimensionMismatch(
            "h and x use different block structures".into(),
        ));
    }
    let m = x.structure().num_blocks();
    let (sets, weights) = estimate.effective();
    let l = weights.len();
    let gamma_c = gamma.complement(m);

    let mut rhs = weights[l - 1] * h.restricted_l21(gamma);
    // nested unions U_i = ∪_{j≥i} T̃_j, innermost first
    let mut suffix = vec![BlockIndexSet::empty(); l + 1];
    for i in (0..l).rev() {
        suffix[i] = suffix[i + 1].union(&sets[i]);
    }
    rhs += (1.0 - weights[0]) * h.restricted_l21(&gamma.symmetric_difference(&suffix[0]));
    for i in 1..l {
        rhs += (weights[i - 1] - weights[i])
            * h.restricted_l21(&gamma.symmetric_difference(&suffix[i]));
    }
    rhs += 2.0 * weighted_tail(x, &gamma_c, &sets, &weights);
    Ok(rhs - h.restricted_l21(&gamma_c))
}

/// Sufficient measurement count for the random ensembles to meet the
/// weighted block-RIP condition with high probability (natural log).
pub fn measurement_bound(
    t: f64,
    k: usize,
    num_blocks: usize,
    profile: &PriorProfile,
) -> Result<f64> {
    if k == 0 || num_blocks <= k {
        return Err(Error::InvalidArgument(format!(
            "need 0 < k < M, got k = {k}, M = {num_blocks}"
        )));
    }
    let d = d_param(profile);
    check_t(t, d)?;
    let ups = upsilon(profile);
    let ratio = (t - d) / (t - d + ups * ups);
    let denom = ratio / 16.0 - ratio.powf(1.5) / 48.0;
    if !(denom > 0.0) {
        return Err(Error::Inadmissible(
            "measurement bound denominator is not positive".into(),
        ));
    }
    let k = k as f64;
    Ok(t * k * (num_blocks as f64 / k).ln() / denom)
}
