//! Random measurement ensembles and an exhaustive block-RIP estimator.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::block::BlockStructure;
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};

/// Largest number of supports [`empirical_block_rip`] will enumerate.
pub const RIP_ENUMERATION_LIMIT: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ensemble {
    /// i.i.d. N(0, 1), unscaled; the ensemble used by the recovery experiments.
    GaussianUnit,
    /// i.i.d. N(0, 1/n).
    GaussianScaled,
    /// ±1/√n with probability 1/2 each.
    Rademacher,
    /// ±√(3/n) with probability 1/6 each, 0 with probability 2/3.
    SparseTernary,
}

impl Ensemble {
    pub const ALL: [Ensemble; 4] = [
        Ensemble::GaussianUnit,
        Ensemble::GaussianScaled,
        Ensemble::Rademacher,
        Ensemble::SparseTernary,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Ensemble::GaussianUnit => "gaussian_unit",
            Ensemble::GaussianScaled => "gaussian_scaled",
            Ensemble::Rademacher => "rademacher",
            Ensemble::SparseTernary => "sparse_ternary",
        }
    }

    fn draw<R: Rng + ?Sized>(self, rows: usize, rng: &mut R) -> f64 {
        let n = rows as f64;
        match self {
            Ensemble::GaussianUnit => rng.sample(StandardNormal),
            Ensemble::GaussianScaled => rng.sample::<f64, _>(StandardNormal) / n.sqrt(),
            Ensemble::Rademacher => {
                if rng.random::<bool>() {
                    1.0 / n.sqrt()
                } else {
                    -1.0 / n.sqrt()
                }
            }
            Ensemble::SparseTernary => match rng.random_range(0..6u8) {
                0 => (3.0 / n).sqrt(),
                1 => -(3.0 / n).sqrt(),
                _ => 0.0,
            },
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.tag() == s.trim())
            .ok_or_else(|| Error::UnknownEnsemble(s.to_string()))
    }
}

/// An `n × N` sensing matrix together with how it was drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    pub entries: DMatrix<f64>,
    pub ensemble: Ensemble,
    pub seed: u64,
}

impl MeasurementMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }
}

/// Seeded ChaCha stream `stream` of `seed`; used to give each trial or
/// component its own reproducible random source.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_matrix(
    ensemble: Ensemble,
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<MeasurementMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = sample_entries(ensemble, rows, cols, &mut rng)?;
    Ok(MeasurementMatrix {
        entries,
        ensemble,
        seed,
    })
}

/// Draws the entries column by column from `rng`.
pub fn sample_entries<R: Rng + ?Sized>(
    ensemble: Ensemble,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "matrix shape {rows}x{cols} must be nonempty"
        )));
    }
    let data: Vec<f64> = (0..rows * cols).map(|_| ensemble.draw(rows, rng)).collect();
    Ok(DMatrix::from_vec(rows, cols, data))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Deviation from isometry of `A` restricted to the given blocks:
/// `max(λ_max − 1, 1 − λ_min)` of the Gram matrix of those columns.
fn support_deviation(a: &DMatrix<f64>, structure: &BlockStructure, blocks: &[usize]) -> f64 {
    let cols: Vec<usize> = blocks.iter().flat_map(|&b| structure.range(b)).collect();
    let sub = a.select_columns(&cols);
    let gram = sub.tr_mul(&sub);
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    (max - 1.0).max(1.0 - min)
}

/// Exact block-RIP constant `δ_s` by enumerating every `s`-subset of blocks.
pub fn empirical_block_rip(a: &DMatrix<f64>, structure: &BlockStructure, s: usize) -> Result<f64> {
    empirical_block_rip_with(a, structure, s, Execution::default())
}

pub fn empirical_block_rip_with(
    a: &DMatrix<f64>,
    structure: &BlockStructure,
    s: usize,
    exec: Execution,
) -> Result<f64> {
    let m = structure.num_blocks();
    if a.ncols() != structure.dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, structure has dimension {}",
            a.ncols(),
            structure.dim()
        )));
    }
    if s == 0 || s > m {
        return Err(Error::InvalidArgument(format!(
            "s = {s} must lie in 1..={m}"
        )));
    }
    let count = binomial(m, s);
    if count > RIP_ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            m,
            s,
            count,
            limit: RIP_ENUMERATION_LIMIT,
        });
    }
    let supports: Vec<Vec<usize>> = (0..m).combinations(s).collect();
    let deviations = map_slice(exec, &supports, |blocks| {
        support_deviation(a, structure, blocks)
    });
    Ok(deviations.into_iter().fold(0.0, f64::max))
}

/// `2 exp(−n (ε²/4 − ε³/6))`.
pub fn concentration_bound(rows: usize, eps: f64) -> f64 {
    2.0 * (-(rows as f64) * (eps * eps / 4.0 - eps.powi(3) / 6.0)).exp()
}

/// Fraction of `trials` independent (matrix, unit vector) draws with
/// `|‖Ax‖² − 1| ≥ ε`.
pub fn concentration_check(
    ensemble: Ensemble,
    rows: usize,
    cols: usize,
    trials: usize,
    eps: f64,
    seed: u64,
) -> Result<f64> {
    concentration_check_with(
        ensemble,
        rows,
        cols,
        trials,
        eps,
        seed,
        Execution::default(),
    )
}

pub fn concentration_check_with(
    ensemble: Ensemble,
    rows: usize,
    cols: usize,
    trials: usize,
    eps: f64,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "ε = {eps} must lie in (0, 1)"
        )));
    }
    if trials == 0 || rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(
            "trials, n and N must be positive".into(),
        ));
    }
    let failures = crate::exec::map_indexed(exec, trials, |t| {
        let mut rng = stream_rng(seed, t as u64);
        let a = sample_entries(ensemble, rows, cols, &mut rng).expect("shape checked above");
        let mut x = DVector::from_fn(cols, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = x.norm();
        x /= norm;
        let energy = (&a * &x).norm_squared();
        (energy - 1.0).abs() >= eps
    });
    Ok(failures.iter().filter(|&&f| f).count() as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for e in Ensemble::ALL {
            assert_eq!(e.tag().parse::<Ensemble>().unwrap(), e);
        }
        assert!(matches!(
            "bernoulli".parse::<Ensemble>(),
            Err(Error::UnknownEnsemble(_))
        ));
    }

    #[test]
    fn reproducible() {
        for e in Ensemble::ALL {
            let a = sample_matrix(e, 7, 11, 99).unwrap();
            assert_eq!(a, sample_matrix(e, 7, 11, 99).unwrap());
            assert_ne!(a.entries, sample_matrix(e, 7, 11, 100).unwrap().entries);
        }
        assert!(sample_matrix(Ensemble::Rademacher, 0, 3, 1).is_err());
    }

    #[test]
    fn sparse_ternary_zero_fraction() {
        let a = sample_matrix(Ensemble::SparseTernary, 100, 1000, 5).unwrap();
        let zeros = a.entries.iter().filter(|v| **v == 0.0).count() as f64 / 1e5;
        assert!((zeros - 2.0 / 3.0).abs() < 0.01, "{zeros}");
        let level = (3.0f64 / 100.0).sqrt();
        assert!(a
            .entries
            .iter()
            .all(|v| *v == 0.0 || (v.abs() - level).abs() < 1e-15));
    }

    #[test]
    fn rademacher_support() {
        let n = 9;
        let a = sample_matrix(Ensemble::Rademacher, n, 500, 3).unwrap();
        let level = 1.0 / (n as f64).sqrt();
        assert!(a.entries.iter().all(|v| *v == level || *v == -level));
    }

    #[test]
    fn gaussian_scaled_variance() {
        let n = 50;
        let a = sample_matrix(Ensemble::GaussianScaled, n, 2000, 8).unwrap();
        let count = a.entries.len() as f64;
        let mean = a.entries.sum() / count;
        let var = a.entries.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
        let target = 1.0 / n as f64;
        assert!((var - target).abs() < 0.05 * target, "{var}");
    }

    #[test]
    fn isometry_and_scaling() {
        let s = BlockStructure::uniform(3, 2).unwrap();
        let eye = DMatrix::<f64>::identity(6, 6);
        for k in 1..=3 {
            assert!(empirical_block_rip(&eye, &s, k).unwrap().abs() < 1e-12);
        }
        let twice = &eye * 2.0;
        assert!((empirical_block_rip(&twice, &s, 1).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rip_guards() {
        let s = BlockStructure::uniform(40, 1).unwrap();
        let a = DMatrix::<f64>::identity(40, 40);
        assert!(matches!(
            empirical_block_rip(&a, &s, 10),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(empirical_block_rip(&a, &s, 0).is_err());
        let wrong = BlockStructure::uniform(3, 2).unwrap();
        assert!(empirical_block_rip(&a, &wrong, 1).is_err());
    }

    #[test]
    fn rip_monotone_and_permutation_invariant() {
        let s = BlockStructure::uniform(6, 2).unwrap();
        let a = sample_matrix(Ensemble::GaussianScaled, 10, 12, 17)
            .unwrap()
            .entries;
        let deltas: Vec<f64> = (1..=4)
            .map(|k| empirical_block_rip(&a, &s, k).unwrap())
            .collect();
        assert!(deltas.windows(2).all(|w| w[0] <= w[1]));

        // reverse the block order
        let perm: Vec<usize> = (0..6).rev().flat_map(|b| s.range(b)).collect();
        let p = a.select_columns(&perm);
        for k in 1..=3 {
            let lhs = empirical_block_rip(&a, &s, k).unwrap();
            let rhs = empirical_block_rip(&p, &s, k).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let s = BlockStructure::uniform(10, 2).unwrap();
        let a = sample_matrix(Ensemble::Rademacher, 12, 20, 4)
            .unwrap()
            .entries;
        let seq = empirical_block_rip_with(&a, &s, 3, Execution::Sequential).unwrap();
        let par = empirical_block_rip_with(&a, &s, 3, Execution::Parallel).unwrap();
        assert_eq!(seq.to_bits(), par.to_bits());
        let c1 = concentration_check_with(
            Ensemble::GaussianScaled,
            20,
            8,
            300,
            0.3,
            2,
            Execution::Sequential,
        )
        .unwrap();
        let c2 = concentration_check_with(
            Ensemble::GaussianScaled,
            20,
            8,
            300,
            0.3,
            2,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn concentration_examples() {
        // ε near 1 at n = 200: bound 2e^{-200/12} ≈ 1.2e-7
        let rate = concentration_check(Ensemble::GaussianScaled, 200, 8, 10_000, 0.999, 1).unwrap();
        assert!(concentration_bound(200, 0.999) < 1e-6);
        assert_eq!(rate, 0.0);

        let bound = concentration_bound(100, 0.5);
        assert!((bound - 2.0 * (-100.0f64 * (0.0625 - 0.125 / 6.0)).exp()).abs() < 1e-15);
        let trials = 10_000;
        for e in [
            Ensemble::GaussianScaled,
            Ensemble::Rademacher,
            Ensemble::SparseTernary,
        ] {
            let rate = concentration_check(e, 100, 8, trials, 0.5, 11).unwrap();
            let sd = (bound * (1.0 - bound) / trials as f64).sqrt();
            assert!(rate <= bound + 3.0 * sd, "{e}: {rate} > {bound}");
        }

        // n = 1 makes the bound vacuous; only the inequality is checked
        let rate = concentration_check(Ensemble::GaussianScaled, 1, 4, 2000, 0.99, 3).unwrap();
        assert!(rate <= concentration_bound(1, 0.99));
        assert!(concentration_check(Ensemble::GaussianScaled, 10, 4, 10, 1.0, 3).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(16, 2), 120);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }
}
