use rand::seq::index::sample;
use rand::Rng;

use crate::block::BlockIndexSet;
use crate::ensembles::stream_rng;
use crate::error::{Error, Result};
use crate::support::SupportEstimate;
use crate::theory::PriorProfile;

/// Set sizes `(|T̃_i|, |T̃_i ∩ T|)` implied by a profile at sparsity `k`,
/// rounded to the nearest integer.
pub fn estimate_counts(profile: &PriorProfile, k: usize) -> Vec<(usize, usize)> {
    profile
        .rhos()
        .iter()
        .zip(profile.alphas())
        .map(|(&rho, &alpha)| {
            let size = (rho * k as f64).round() as usize;
            let hits = (alpha * rho * k as f64).round() as usize;
            (size, hits.min(size))
        })
        .collect()
}

/// Draws `L` disjoint estimates of the true block support `truth`.
///
/// Set `i` receives `round(α_i ρ_i k)` blocks of `truth` and the rest of its
/// `round(ρ_i k)` blocks from outside `truth`, uniformly and without reuse
/// across sets.
pub fn generate_estimate(
    truth: &BlockIndexSet,
    num_blocks: usize,
    k: usize,
    profile: &PriorProfile,
    seed: u64,
) -> Result<SupportEstimate> {
    let mut rng = stream_rng(seed, 0);
    generate_estimate_with(truth, num_blocks, k, profile, &mut rng)
}

pub fn generate_estimate_with<R: Rng + ?Sized>(
    truth: &BlockIndexSet,
    num_blocks: usize,
    k: usize,
    profile: &PriorProfile,
    rng: &mut R,
) -> Result<SupportEstimate> {
    let mut inside: Vec<usize> = truth.iter().collect();
    let mut outside: Vec<usize> = truth.complement(num_blocks).iter().collect();
    let counts = estimate_counts(profile, k);

    let need_in: usize = counts.iter().map(|(_, h)| h).sum();
    let need_out: usize = counts.iter().map(|(s, h)| s - h).sum();
    if need_in > inside.len() || need_out > outside.len() {
        return Err(Error::InfeasibleEstimate(format!(
            "estimates need {need_in} of {} true blocks and {need_out} of {} other blocks",
            inside.len(),
            outside.len()
        )));
    }

    let mut sets = Vec::with_capacity(counts.len());
    for (size, hits) in counts {
        let mut chosen = take_random(&mut inside, hits, rng);
        chosen.extend(take_random(&mut outside, size - hits, rng));
        sets.push(BlockIndexSet::new(chosen, num_blocks)?);
    }
    SupportEstimate::new(sets, profile.clone(), num_blocks)
}

/// Removes `count` uniformly chosen entries from `pool`, keeping the rest in order.
fn take_random<R: Rng + ?Sized>(pool: &mut Vec<usize>, count: usize, rng: &mut R) -> Vec<usize> {
    if count == 0 {
        return Vec::new();
    }
    let mut picks = sample(rng, pool.len(), count).into_vec();
    picks.sort_unstable();
    let chosen: Vec<usize> = picks.iter().map(|&p| pool[p]).collect();
    for &p in picks.iter().rev() {
        pool.remove(p);
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn truth(ix: &[usize], m: usize) -> BlockIndexSet {
        BlockIndexSet::new(ix.to_vec(), m).unwrap()
    }

    #[test]
    fn perfect_and_useless_estimates() {
        let t = truth(&[1, 4, 7, 9], 12);
        let exact =
            generate_estimate(&t, 12, 4, &PriorProfile::single(0.5, 1.0, 1.0).unwrap(), 3).unwrap();
        assert_eq!(exact.sets()[0], t);

        let wrong =
            generate_estimate(&t, 12, 4, &PriorProfile::single(0.5, 1.0, 0.0).unwrap(), 3).unwrap();
        assert_eq!(wrong.sets()[0].len(), 4);
        assert!(wrong.sets()[0].is_disjoint(&t));
    }

    #[test]
    fn two_estimates_counts() {
        let m = 128;
        let t = truth(&(0..20).map(|i| i * 6).collect::<Vec<_>>(), m);
        let p = PriorProfile::new(vec![0.5, 0.25], vec![0.5, 0.5], vec![0.8, 0.8]).unwrap();
        let est = generate_estimate(&t, m, 20, &p, 17).unwrap();
        for s in est.sets() {
            assert_eq!(s.len(), 10);
            assert_eq!(s.intersection(&t).len(), 8);
        }
        assert!(est.sets()[0].is_disjoint(&est.sets()[1]));
        assert_eq!(est, generate_estimate(&t, m, 20, &p, 17).unwrap());
    }

    #[test]
    fn infeasible_combinations() {
        let t = truth(&[0, 1], 4);
        // three true hits requested from a support of two
        let p = PriorProfile::single(0.5, 1.5, 1.0).unwrap();
        assert!(matches!(
            generate_estimate(&t, 4, 2, &p, 0),
            Err(Error::InfeasibleEstimate(_))
        ));
        // more false blocks than exist
        let p = PriorProfile::single(0.5, 2.0, 0.0).unwrap();
        assert!(generate_estimate(&t, 4, 2, &p, 0).is_err());
    }

    proptest! {
        #[test]
        fn cardinality_invariants(
            m in 10usize..60,
            k_frac in 0.05f64..0.5,
            l in 1usize..4,
            rhos in prop::collection::vec(0.0f64..0.8, 3),
            alphas in prop::collection::vec(0.0f64..=1.0, 3),
            seed in any::<u64>(),
        ) {
            let k = ((m as f64 * k_frac) as usize).max(1);
            let weights: Vec<f64> = (0..l).map(|i| 0.9 - 0.2 * i as f64).collect();
            let profile = PriorProfile::new(weights, rhos[..l].to_vec(), alphas[..l].to_vec()).unwrap();
            let mut rng = stream_rng(seed, 9);
            let mut support = sample(&mut rng, m, k).into_vec();
            support.sort_unstable();
            let t = BlockIndexSet::new(support, m).unwrap();
            let counts = estimate_counts(&profile, k);
            let need_in: usize = counts.iter().map(|c| c.1).sum();
            let need_out: usize = counts.iter().map(|c| c.0 - c.1).sum();
            match generate_estimate(&t, m, k, &profile, seed) {
                Ok(est) => {
                    prop_assert!(need_in <= k && need_out <= m - k);
                    for (s, (size, hits)) in est.sets().iter().zip(&counts) {
                        prop_assert_eq!(s.len(), *size);
                        prop_assert_eq!(s.intersection(&t).len(), *hits);
                    }
                    for i in 0..l {
                        for j in i + 1..l {
                            prop_assert!(est.sets()[i].is_disjoint(&est.sets()[j]));
                        }
                    }
                }
                Err(_) => prop_assert!(need_in > k || need_out > m - k),
            }
        }
    }
}
