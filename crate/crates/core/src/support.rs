//! Prior block-support estimates `T̃_1..T̃_L` with their weights.

use crate::block::BlockIndexSet;
use crate::error::{Error, Result};
use crate::theory::PriorProfile;

/// `L` pairwise disjoint block index sets, each carrying a weight and the
/// declared size ratio / accuracy it was generated with.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEstimate {
    sets: Vec<BlockIndexSet>,
    profile: Option<PriorProfile>,
}

impl SupportEstimate {
    pub fn new(sets: Vec<BlockIndexSet>, profile: PriorProfile, num_blocks: usize) -> Result<Self> {
        if sets.len() != profile.len() {
            return Err(Error::InvalidArgument(format!(
                "{} sets but profile has L = {}",
                sets.len(),
                profile.len()
            )));
        }
        if let Some(i) = sets
            .iter()
            .flat_map(|s| s.iter())
            .find(|&i| i >= num_blocks)
        {
            return Err(Error::InvalidArgument(format!(
                "block index {i} out of range for {num_blocks} blocks"
            )));
        }
        for (a, sa) in sets.iter().enumerate() {
            for sb in &sets[a + 1..] {
                if !sa.is_disjoint(sb) {
                    return Err(Error::InfeasibleEstimate(
                        "support estimates overlap".into(),
                    ));
                }
            }
        }
        Ok(Self {
            sets,
            profile: Some(profile),
        })
    }

    /// No prior information: plain (unweighted) ℓ2/ℓ1.
    pub fn empty() -> Self {
        Self {
            sets: Vec::new(),
            profile: None,
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[BlockIndexSet] {
        &self.sets
    }

    pub fn weights(&self) -> &[f64] {
        self.profile.as_ref().map_or(&[], |p| p.weights())
    }

    pub fn profile(&self) -> Option<&PriorProfile> {
        self.profile.as_ref()
    }

    /// `T̃ = ∪ T̃_i`.
    pub fn union(&self) -> BlockIndexSet {
        self.sets
            .iter()
            .fold(BlockIndexSet::empty(), |acc, s| acc.union(s))
    }

    /// Sets and weights with the empty estimate read as one empty set of weight 1.
    pub(crate) fn effective(&self) -> (Vec<BlockIndexSet>, Vec<f64>) {
        if self.sets.is_empty() {
            (vec![BlockIndexSet::empty()], vec![1.0])
        } else {
            (self.sets.clone(), self.weights().to_vec())
        }
    }
}
