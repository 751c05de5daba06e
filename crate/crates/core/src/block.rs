//! Block structures, block signals and mixed norms.
//!
//! Block indices are zero-based throughout the crate: a structure with `M`
//! blocks has indices `0..M`.

use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Partition of `0..N` into `M` consecutive blocks of lengths `d_1..d_M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    lengths: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

impl BlockStructure {
    pub fn new(lengths: Vec<usize>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidStructure(
                "at least one block is required".into(),
            ));
        }
        if let Some(i) = lengths.iter().position(|&d| d == 0) {
            return Err(Error::InvalidStructure(format!(
                "block {i} has zero length"
            )));
        }
        let mut offsets = Vec::with_capacity(lengths.len());
        let mut dim = 0;
        for &d in &lengths {
            offsets.push(dim);
            dim += d;
        }
        Ok(Self {
            lengths,
            offsets,
            dim,
        })
    }

    /// `blocks` blocks of common length `block_len`.
    pub fn uniform(blocks: usize, block_len: usize) -> Result<Self> {
        Self::new(vec![block_len; blocks])
    }

    pub fn num_blocks(&self) -> usize {
        self.lengths.len()
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_len(&self, i: usize) -> usize {
        self.lengths[i]
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Coordinate range of block `i`.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.lengths[i]
    }

    /// Block index owning each coordinate.
    pub fn coordinate_blocks(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dim);
        for (i, &d) in self.lengths.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, d));
        }
        out
    }

    /// Per-block Euclidean norms of a raw coordinate vector.
    pub fn block_norms_of(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.dim);
        (0..self.num_blocks())
            .map(|i| {
                values[self.range(i)]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// Sorted, duplicate-free set of block indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BlockIndexSet {
    indices: Vec<usize>,
}

impl BlockIndexSet {
    /// Builds a set of indices in `0..num_blocks`; duplicates are an error.
    pub fn new(mut indices: Vec<usize>, num_blocks: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&i| i >= num_blocks) {
            return Err(Error::InvalidArgument(format!(
                "block index {bad} out of range for {num_blocks} blocks"
            )));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate block index".into()));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(num_blocks: usize) -> Self {
        Self {
            indices: (0..num_blocks).collect(),
        }
    }

    fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn complement(&self, num_blocks: usize) -> Self {
        Self::from_sorted((0..num_blocks).filter(|i| !self.contains(*i)).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut v: Vec<usize> = self.iter().chain(other.iter()).collect();
        v.sort_unstable();
        v.dedup();
        Self::from_sorted(v)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_sorted(self.iter().filter(|i| other.contains(*i)).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::from_sorted(self.iter().filter(|i| !other.contains(*i)).collect())
    }

    /// `(self ∪ other) \ (self ∩ other)`.
    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.union(other).difference(&self.intersection(other))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.iter().all(|i| !other.contains(i))
    }
}

impl fmt::Display for BlockIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (j, i) in self.indices.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Which mixed ℓ2/ℓp norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedNorm {
    /// Number of blocks with nonzero ℓ2 norm.
    Zero,
    One,
    Two,
    Inf,
}

/// A length-`N` vector read through a [`BlockStructure`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSignal {
    structure: Arc<BlockStructure>,
    values: Vec<f64>,
}

impl BlockSignal {
    pub fn new(structure: Arc<BlockStructure>, values: Vec<f64>) -> Result<Self> {
        if values.len() != structure.dim() {
            return Err(Error::DimensionMismatch(format!(
                "signal has {} entries, structure expects {}",
                values.len(),
                structure.dim()
            )));
        }
        Ok(Self { structure, values })
    }

    pub fn zeros(structure: Arc<BlockStructure>) -> Self {
        let values = vec![0.0; structure.dim()];
        Self { structure, values }
    }

    pub fn structure(&self) -> &Arc<BlockStructure> {
        &self.structure
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.values[self.structure.range(i)]
    }

    pub fn block_norm(&self, i: usize) -> f64 {
        self.block(i).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn block_norms(&self) -> Vec<f64> {
        self.structure.block_norms_of(&self.values)
    }

    pub fn mixed_norm(&self, p: MixedNorm) -> f64 {
        let norms = self.block_norms();
        match p {
            MixedNorm::Zero => norms.iter().filter(|&&v| v > 0.0).count() as f64,
            MixedNorm::One => norms.iter().sum(),
            MixedNorm::Two => norms.iter().map(|v| v * v).sum::<f64>().sqrt(),
            MixedNorm::Inf => norms.iter().fold(0.0, |m, &v| m.max(v)),
        }
    }

    /// ‖x[Γ]‖_{2,1}, without materialising the restriction.
    pub fn restricted_l21(&self, set: &BlockIndexSet) -> f64 {
        set.iter().map(|i| self.block_norm(i)).sum()
    }

    /// Blocks whose ℓ2 norm exceeds `tol`; `tol = 0` gives the exact block support.
    pub fn block_support(&self, tol: f64) -> BlockIndexSet {
        BlockIndexSet::from_sorted(
            self.block_norms()
                .into_iter()
                .enumerate()
                .filter(|(_, v)| *v > tol)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    /// Indices of the `k` blocks of largest ℓ2 norm; ties go to the lower index.
    pub fn top_k_blocks(&self, k: usize) -> BlockIndexSet {
        let norms = self.block_norms();
        let mut order: Vec<usize> = (0..norms.len()).collect();
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
        order.truncate(k);
        order.sort_unstable();
        BlockIndexSet::from_sorted(order)
    }

    /// Best block `k`-sparse approximation `x[max(k)]`.
    pub fn best_block_k_approx(&self, k: usize) -> Result<Self> {
        let m = self.structure.num_blocks();
        if k == 0 || k > m {
            return Err(Error::InvalidArgument(format!(
                "k = {k} must lie in 1..={m}"
            )));
        }
        Ok(self.restrict(&self.top_k_blocks(k)))
    }

    /// Zeroes every block outside `set`.
    pub fn restrict(&self, set: &BlockIndexSet) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for i in set.iter() {
            let r = self.structure.range(i);
            values[r.clone()].copy_from_slice(&self.values[r]);
        }
        Self {
            structure: Arc::clone(&self.structure),
            values,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            structure: Arc::clone(&self.structure),
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            structure: Arc::clone(&self.structure),
            values,
        })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if *self.structure != *other.structure {
            return Err(Error::DimensionMismatch(
                "signals use different block structures".into(),
            ));
        }
        Ok(())
    }
}

/// Draws a block `k`-sparse signal: the support is a uniform `k`-subset of
/// blocks and the nonzero entries are i.i.d. standard normal.
pub fn random_block_sparse(
    structure: Arc<BlockStructure>,
    k: usize,
    seed: u64,
) -> Result<BlockSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_block_sparse_with(structure, k, &mut rng)
}

pub fn random_block_sparse_with<R: Rng + ?Sized>(
    structure: Arc<BlockStructure>,
    k: usize,
    rng: &mut R,
) -> Result<BlockSignal> {
    let m = structure.num_blocks();
    if k == 0 || k > m {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in 1..={m}"
        )));
    }
    let mut blocks = sample(rng, m, k).into_vec();
    blocks.sort_unstable();
    let mut values = vec![0.0; structure.dim()];
    for i in blocks {
        for v in &mut values[structure.range(i)] {
            *v = rng.sample(StandardNormal);
        }
    }
    BlockSignal::new(structure, values)
}
