use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{child_count_pmf, ModelParams, Pmf};
use crate::Result;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// Key of replicate `index` under the run seed.
pub fn replicate_key(seed: u64, index: u64) -> u64 {
    mix(splitmix64(seed), index)
}

/// Key of member `member` of child clique `clique` of the vertex keyed `parent`.
pub fn child_key(parent: u64, clique: usize, member: usize) -> u64 {
    mix(mix(parent, clique as u64), member as u64)
}

pub(crate) fn rng_for(key: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(key)
}

fn index_over(pmf: &Pmf) -> WeightedIndex<f64> {
    WeightedIndex::new(pmf.probs()).expect("validated pmf has positive mass")
}

/// Pre-built samplers for one model.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub(crate) params: ModelParams,
    root_count: WeightedIndex<f64>,
    clique_count: WeightedIndex<f64>,
    extra_members: WeightedIndex<f64>,
    pub(crate) child_counts: Pmf,
}

impl Sampler {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Ok(Self {
            params: params.clone(),
            root_count: index_over(params.p()),
            clique_count: index_over(&params.d_tilde()),
            extra_members: index_over(&params.w_tilde()),
            child_counts: child_count_pmf(params)?,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Sizes of the child cliques of the vertex keyed `key`. The root has
    /// `D ~ p` cliques, every other vertex `D̃`; each clique has size `W̃ + 1`.
    pub fn clique_sizes(&self, key: u64, is_root: bool) -> Vec<usize> {
        let mut rng = rng_for(key);
        let count = if is_root {
            self.root_count.sample(&mut rng)
        } else {
            self.clique_count.sample(&mut rng)
        };
        (0..count)
            .map(|_| self.extra_members.sample(&mut rng) + 1)
            .collect()
    }
}

pub(crate) fn child_count_of(sizes: &[usize]) -> usize {
    sizes.iter().map(|w| w - 1).sum()
}
