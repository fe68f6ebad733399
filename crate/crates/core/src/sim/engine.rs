use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::keys::{child_count_of, child_key, mix, replicate_key, rng_for, Sampler};
use crate::clique::clique_fixpoint;
use crate::dist::ModelParams;
use crate::{Error, Result};

const DORMANT_STREAM: u64 = 0x0064_6f72_6d61_6e74;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub depth: usize,
    pub replicates: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::ConfigInvalid("depth must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::ConfigInvalid("replicates must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Fraction of replicates with an active vertex at the truncation depth.
    pub survival_frequency: f64,
    /// Fraction of replicates with any vertex at the truncation depth.
    pub graph_alive_frequency: f64,
    pub mean_active_by_depth: Vec<f64>,
    pub mean_vertices_by_depth: Vec<f64>,
}

/// Per-depth counts of one replicate, depth 0 (the root) included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicateCounts {
    pub active_by_depth: Vec<u64>,
    pub vertices_by_depth: Vec<u64>,
}

struct Pending {
    depth: usize,
    key: u64,
    sizes: Vec<usize>,
}

impl Sampler {
    /// One replicate truncated at `depth`.
    ///
    /// Only active vertices are expanded. An inactive vertex can never
    /// activate a descendant, so its subtree is carried as a per-depth count
    /// whose growth is sampled in bulk (multinomial over child counts).
    /// Active counts coincide with [`super::run_contagion`] on
    /// [`Sampler::local_graph`] for the same key.
    pub fn replicate(&self, depth: usize, key: u64) -> Result<ReplicateCounts> {
        let theta = self.params.theta();
        let mut active = vec![0u64; depth + 1];
        let mut vertices = vec![0u64; depth + 1];
        let mut dormant = vec![0u64; depth + 2];
        active[0] = 1;
        vertices[0] = 1;
        let mut stack = vec![Pending {
            depth: 0,
            key,
            sizes: self.clique_sizes(key, true),
        }];
        while let Some(v) = stack.pop() {
            let d = v.depth + 1;
            for (j, &w) in v.sizes.iter().enumerate() {
                let members: Vec<(u64, Vec<usize>)> = (0..w - 1)
                    .map(|m| {
                        let k = child_key(v.key, j, m);
                        (k, self.clique_sizes(k, false))
                    })
                    .collect();
                let counts: Vec<usize> = members.iter().map(|(_, s)| child_count_of(s)).collect();
                let flags = clique_fixpoint(theta, w, &counts);
                vertices[d] += members.len() as u64;
                for ((k, sizes), on) in members.into_iter().zip(flags) {
                    if on {
                        active[d] += 1;
                        if d < depth {
                            stack.push(Pending { depth: d, key: k, sizes });
                        }
                    } else if d < depth {
                        dormant[d + 1] += child_count_of(&sizes) as u64;
                    }
                }
            }
        }

        let mut rng = rng_for(mix(key, DORMANT_STREAM));
        for d in 1..=depth {
            vertices[d] = vertices[d]
                .checked_add(dormant[d])
                .ok_or(Error::CountOverflow { depth: d })?;
            if d < depth && dormant[d] > 0 {
                let grown = self.sum_of_child_counts(dormant[d], &mut rng, d)?;
                dormant[d + 1] = dormant[d + 1]
                    .checked_add(grown)
                    .ok_or(Error::CountOverflow { depth: d + 1 })?;
            }
        }
        Ok(ReplicateCounts {
            active_by_depth: active,
            vertices_by_depth: vertices,
        })
    }

    /// Total children of `n` independent non-root vertices.
    fn sum_of_child_counts<R: Rng>(&self, n: u64, rng: &mut R, depth: usize) -> Result<u64> {
        let support: Vec<(usize, f64)> = self.child_counts.support().collect();
        let mut remaining = n;
        let mut remaining_mass = 1.0;
        let mut total = 0u64;
        for (idx, &(x, p)) in support.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            let count = if idx + 1 == support.len() {
                remaining
            } else {
                let share = (p / remaining_mass).clamp(0.0, 1.0);
                Binomial::new(remaining, share)
                    .expect("probability clamped to [0, 1]")
                    .sample(rng)
            };
            remaining -= count;
            remaining_mass -= p;
            total = (x as u64)
                .checked_mul(count)
                .and_then(|c| total.checked_add(c))
                .ok_or(Error::CountOverflow { depth: depth + 1 })?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone)]
struct Tally {
    active: Vec<u128>,
    vertices: Vec<u128>,
    survived: u64,
    alive: u64,
}

impl Tally {
    fn zero(depth: usize) -> Self {
        Self {
            active: vec![0; depth + 1],
            vertices: vec![0; depth + 1],
            survived: 0,
            alive: 0,
        }
    }

    fn from_counts(c: ReplicateCounts) -> Self {
        let depth = c.active_by_depth.len() - 1;
        Self {
            survived: (c.active_by_depth[depth] > 0) as u64,
            alive: (c.vertices_by_depth[depth] > 0) as u64,
            active: c.active_by_depth.into_iter().map(u128::from).collect(),
            vertices: c.vertices_by_depth.into_iter().map(u128::from).collect(),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.active.iter_mut().zip(other.active) {
            *a += b;
        }
        for (a, b) in self.vertices.iter_mut().zip(other.vertices) {
            *a += b;
        }
        self.survived += other.survived;
        self.alive += other.alive;
        self
    }
}

/// Runs `config.replicates` independent replicates and aggregates them.
///
/// Replicate `r` uses the root key `replicate_key(seed, r)`; tallies are
/// integers merged associatively, so the report does not depend on how
/// rayon schedules the work.
pub fn estimate(params: &ModelParams, config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let sampler = Sampler::new(params)?;
    let depth = config.depth;
    let tally = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            sampler
                .replicate(depth, replicate_key(config.seed, r))
                .map(Tally::from_counts)
        })
        .try_reduce(|| Tally::zero(depth), |a, b| Ok(a.merge(b)))?;
    let n = config.replicates as f64;
    Ok(SimReport {
        survival_frequency: tally.survived as f64 / n,
        graph_alive_frequency: tally.alive as f64 / n,
        mean_active_by_depth: tally.active.iter().map(|&c| c as f64 / n).collect(),
        mean_vertices_by_depth: tally.vertices.iter().map(|&c| c as f64 / n).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Pmf;
    use crate::sim::run_contagion;

    fn model(p: &[(usize, f64)], q: &[(usize, f64)], theta: &str) -> ModelParams {
        ModelParams::new(
            Pmf::from_pairs(p.iter().copied()).unwrap(),
            Pmf::from_pairs(q.iter().copied()).unwrap(),
            theta.parse().unwrap(),
        )
        .unwrap()
    }

    fn config(depth: usize, replicates: u64, seed: u64) -> SimConfig {
        SimConfig { depth, replicates, seed }
    }

    #[test]
    fn estimate_examples() {
        let full = model(&[(3, 1.0)], &[(3, 1.0)], "1/10");
        let r = estimate(&full, &config(5, 100, 7)).unwrap();
        assert_eq!(r.survival_frequency, 1.0);
        assert_eq!(r.mean_active_by_depth, vec![1.0, 6.0, 24.0, 96.0, 384.0, 1536.0]);
        let r = estimate(&full.with_theta("3/10".parse().unwrap()), &config(5, 100, 7)).unwrap();
        assert_eq!(r.survival_frequency, 0.0);
        assert_eq!(r.graph_alive_frequency, 1.0);
        assert_eq!(r.mean_vertices_by_depth, vec![1.0, 6.0, 24.0, 96.0, 384.0, 1536.0]);
        let path = model(&[(2, 1.0)], &[(2, 1.0)], "2/5");
        let r = estimate(&path, &config(10, 20, 1)).unwrap();
        assert_eq!(r.survival_frequency, 1.0);
    }

    #[test]
    fn invalid_config() {
        let m = model(&[(3, 1.0)], &[(3, 1.0)], "1/10");
        assert!(matches!(estimate(&m, &config(5, 0, 1)), Err(Error::ConfigInvalid(_))));
        assert!(matches!(estimate(&m, &config(0, 5, 1)), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn lazy_replicate_matches_full_graph() {
        let params = model(&[(1, 0.3), (2, 0.3), (3, 0.4)], &[(2, 0.4), (3, 0.3), (4, 0.3)], "0.15");
        let sampler = Sampler::new(&params).unwrap();
        for key in 0..200 {
            let lazy = sampler.replicate(4, key).unwrap();
            let mut graph = sampler.local_graph(4, key);
            run_contagion(&mut graph, params.theta());
            assert_eq!(lazy.active_by_depth, graph.active_by_depth(), "key {key}");
            // explicit and bulk-sampled parts agree up to the first dormant depth
            assert_eq!(lazy.vertices_by_depth[..2], graph.vertices_by_depth()[..2]);
        }
    }

    #[test]
    fn report_is_independent_of_thread_count() {
        let params = model(&[(1, 0.5), (3, 0.5)], &[(2, 0.6), (3, 0.4)], "0.2");
        let cfg = config(6, 500, 42);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate(&params, &cfg).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(8));
    }
}
