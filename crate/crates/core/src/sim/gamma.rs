use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::clique::CliqueModel;
use crate::dist::{compose_hg, ModelParams};
use crate::{Error, Result};

/// Number of individuals of each type in one generation.
pub type Census = BTreeMap<usize, u64>;

#[derive(Debug, Clone)]
struct Table {
    items: Vec<Vec<usize>>,
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl Table {
    fn new(rows: Vec<(Vec<usize>, f64)>) -> Option<Self> {
        let (items, probs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let index = WeightedIndex::new(&probs).ok()?;
        Some(Self { items, probs, index })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> &[usize] {
        &self.items[self.index.sample(rng)]
    }
}

/// The multi-type alternating process of active vertices.
///
/// A V-individual's type is its child count `x`; an E-individual's type is
/// its clique size `w`. A type-`x` individual draws `d - 1` cliques of sizes
/// `w_1..w_{d-1}` with `Σ (w_j - 1) = x` with probability
/// `(d p_d / λ) ∏ (w_j q_{w_j} / μ) / P(X = x)`, where `P(X = x)` is the
/// `x`-th coefficient of `H∘G`; a size-`w` clique then yields active
/// children by the exact clique cascade law.
#[derive(Debug, Clone)]
pub struct GammaPrime {
    root_count: WeightedIndex<f64>,
    root_sizes: Table,
    v_tables: Vec<Option<Table>>,
    e_tables: BTreeMap<usize, Table>,
}

impl GammaPrime {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.check_cascade_assumptions()?;
        let clique = CliqueModel::new(params)?;
        let sizes: Vec<(usize, f64)> = params
            .q()
            .support()
            .map(|(w, qw)| (w, w as f64 * qw / params.mu()))
            .collect();
        let root_sizes = Table::new(sizes.iter().map(|&(w, g)| (vec![w], g)).collect())
            .expect("size-biased law has positive mass");
        let mut e_tables = BTreeMap::new();
        for &(w, _) in &sizes {
            let rows = clique
                .outcome_law(w)?
                .into_iter()
                .map(|(o, p)| (o.types().to_vec(), p))
                .collect();
            e_tables.insert(w, Table::new(rows).expect("clique law has positive mass"));
        }
        let hg = compose_hg(params);
        let v_tables = (0..params.type_dim())
            .map(|x| Table::new(Self::v_offspring_rows(params, &sizes, x, hg.coeff(x))))
            .collect();
        Ok(Self {
            root_count: WeightedIndex::new(params.p().probs()).expect("validated pmf"),
            root_sizes,
            v_tables,
            e_tables,
        })
    }

    fn v_offspring_rows(params: &ModelParams, sizes: &[(usize, f64)], x: usize, px: f64) -> Vec<(Vec<usize>, f64)> {
        let mut rows = Vec::new();
        if px <= 0.0 {
            return rows;
        }
        for (d, pd) in params.p().support() {
            let h = d as f64 * pd / params.lambda();
            let mut prefix = Vec::new();
            compositions(sizes, d - 1, x, h / px, &mut prefix, &mut rows);
        }
        rows
    }

    /// Offspring law of a type-`x` V-individual as (clique sizes, probability).
    pub fn v_offspring_law(&self, x: usize) -> Vec<(Vec<usize>, f64)> {
        self.v_tables
            .get(x)
            .and_then(Option::as_ref)
            .map(|t| t.items.iter().cloned().zip(t.probs.iter().copied()).collect())
            .unwrap_or_default()
    }

    fn push_clique<R: Rng>(&self, w: usize, rng: &mut R, next: &mut Census) {
        for &x in self.e_tables[&w].sample(rng) {
            *next.entry(x).or_insert(0) += 1;
        }
    }

    /// Active children of the root: `D ~ p` cliques with size-biased sizes.
    pub fn sample_root<R: Rng>(&self, rng: &mut R) -> Census {
        let mut next = Census::new();
        for _ in 0..self.root_count.sample(rng) {
            let w = self.root_sizes.sample(rng)[0];
            self.push_clique(w, rng, &mut next);
        }
        next
    }

    /// One V-generation step.
    pub fn sample_generation<R: Rng>(&self, census: &Census, rng: &mut R) -> Result<Census> {
        let mut next = Census::new();
        for (&x, &count) in census {
            let table = self
                .v_tables
                .get(x)
                .and_then(Option::as_ref)
                .ok_or_else(|| Error::InvalidOutcome(format!("type {x} has zero probability")))?;
            for _ in 0..count {
                for &w in table.sample(rng) {
                    self.push_clique(w, rng, &mut next);
                }
            }
        }
        Ok(next)
    }
}

fn compositions(
    sizes: &[(usize, f64)],
    remaining_cliques: usize,
    remaining_type: usize,
    weight: f64,
    prefix: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, f64)>,
) {
    if remaining_cliques == 0 {
        if remaining_type == 0 {
            out.push((prefix.clone(), weight));
        }
        return;
    }
    for &(w, g) in sizes {
        if w - 1 > remaining_type {
            continue;
        }
        prefix.push(w);
        compositions(sizes, remaining_cliques - 1, remaining_type - (w - 1), weight * g, prefix, out);
        prefix.pop();
    }
}

/// One V-generation step of the active-vertex process for `params`.
pub fn sample_gamma_prime_generation<R: Rng>(params: &ModelParams, census: &Census, rng: &mut R) -> Result<Census> {
    GammaPrime::new(params)?.sample_generation(census, rng)
}
