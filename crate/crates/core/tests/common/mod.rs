#![allow(dead_code)]

use clique_cascade::dist::{ModelParams, Pmf, ThresholdQ};
use proptest::prelude::*;
use rand::Rng;

pub fn model(p: &[(usize, f64)], q: &[(usize, f64)], theta: &str) -> ModelParams {
    ModelParams::new(
        Pmf::from_pairs(p.iter().copied()).unwrap(),
        Pmf::from_pairs(q.iter().copied()).unwrap(),
        theta.parse().unwrap(),
    )
    .unwrap()
}

pub fn theta(text: &str) -> ThresholdQ {
    text.parse().unwrap()
}

/// Normalizes integer weights placed on `first..first + weights.len()`.
pub fn pmf_from_weights(first: usize, weights: &[u32]) -> Pmf {
    let total: u32 = weights.iter().sum();
    Pmf::from_pairs(
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (first + i, f64::from(w) / f64::from(total))),
    )
    .unwrap()
}

/// Random weights with at least one positive entry; roughly a third are zero.
fn random_weights<R: Rng>(rng: &mut R, len: usize) -> Vec<u32> {
    loop {
        let w: Vec<u32> = (0..len)
            .map(|_| if rng.random_bool(0.3) { 0 } else { rng.random_range(1..=20) })
            .collect();
        if w.iter().any(|&x| x > 0) {
            return w;
        }
    }
}

/// Random model with `D` on `1..=d_max` and `W` on `2..=w_max`.
pub fn random_model<R: Rng>(rng: &mut R, d_max: usize, w_max: usize, theta: ThresholdQ) -> ModelParams {
    let p = pmf_from_weights(1, &random_weights(rng, d_max));
    let q = pmf_from_weights(2, &random_weights(rng, w_max - 1));
    ModelParams::new(p, q, theta).unwrap()
}

/// Models with `D` on `1..=4` and `W` on `2..=4` satisfying the cascade
/// assumptions, at threshold `theta`.
pub fn arb_model_at(theta: ThresholdQ) -> impl Strategy<Value = ModelParams> {
    let weights = |len| prop::collection::vec(0u32..=10, len).prop_filter("positive mass", |w| w.iter().any(|&x| x > 0));
    (weights(4), weights(3)).prop_map(move |(p, q)| {
        ModelParams::new(pmf_from_weights(1, &p), pmf_from_weights(2, &q), theta).unwrap()
    })
}

/// Thresholds `n/d` with `d ≤ 100` in `(0, 1)`.
pub fn arb_theta() -> impl Strategy<Value = ThresholdQ> {
    (2u64..=100)
        .prop_flat_map(|d| (1..d, Just(d)))
        .prop_map(|(n, d)| ThresholdQ::new(n, d).unwrap())
}

pub fn arb_model() -> impl Strategy<Value = ModelParams> {
    (arb_theta(), arb_model_at(ThresholdQ::new(1, 10).unwrap())).prop_map(|(t, m)| m.with_theta(t))
}
