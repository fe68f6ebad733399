//! Closed-form properties of the alternating branching process and its
//! one-mode projection: survival criterion, extinction probability, root
//! degree law and clustering coefficient.

use serde::{Deserialize, Serialize};

use crate::dist::{compose_hg, ModelParams, Pmf, PowerSeries, LAW_TOLERANCE};
use crate::{Error, Result};

const FIXED_POINT_TOLERANCE: f64 = 1e-14;
const FIXED_POINT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Subcritical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCriterion {
    pub regime: Regime,
    /// `E[W(W-1)] E[D(D-1)]`
    pub lhs: f64,
    /// `E[W] E[D]`
    pub rhs: f64,
}

/// Supercritical iff `E[W(W-1)] E[D(D-1)] > E[W] E[D]`.
pub fn survival_criterion(params: &ModelParams) -> SurvivalCriterion {
    let lhs = params.q().factorial_moment(2) * params.p().factorial_moment(2);
    let rhs = params.mu() * params.lambda();
    let regime = if lhs > rhs {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    };
    SurvivalCriterion { regime, lhs, rhs }
}

/// Smallest fixed point of `x -> H(G(x))` on `[0, 1]`.
///
/// `H∘G` is a probability generating function, so iterating from 0 increases
/// monotonically to the smallest fixed point.
pub fn smallest_fixed_point(params: &ModelParams) -> Result<f64> {
    iterate_to_fixed_point(&compose_hg(params))
}

fn iterate_to_fixed_point(pgf: &PowerSeries) -> Result<f64> {
    let mut x = 0.0f64;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = pgf.eval(x).min(1.0);
        if (next - x).abs() < FIXED_POINT_TOLERANCE {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        what: "fixed-point iteration",
        lower: x,
        upper: 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionReport {
    pub criterion_lhs: f64,
    pub criterion_rhs: f64,
    pub eta: f64,
    pub p_ext: f64,
    /// `p_2 = q_2 = 1`: the graph is a deterministic infinite path.
    pub degenerate: bool,
}

/// Probability that the branching process (equivalently the graph) is finite.
pub fn extinction_probability(params: &ModelParams) -> Result<ExtinctionReport> {
    let criterion = survival_criterion(params);
    let degenerate = params.is_degenerate_path();
    let (eta, p_ext) = if degenerate {
        (smallest_fixed_point(params)?, 0.0)
    } else if criterion.regime == Regime::Subcritical {
        (1.0, 1.0)
    } else {
        let eta = smallest_fixed_point(params)?;
        let g = PowerSeries::from_pmf(&params.w_tilde()).eval(eta);
        (eta, PowerSeries::from_pmf(params.p()).eval(g).clamp(0.0, 1.0))
    };
    Ok(ExtinctionReport {
        criterion_lhs: criterion.lhs,
        criterion_rhs: criterion.rhs,
        eta,
        p_ext,
        degenerate,
    })
}

/// Degree law of the root: coefficients of `F(G(y))`.
pub fn root_degree_pmf(params: &ModelParams) -> Result<Pmf> {
    let f = PowerSeries::from_pmf(params.p());
    let g = PowerSeries::from_pmf(&params.w_tilde());
    let max_degree = params.d_max() * params.w_max().saturating_sub(1);
    Pmf::with_tolerance(f.compose(&g, max_degree).coeffs().to_vec(), LAW_TOLERANCE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub value: f64,
    /// No connected triples through the root; `value` is reported as 0.
    pub degenerate_triples: bool,
}

/// Local clustering coefficient of the root, `E[T_0] / E[P_0]`, as a ratio of
/// factorial moments of `D` and `W`.
pub fn clustering_coefficient(params: &ModelParams) -> Clustering {
    let (p, q) = (params.p(), params.q());
    let triangles = q.factorial_moment(3) / params.mu();
    let open = p.factorial_moment(2) / params.lambda() * (q.factorial_moment(2) / params.mu()).powi(2);
    let denominator = open + triangles;
    if denominator <= 0.0 {
        return Clustering {
            value: 0.0,
            degenerate_triples: true,
        };
    }
    Clustering {
        value: (triangles / denominator).clamp(0.0, 1.0),
        degenerate_triples: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ThresholdQ;

    fn model(p: &[(usize, f64)], q: &[(usize, f64)]) -> ModelParams {
        ModelParams::new(
            Pmf::from_pairs(p.iter().copied()).unwrap(),
            Pmf::from_pairs(q.iter().copied()).unwrap(),
            ThresholdQ::new(1, 10).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn criterion_examples() {
        let c = survival_criterion(&model(&[(3, 1.0)], &[(3, 1.0)]));
        assert_eq!((c.regime, c.lhs, c.rhs), (Regime::Supercritical, 36.0, 9.0));
        let c = survival_criterion(&model(&[(2, 1.0)], &[(2, 1.0)]));
        assert_eq!((c.regime, c.lhs, c.rhs), (Regime::Subcritical, 4.0, 4.0));
        let c = survival_criterion(&model(&[(1, 0.5), (3, 0.5)], &[(2, 1.0)]));
        assert_eq!((c.regime, c.lhs, c.rhs), (Regime::Supercritical, 6.0, 4.0));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(smallest_fixed_point(&model(&[(3, 1.0)], &[(3, 1.0)])).unwrap(), 0.0);
        let eta = smallest_fixed_point(&model(&[(1, 0.5), (3, 0.5)], &[(2, 1.0)])).unwrap();
        assert!((eta - 1.0 / 3.0).abs() < 1e-12);
        // identity map: every point is fixed, the infimum is 0
        assert_eq!(smallest_fixed_point(&model(&[(2, 1.0)], &[(2, 1.0)])).unwrap(), 0.0);
    }

    #[test]
    fn extinction_examples() {
        let r = extinction_probability(&model(&[(1, 0.5), (3, 0.5)], &[(2, 1.0)])).unwrap();
        assert!((r.p_ext - 5.0 / 27.0).abs() < 1e-12);
        assert!(!r.degenerate);
        let r = extinction_probability(&model(&[(3, 1.0)], &[(3, 1.0)])).unwrap();
        assert_eq!(r.p_ext, 0.0);
        let r = extinction_probability(&model(&[(2, 1.0)], &[(2, 1.0)])).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_ext, 0.0);
    }

    #[test]
    fn subcritical_extinction_is_certain() {
        let r = extinction_probability(&model(&[(1, 0.7), (2, 0.3)], &[(2, 0.5), (3, 0.5)])).unwrap();
        assert!(r.criterion_lhs <= r.criterion_rhs);
        assert_eq!((r.eta, r.p_ext), (1.0, 1.0));
    }

    #[test]
    fn root_degree_examples() {
        assert_eq!(root_degree_pmf(&model(&[(2, 1.0)], &[(3, 1.0)])).unwrap(), Pmf::point(4));
        assert_eq!(root_degree_pmf(&model(&[(1, 1.0)], &[(3, 1.0)])).unwrap(), Pmf::point(2));
        assert_eq!(root_degree_pmf(&model(&[(2, 1.0)], &[(2, 1.0)])).unwrap(), Pmf::point(2));
    }

    #[test]
    fn clustering_examples() {
        let c = clustering_coefficient(&model(&[(3, 1.0)], &[(3, 1.0)]));
        assert!((c.value - 0.2).abs() < 1e-12);
        let c = clustering_coefficient(&model(&[(1, 0.5), (3, 0.5)], &[(2, 1.0)]));
        assert_eq!(c.value, 0.0);
        let c = clustering_coefficient(&model(&[(1, 1.0)], &[(3, 1.0)]));
        assert_eq!(c.value, 1.0);
        let c = clustering_coefficient(&model(&[(1, 1.0)], &[(2, 1.0)]));
        assert!(c.degenerate_triples);
        assert_eq!(c.value, 0.0);
    }
}
