//! Exact cascade law inside a single clique whose parent is active.
//!
//! Children of the clique are activated in order of their child counts: a
//! child with `x` children has degree `x + w - 1` and needs
//! `floor(q (x + w - 1)) + 1` active neighbours. The closed form for the joint
//! law of the cascade size and the types of the activated children is checked
//! against [`brute_force_clique_law`], which enumerates every tuple of child
//! counts and runs the round-based dynamics directly.

use std::collections::BTreeMap;

use crate::dist::{child_count_pmf, floor_q_times, ModelParams, Pmf, ThresholdQ};
use crate::{Error, Result};

/// Largest number of tuples the brute-force oracle will enumerate.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Activated children of a clique, as the sorted list of their child counts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CliqueOutcome {
    types: Vec<usize>,
}

impl CliqueOutcome {
    pub fn new(types: Vec<usize>) -> Result<Self> {
        if !is_sorted(&types) {
            return Err(Error::UnsortedInput);
        }
        Ok(Self { types })
    }

    pub fn empty() -> Self {
        Self { types: Vec::new() }
    }

    /// Number of activated children.
    pub fn ell(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }
}

fn is_sorted(xs: &[usize]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

fn factorial(n: usize) -> f64 {
    (1..=n as u128).product::<u128>() as f64
}

/// Active neighbours a child with `x` children needs in a clique of size `w`.
pub fn activation_requirement(theta: ThresholdQ, x: usize, w: usize) -> u64 {
    floor_q_times(theta, (x + w - 1) as u64) + 1
}

/// Final number of activated children given the sorted child counts of all
/// `w - 1` children.
pub fn clique_cascade_size(theta: ThresholdQ, w: usize, sorted_x: &[usize]) -> Result<usize> {
    if !is_sorted(sorted_x) {
        return Err(Error::UnsortedInput);
    }
    if sorted_x.len() + 1 != w {
        return Err(Error::InvalidOutcome(format!(
            "expected {} child counts for a clique of size {w}, got {}",
            w.saturating_sub(1),
            sorted_x.len()
        )));
    }
    Ok(sorted_x
        .iter()
        .enumerate()
        .position(|(i, &x)| activation_requirement(theta, x, w) > (i + 1) as u64)
        .unwrap_or(sorted_x.len()))
}

/// Multiplicities `s_i` of a sorted sequence: the run length at the start of
/// each run of equal values, 1 elsewhere.
pub fn run_lengths(sorted: &[usize]) -> Result<Vec<usize>> {
    if !is_sorted(sorted) {
        return Err(Error::UnsortedInput);
    }
    let mut s = vec![1; sorted.len()];
    let mut start = 0;
    while start < sorted.len() {
        let end = start + sorted[start..].iter().take_while(|&&v| v == sorted[start]).count();
        s[start] = end - start;
        start = end;
    }
    Ok(s)
}

/// Probability that `n = sorted_y.len()` i.i.d. draws from `base` have order
/// statistics exactly `sorted_y`.
pub fn order_stat_pmf(base: &Pmf, sorted_y: &[usize]) -> Result<f64> {
    let s = run_lengths(sorted_y)?;
    let n = sorted_y.len();
    let multiplicity: f64 = s[..n.saturating_sub(1)].iter().map(|&k| factorial(k)).product();
    let mass: f64 = sorted_y.iter().map(|&y| base.get(y)).product();
    Ok(factorial(n) / multiplicity * mass)
}

/// Round-based dynamics inside one clique: the parent is active, and in
/// each synchronous round every inactive child whose active neighbours
/// strictly exceed `q` times its degree activates. Returns the final
/// activation flags of the children, aligned with `child_counts`.
pub fn clique_fixpoint(theta: ThresholdQ, w: usize, child_counts: &[usize]) -> Vec<bool> {
    let mut active = vec![false; child_counts.len()];
    loop {
        let active_children = active.iter().filter(|&&a| a).count() as u64;
        let newly: Vec<usize> = child_counts
            .iter()
            .enumerate()
            .filter(|&(i, &x)| {
                !active[i] && theta.exceeded_by(1 + active_children, (x + w - 1) as u64)
            })
            .map(|(i, _)| i)
            .collect();
        if newly.is_empty() {
            return active;
        }
        for i in newly {
            active[i] = true;
        }
    }
}

/// Cached per-model quantities for clique computations.
#[derive(Debug, Clone)]
pub struct CliqueModel {
    theta: ThresholdQ,
    child_counts: Pmf,
}

impl CliqueModel {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Ok(Self {
            theta: params.theta(),
            child_counts: child_count_pmf(params)?,
        })
    }

    pub fn theta(&self) -> ThresholdQ {
        self.theta
    }

    /// Law of the child count `X` of a non-root vertex.
    pub fn child_counts(&self) -> &Pmf {
        &self.child_counts
    }

    pub fn requirement(&self, x: usize, w: usize) -> u64 {
        activation_requirement(self.theta, x, w)
    }

    /// `P(floor(q (X + w - 1)) > ell)`.
    pub fn tail(&self, w: usize, ell: usize) -> f64 {
        self.child_counts
            .support()
            .filter(|&(x, _)| floor_q_times(self.theta, (x + w - 1) as u64) > ell as u64)
            .map(|(_, p)| p)
            .sum()
    }

    /// Joint probability that exactly `outcome.ell()` children activate and
    /// that their sorted child counts are `outcome.types()`.
    pub fn p_e(&self, w: usize, outcome: &CliqueOutcome) -> Result<f64> {
        if w < 2 {
            return Err(Error::InvalidOutcome(format!("clique size {w} < 2")));
        }
        let ell = outcome.ell();
        if ell > w - 1 {
            return Err(Error::InvalidOutcome(format!(
                "{ell} activated children in a clique of size {w}"
            )));
        }
        let types = outcome.types();
        if types
            .iter()
            .enumerate()
            .any(|(i, &x)| self.requirement(x, w) > (i + 1) as u64)
        {
            return Ok(0.0);
        }
        let s = run_lengths(types)?;
        let arrangements: u128 = ((w - ell)..w).map(|j| j as u128).product();
        let multiplicity: f64 = s[..ell.saturating_sub(1)].iter().map(|&k| factorial(k)).product();
        let mass: f64 = types.iter().map(|&x| self.child_counts.get(x)).product();
        Ok(arrangements as f64 / multiplicity * mass * self.tail(w, ell).powi((w - 1 - ell) as i32))
    }

    /// Every outcome of positive probability with its `p_e` value.
    pub fn outcome_law(&self, w: usize) -> Result<Vec<(CliqueOutcome, f64)>> {
        let support: Vec<usize> = self.child_counts.support().map(|(x, _)| x).collect();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.extend_outcomes(w, &support, 0, &mut prefix, &mut out)?;
        Ok(out)
    }

    fn extend_outcomes(
        &self,
        w: usize,
        support: &[usize],
        first: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<(CliqueOutcome, f64)>,
    ) -> Result<()> {
        let outcome = CliqueOutcome {
            types: prefix.clone(),
        };
        let p = self.p_e(w, &outcome)?;
        if p > 0.0 {
            out.push((outcome, p));
        }
        if prefix.len() == w - 1 {
            return Ok(());
        }
        for (j, &x) in support.iter().enumerate().skip(first) {
            // requirements only grow with x, so later values fail too
            if self.requirement(x, w) > (prefix.len() + 1) as u64 {
                break;
            }
            prefix.push(x);
            self.extend_outcomes(w, support, j, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }

    /// Oracle: enumerate every ordered tuple of child counts, run
    /// [`clique_fixpoint`] and aggregate by outcome.
    pub fn brute_force_law(&self, w: usize) -> Result<BTreeMap<CliqueOutcome, f64>> {
        let mut law = BTreeMap::new();
        self.for_each_tuple(w, |tuple, weight| {
            let active = clique_fixpoint(self.theta, w, tuple);
            let mut types: Vec<usize> = tuple
                .iter()
                .zip(&active)
                .filter(|(_, &a)| a)
                .map(|(&x, _)| x)
                .collect();
            types.sort_unstable();
            *law.entry(CliqueOutcome { types }).or_insert(0.0) += weight;
        })?;
        Ok(law)
    }

    /// Calls `f(tuple, probability)` for every ordered `(w-1)`-tuple of
    /// child counts with positive probability.
    pub fn for_each_tuple<F>(&self, w: usize, mut f: F) -> Result<()>
    where
        F: FnMut(&[usize], f64),
    {
        let support: Vec<(usize, f64)> = self.child_counts.support().collect();
        let len = w.saturating_sub(1);
        let count = (support.len() as f64).powi(len as i32);
        if count > ENUMERATION_LIMIT as f64 {
            return Err(Error::EnumerationTooLarge {
                count,
                limit: ENUMERATION_LIMIT,
            });
        }
        let mut digits = vec![0usize; len];
        let mut tuple = vec![0usize; len];
        loop {
            let mut weight = 1.0;
            for (slot, &d) in tuple.iter_mut().zip(&digits) {
                *slot = support[d].0;
                weight *= support[d].1;
            }
            f(&tuple, weight);
            let mut i = 0;
            loop {
                if i == len {
                    return Ok(());
                }
                digits[i] += 1;
                if digits[i] < support.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

/// Joint law `p^(E)(ell, x_1..x_ell | w)` of the clique cascade.
pub fn p_e(params: &ModelParams, w: usize, outcome: &CliqueOutcome) -> Result<f64> {
    CliqueModel::new(params)?.p_e(w, outcome)
}

/// Clique cascade law by exhaustive enumeration of the dynamics.
pub fn brute_force_clique_law(params: &ModelParams, w: usize) -> Result<BTreeMap<CliqueOutcome, f64>> {
    CliqueModel::new(params)?.brute_force_law(w)
}

/// Total variation distance between two laws on clique outcomes.
pub fn total_variation<'a, I, J>(a: I, b: J) -> f64
where
    I: IntoIterator<Item = (&'a CliqueOutcome, &'a f64)>,
    J: IntoIterator<Item = (&'a CliqueOutcome, &'a f64)>,
{
    let mut diff: BTreeMap<&CliqueOutcome, f64> = BTreeMap::new();
    for (k, v) in a {
        *diff.entry(k).or_insert(0.0) += v;
    }
    for (k, v) in b {
        *diff.entry(k).or_insert(0.0) -= v;
    }
    0.5 * diff.values().map(|d| d.abs()).sum::<f64>()
}
