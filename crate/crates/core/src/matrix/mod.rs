//! Mean matrix of active children by type, its Perron root, and the cascade
//! verdict.
//!
//! The type of a vertex is its number of children. Entry `(x0, x)` of the
//! mean matrix is the expected number of active type-`x` children of an
//! active non-root vertex of type `x0`.

mod spectral;

use serde::{Deserialize, Serialize};

use crate::clique::CliqueModel;
use crate::dist::{floor_q_times, ModelParams};
use crate::{Error, Result};

pub use spectral::spectral_radius;

/// `|rho - 1|` at or below this is reported as a boundary case.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// Square non-negative matrix indexed by vertex type.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl MeanMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::ConfigInvalid("mean matrix is not square".into()));
            }
            if row.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(Error::ConfigInvalid("mean matrix has a negative entry".into()));
            }
            entries.extend(row);
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, x0: usize, x: usize) -> f64 {
        self.entries[x0 * self.dim + x]
    }

    fn set(&mut self, x0: usize, x: usize, value: f64) {
        self.entries[x0 * self.dim + x] = value;
    }

    pub fn row(&self, x0: usize) -> &[f64] {
        &self.entries[x0 * self.dim..(x0 + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Positions of the nonzero entries, row by row.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(move |(k, &v)| (k / self.dim, k % self.dim, v))
    }
}

impl Serialize for MeanMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MeanMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        MeanMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n as u128).product::<u128>() as f64
}

impl CliqueModel {
    /// Sum over sorted type sequences of `∏ P(X = v)^c / c!` (one factor per
    /// run of `c` equal values `v`), for sequences that fill positions
    /// `start + 1 ..= j` with values from `values`, grouped by `j`. A run
    /// starting at position `j + 1` is admissible only when its value needs
    /// at most `j + 1` active neighbours.
    fn run_weights(&self, w: usize, values: &[(usize, f64)], start: usize) -> Vec<f64> {
        let len = w - 1;
        let mut g = vec![0.0; len + 1];
        if start > len {
            return g;
        }
        g[start] = 1.0;
        for &(v, pv) in values {
            let mut next = g.clone();
            for j in start..len {
                if g[j] == 0.0 || self.requirement(v, w) > (j + 1) as u64 {
                    continue;
                }
                let mut power = 1.0;
                for c in 1..=(len - j) {
                    power *= pv;
                    next[j + c] += g[j] * power / factorial(c);
                }
            }
            g = next;
        }
        g
    }

    /// Probability that a size-`w` clique with active parent ends with `ell`
    /// active children, of which exactly `i` have type `< x` and exactly `k`
    /// have type `x`.
    pub fn p_x_given_w(&self, x: usize, w: usize, k: usize, ell: usize, i: usize) -> f64 {
        if w < 2 || k == 0 || ell > w - 1 || i + k > ell {
            return 0.0;
        }
        let px = self.child_counts().get(x);
        if px == 0.0 || self.requirement(x, w) > (i + 1) as u64 {
            return 0.0;
        }
        let (below, above): (Vec<_>, Vec<_>) =
            self.child_counts().support().filter(|&(v, _)| v != x).partition(|&(v, _)| v < x);
        let below = self.run_weights(w, &below, 0)[i];
        let above = self.run_weights(w, &above, i + k)[ell];
        self.clique_weight(w, ell) * below * px.powi(k as i32) / factorial(k) * above
    }

    /// `(w-1)! / (w-1-ell)!` times the probability that the next child in
    /// order is blocked.
    fn clique_weight(&self, w: usize, ell: usize) -> f64 {
        let arrangements: u128 = ((w - ell)..w).map(|j| j as u128).product();
        arrangements as f64 * self.tail(w, ell).powi((w - 1 - ell) as i32)
    }

    /// Expected number of active type-`x` children of a size-`w` clique whose
    /// parent is active.
    pub fn m_x_given_w(&self, x: usize, w: usize) -> f64 {
        if w < 2 || self.child_counts().get(x) == 0.0 {
            return 0.0;
        }
        let floor = floor_q_times(self.theta(), (x + w - 1) as u64) as usize;
        let (below, above): (Vec<_>, Vec<_>) =
            self.child_counts().support().filter(|&(v, _)| v != x).partition(|&(v, _)| v < x);
        let below = self.run_weights(w, &below, 0);
        let px = self.child_counts().get(x);
        let mut total = 0.0;
        for k in 1..w {
            for i in floor..w {
                if i + k > w - 1 || below[i] == 0.0 {
                    continue;
                }
                let above = self.run_weights(w, &above, i + k);
                for ell in (k + floor).max(i + k)..w {
                    let p = self.clique_weight(w, ell) * below[i] * px.powi(k as i32) / factorial(k) * above[ell];
                    total += k as f64 * p;
                }
            }
        }
        total
    }

    /// Same expectation computed from the brute-force clique law.
    pub fn m_x_given_w_oracle(&self, x: usize, w: usize) -> Result<f64> {
        let law = self.brute_force_law(w)?;
        Ok(law
            .iter()
            .map(|(outcome, p)| p * outcome.types().iter().filter(|&&t| t == x).count() as f64)
            .sum())
    }
}

pub fn p_x_given_w(params: &ModelParams, x: usize, w: usize, k: usize, ell: usize, i: usize) -> Result<f64> {
    Ok(CliqueModel::new(params)?.p_x_given_w(x, w, k, ell, i))
}

pub fn m_x_given_w(params: &ModelParams, x: usize, w: usize) -> Result<f64> {
    Ok(CliqueModel::new(params)?.m_x_given_w(x, w))
}

pub fn m_x_given_w_oracle(params: &ModelParams, x: usize, w: usize) -> Result<f64> {
    CliqueModel::new(params)?.m_x_given_w_oracle(x, w)
}

/// Builds the mean matrix.
///
/// A non-root vertex with `d - 1` child cliques of sizes `w_1..w_{d-1}` has
/// type `x0 = Σ (w_j - 1)`. The ordered compositions are summed with weights
/// `(d p_d / λ) ∏ (w_j q_{w_j} / μ)` by a convolution over the number of
/// cliques, and each row is divided by its total weight `P(X = x0)` so that
/// entries are means conditional on the type.
pub fn mean_matrix(params: &ModelParams) -> Result<MeanMatrix> {
    params.check_cascade_assumptions()?;
    let clique = CliqueModel::new(params)?;
    let dim = params.type_dim();
    let sizes: Vec<(usize, f64)> = params
        .q()
        .support()
        .map(|(w, qw)| (w, w as f64 * qw / params.mu()))
        .collect();
    let per_clique: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&(w, _)| (0..dim).map(|x| clique.m_x_given_w(x, w)).collect())
        .collect();

    // mass[x0]: weight of compositions reaching x0 with j cliques so far;
    // acc[x0][x]: the same weights times the summed clique means.
    let mut mass = vec![0.0; dim];
    let mut acc = vec![vec![0.0; dim]; dim];
    mass[0] = 1.0;
    let mut row_mass = vec![0.0; dim];
    let mut rows = vec![vec![0.0; dim]; dim];
    for d in 1..=params.d_max() {
        let h = d as f64 * params.p().get(d) / params.lambda();
        if h > 0.0 {
            for x0 in 0..dim {
                row_mass[x0] += h * mass[x0];
                for x in 0..dim {
                    rows[x0][x] += h * acc[x0][x];
                }
            }
        }
        if d == params.d_max() {
            break;
        }
        let mut next_mass = vec![0.0; dim];
        let mut next_acc = vec![vec![0.0; dim]; dim];
        for x0 in 0..dim {
            if mass[x0] == 0.0 {
                continue;
            }
            for (s, &(w, g)) in sizes.iter().enumerate() {
                let y0 = x0 + w - 1;
                if y0 >= dim {
                    continue;
                }
                next_mass[y0] += g * mass[x0];
                for x in 0..dim {
                    next_acc[y0][x] += g * (acc[x0][x] + mass[x0] * per_clique[s][x]);
                }
            }
        }
        mass = next_mass;
        acc = next_acc;
    }

    let mut m = MeanMatrix::zeros(dim);
    for x0 in 1..dim {
        if row_mass[x0] > 0.0 {
            for x in 0..dim {
                m.set(x0, x, rows[x0][x] / row_mass[x0]);
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    FiniteAlmostSurely,
    CascadePossible,
    CascadeAlmostSure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictReason {
    ThresholdAtLeastHalf,
    DegenerateP2Q2,
    SpectralRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Present iff `reason` is `SpectralRadius`.
    pub rho: Option<f64>,
    pub reason: VerdictReason,
    /// `rho` within [`BOUNDARY_TOLERANCE`] of 1 (classified as finite).
    pub boundary: bool,
}

/// Whether the active subgraph grown from the root can be infinite.
pub fn cascade_verdict(params: &ModelParams) -> Result<Verdict> {
    params.check_cascade_assumptions()?;
    if params.theta().is_at_least_half() {
        return Ok(Verdict {
            kind: VerdictKind::FiniteAlmostSurely,
            rho: None,
            reason: VerdictReason::ThresholdAtLeastHalf,
            boundary: false,
        });
    }
    if params.is_degenerate_path() {
        return Ok(Verdict {
            kind: VerdictKind::CascadeAlmostSure,
            rho: None,
            reason: VerdictReason::DegenerateP2Q2,
            boundary: false,
        });
    }
    let rho = spectral_radius(&mean_matrix(params)?)?;
    let boundary = (rho - 1.0).abs() <= BOUNDARY_TOLERANCE;
    let kind = if rho <= 1.0 || boundary {
        VerdictKind::FiniteAlmostSurely
    } else {
        VerdictKind::CascadePossible
    };
    Ok(Verdict {
        kind,
        rho: Some(rho),
        reason: VerdictReason::SpectralRadius,
        boundary,
    })
}
