use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::MeanMatrix;
use crate::{Error, Result};

const RELATIVE_TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;
const STAGNATION_WINDOW: usize = 1_000;

/// Perron root of a non-negative matrix.
///
/// The matrix is usually reducible, so the support graph is condensed into
/// strongly connected components first; the Perron root is the largest
/// root over the components.
pub fn spectral_radius(m: &MeanMatrix) -> Result<f64> {
    let mut graph = DiGraph::<(), ()>::with_capacity(m.dim(), 0);
    let nodes: Vec<_> = (0..m.dim()).map(|_| graph.add_node(())).collect();
    for (i, j, _) in m.nonzero() {
        graph.add_edge(nodes[i], nodes[j], ());
    }
    let mut rho = 0.0f64;
    for component in tarjan_scc(&graph) {
        let idx: Vec<usize> = component.iter().map(|n| n.index()).collect();
        let root = if idx.len() == 1 {
            m.get(idx[0], idx[0])
        } else {
            irreducible_perron_root(m, &idx)?
        };
        rho = rho.max(root);
    }
    Ok(rho)
}

/// Shifted power iteration on one irreducible block `A`.
///
/// `A + αI` shares its Perron vector with `A` and is primitive for `α > 0`,
/// so iterating it converges even when `A` is periodic. The shift tracks the
/// lower bound on the root, which keeps the convergence ratio away from 1
/// whatever the scale of `A`. The Collatz–Wielandt ratios
/// `min (Av)_i / v_i <= rho <= max (Av)_i / v_i` bracket the root at every
/// step.
fn irreducible_perron_root(m: &MeanMatrix, idx: &[usize]) -> Result<f64> {
    let n = idx.len();
    let block: Vec<f64> = idx
        .iter()
        .flat_map(|&i| idx.iter().map(move |&j| m.get(i, j)))
        .collect();
    let mut v = vec![1.0; n];
    let mut av = vec![0.0; n];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut best_width = f64::INFINITY;
    let mut last_improvement = 0;
    let mut restarts = 0u32;
    for iter in 0..MAX_ITERATIONS {
        for (r, out) in av.iter_mut().enumerate() {
            *out = block[r * n..(r + 1) * n].iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let (step_lo, step_hi) = av
            .iter()
            .zip(&v)
            .map(|(y, x)| y / x)
            .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
        lo = lo.max(step_lo);
        hi = hi.min(step_hi);
        if hi - lo <= RELATIVE_TOLERANCE * hi {
            return Ok(0.5 * (lo + hi));
        }
        if hi - lo < best_width {
            best_width = hi - lo;
            last_improvement = iter;
        }
        // every row of an irreducible block has a positive entry, so lo > 0
        let shift = lo.max(f64::MIN_POSITIVE);
        for (x, y) in v.iter_mut().zip(&av) {
            *x = y + shift * *x;
        }
        let scale = v.iter().cloned().fold(0.0f64, f64::max);
        for x in v.iter_mut() {
            *x = (*x / scale).max(f64::MIN_POSITIVE);
        }
        if iter - last_improvement > STAGNATION_WINDOW {
            restarts += 1;
            for (k, x) in v.iter_mut().enumerate() {
                let jitter = ((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40) as f64 / (1u64 << 24) as f64;
                *x *= 1.0 + 0.1 * jitter * restarts as f64;
            }
            last_improvement = iter;
        }
    }
    Err(Error::NoConvergence {
        what: "power iteration",
        lower: lo,
        upper: hi,
    })
}
