use std::collections::VecDeque;

use super::keys::{child_count_of, child_key, Sampler};
use crate::dist::{ModelParams, ThresholdQ};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRecord {
    pub id: usize,
    pub depth: usize,
    pub parent: Option<usize>,
    /// Clique shared with the parent.
    pub clique: Option<usize>,
    pub child_count: usize,
    /// Cliques in which this vertex is the parent; empty on the frontier.
    pub child_cliques: Vec<usize>,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueRecord {
    pub id: usize,
    pub parent: usize,
    /// Members other than the parent.
    pub members: Vec<usize>,
}

impl CliqueRecord {
    pub fn size(&self) -> usize {
        self.members.len() + 1
    }
}

/// Depth-truncated realization of the graph around the root (vertex 0).
/// Frontier vertices carry their child count but no child cliques.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGraph {
    pub vertices: Vec<VertexRecord>,
    pub cliques: Vec<CliqueRecord>,
    pub depth: usize,
}

impl LocalGraph {
    pub fn degree(&self, v: usize) -> usize {
        let vertex = &self.vertices[v];
        let up = vertex.clique.map_or(0, |c| self.cliques[c].members.len());
        up + vertex.child_count
    }

    pub fn vertices_by_depth(&self) -> Vec<u64> {
        self.tally(|_| true)
    }

    pub fn active_by_depth(&self) -> Vec<u64> {
        self.tally(|v| v.active)
    }

    fn tally(&self, keep: impl Fn(&VertexRecord) -> bool) -> Vec<u64> {
        let mut out = vec![0; self.depth + 1];
        for v in self.vertices.iter().filter(|v| keep(v)) {
            out[v.depth] += 1;
        }
        out
    }
}

impl Sampler {
    /// Expands every vertex down to `depth`, breadth first.
    pub fn local_graph(&self, depth: usize, key: u64) -> LocalGraph {
        let sizes = self.clique_sizes(key, true);
        let mut vertices = vec![VertexRecord {
            id: 0,
            depth: 0,
            parent: None,
            clique: None,
            child_count: child_count_of(&sizes),
            child_cliques: Vec::new(),
            active: false,
        }];
        let mut cliques = Vec::new();
        let mut queue = VecDeque::from([(0usize, key, sizes)]);
        while let Some((v, key, sizes)) = queue.pop_front() {
            let d = vertices[v].depth;
            if d >= depth {
                continue;
            }
            for (j, &w) in sizes.iter().enumerate() {
                let c = cliques.len();
                let mut members = Vec::with_capacity(w - 1);
                for m in 0..w - 1 {
                    let member_key = child_key(key, j, m);
                    let member_sizes = self.clique_sizes(member_key, false);
                    let id = vertices.len();
                    vertices.push(VertexRecord {
                        id,
                        depth: d + 1,
                        parent: Some(v),
                        clique: Some(c),
                        child_count: child_count_of(&member_sizes),
                        child_cliques: Vec::new(),
                        active: false,
                    });
                    members.push(id);
                    queue.push_back((id, member_key, member_sizes));
                }
                cliques.push(CliqueRecord { id: c, parent: v, members });
                vertices[v].child_cliques.push(c);
            }
        }
        LocalGraph {
            vertices,
            cliques,
            depth,
        }
    }
}

/// Samples the graph down to `depth` from the root key `key`.
pub fn sample_local_graph(params: &ModelParams, depth: usize, key: u64) -> Result<LocalGraph> {
    Ok(Sampler::new(params)?.local_graph(depth, key))
}

/// Runs the threshold dynamics from an active root to its fixpoint.
///
/// In each synchronous round every inactive vertex whose number of active
/// neighbours strictly exceeds `theta` times its degree becomes active.
/// Frontier vertices use their sampled child count in the degree.
pub fn run_contagion(graph: &mut LocalGraph, theta: ThresholdQ) {
    for v in &mut graph.vertices {
        v.active = false;
    }
    graph.vertices[0].active = true;
    let mut clique_active = vec![0u64; graph.cliques.len()];
    loop {
        let newly: Vec<usize> = graph
            .vertices
            .iter()
            .filter(|v| !v.active)
            .filter(|v| {
                let mut active = 0u64;
                if let Some(c) = v.clique {
                    let clique = &graph.cliques[c];
                    active += graph.vertices[clique.parent].active as u64 + clique_active[c];
                }
                active += v.child_cliques.iter().map(|&c| clique_active[c]).sum::<u64>();
                theta.exceeded_by(active, graph.degree(v.id) as u64)
            })
            .map(|v| v.id)
            .collect();
        if newly.is_empty() {
            return;
        }
        for v in newly {
            graph.vertices[v].active = true;
            if let Some(c) = graph.vertices[v].clique {
                clique_active[c] += 1;
            }
        }
    }
}
