//! Exhaustive generation of small connected graphs and input assignments.
//!
//! Graphs are generated up to isomorphism by incremental augmentation: every
//! connected graph on n nodes arises from a connected graph on n-1 nodes by
//! attaching one new node to a nonempty neighbor set (every connected graph
//! has a non-cut vertex), so augmenting all (n-1)-node representatives with
//! all nonempty subsets and deduplicating by canonical form is complete.
//! Canonical forms are the minimum adjacency bit code over all permutations
//! respecting an iterated degree refinement, which keeps the search tractable
//! for the desk-scale cap below.

use std::collections::HashSet;

use itertools::Itertools;

use crate::error::Error;
use crate::graph::{Graph, Instance};

/// Largest node count the exhaustive enumerator accepts.
pub const ENUMERATION_CAP: usize = 8;

/// Upper-triangle adjacency code for graphs of up to 11 nodes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Code {
    n: u8,
    bits: u64,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl Code {
    fn from_graph(g: &Graph) -> Code {
        let n = g.node_count();
        let mut bits = 0u64;
        for &(u, v) in g.edges() {
            bits |= 1 << pair_index(n, u, v);
        }
        Code { n: n as u8, bits }
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n as usize;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.bits >> pair_index(n, i, j) & 1 == 1 {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    fn to_graph(self) -> Graph {
        Graph::new(self.n as usize, &self.edges()).expect("canonical codes describe valid graphs")
    }
}

/// Iterated neighborhood refinement; returns a dense class rank per vertex.
/// The ranks are isomorphism-invariant, so canonicalization may restrict to
/// permutations that keep each vertex inside its class.
fn refinement_classes(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut rank: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    loop {
        let keys: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut around: Vec<usize> = adj[v].iter().map(|&w| rank[w]).collect();
                around.sort_unstable();
                (rank[v], around)
            })
            .collect();
        let mut sorted: Vec<&(usize, Vec<usize>)> = keys.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<usize> = keys
            .iter()
            .map(|k| sorted.binary_search(&k).unwrap())
            .collect();
        if next == rank {
            return rank;
        }
        rank = next;
    }
}

/// Minimum adjacency code over all class-respecting permutations.
fn canonical(code: Code) -> Code {
    let n = code.n as usize;
    if n <= 1 {
        return code;
    }
    let edges = code.edges();
    let ranks = refinement_classes(n, &edges);
    let class_count = ranks.iter().max().unwrap() + 1;
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); class_count];
    for (v, &r) in ranks.iter().enumerate() {
        classes[r].push(v);
    }
    let mut starts = Vec::with_capacity(class_count);
    let mut offset = 0;
    for class in &classes {
        starts.push(offset);
        offset += class.len();
    }

    let mut perm = vec![usize::MAX; n];
    let mut best = u64::MAX;

    #[allow(clippy::too_many_arguments)] // recursive backtracking state, not an API
    fn assign(
        classes: &mut Vec<Vec<usize>>,
        starts: &[usize],
        c: usize,
        pos: usize,
        perm: &mut Vec<usize>,
        edges: &[(usize, usize)],
        n: usize,
        best: &mut u64,
    ) {
        if c == classes.len() {
            let mut bits = 0u64;
            for &(u, v) in edges {
                let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
                bits |= 1 << pair_index(n, a, b);
            }
            if bits < *best {
                *best = bits;
            }
            return;
        }
        if pos == classes[c].len() {
            assign(classes, starts, c + 1, 0, perm, edges, n, best);
            return;
        }
        for i in pos..classes[c].len() {
            classes[c].swap(pos, i);
            perm[classes[c][pos]] = starts[c] + pos;
            assign(classes, starts, c, pos + 1, perm, edges, n, best);
            classes[c].swap(pos, i);
        }
    }

    assign(
        &mut classes,
        &starts,
        0,
        0,
        &mut perm,
        &edges,
        n,
        &mut best,
    );
    Code {
        n: code.n,
        bits: best,
    }
}

/// All connected graphs on exactly `n` nodes, one canonical representative
/// per isomorphism class, in a fixed deterministic order: ascending edge
/// count, then descending-sorted degree sequence, then adjacency code.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n >= 1, "graphs have at least one node");
    assert!(
        n <= ENUMERATION_CAP,
        "exhaustive enumeration capped at {ENUMERATION_CAP} nodes"
    );
    let mut level: Vec<Code> = vec![Code { n: 1, bits: 0 }];
    for size in 2..=n {
        let mut seen: HashSet<Code> = HashSet::new();
        for parent in &level {
            for subset in 1u64..(1 << (size - 1)) {
                let mut bits = 0u64;
                for (i, j) in parent.edges() {
                    bits |= 1 << pair_index(size, i, j);
                }
                for v in 0..(size - 1) {
                    if subset >> v & 1 == 1 {
                        bits |= 1 << pair_index(size, v, size - 1);
                    }
                }
                seen.insert(canonical(Code {
                    n: size as u8,
                    bits,
                }));
            }
        }
        level = seen.into_iter().collect();
        level.sort_unstable();
    }
    let mut graphs: Vec<Graph> = level.into_iter().map(Code::to_graph).collect();
    graphs.sort_by_cached_key(|g| {
        (
            g.edge_count(),
            g.degree_sequence(),
            Code::from_graph(g).bits,
        )
    });
    graphs
}

/// Connected graphs on `1..=n` nodes, ascending by node count.
pub fn connected_graphs_up_to(n: usize) -> Vec<Graph> {
    (1..=n).flat_map(connected_graphs).collect()
}

/// Every assignment of inputs from `alphabet` to the nodes of `graph`, in
/// odometer order with the last node varying fastest.
pub fn instances_over(graph: &Graph, alphabet: &[Vec<u8>]) -> Vec<Instance> {
    assert!(!alphabet.is_empty(), "alphabet must be nonempty");
    let n = graph.node_count();
    std::iter::repeat_n(alphabet, n)
        .map(|a| a.iter())
        .multi_cartesian_product()
        .map(|inputs| {
            Instance::new(graph.clone(), inputs.into_iter().cloned().collect())
                .expect("input vector length matches node count")
        })
        .collect()
}

/// Convenience: all instances over all connected graphs of exactly `n` nodes.
pub fn instances_of_size(n: usize, alphabet: &[Vec<u8>]) -> Vec<Instance> {
    connected_graphs(n)
        .iter()
        .flat_map(|g| instances_over(g, alphabet))
        .collect()
}

/// The full desk-scale instance family: every connected instance on
/// `1..=max_nodes` nodes over `alphabet`, smallest graphs first.
pub fn instances_up_to(max_nodes: usize, alphabet: &[Vec<u8>]) -> Result<Vec<Instance>, Error> {
    check_cap(max_nodes)?;
    if alphabet.is_empty() {
        return Err(Error::LanguageParameter("alphabet must be nonempty".into()));
    }
    Ok((1..=max_nodes)
        .flat_map(|n| instances_of_size(n, alphabet))
        .collect())
}

/// Validates an enumeration request against the desk-scale cap.
pub fn check_cap(requested: usize) -> Result<(), Error> {
    if requested > ENUMERATION_CAP {
        return Err(Error::DeskScaleExceeded {
            requested,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// The cycle on `n >= 3` nodes.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycles need at least three nodes");
    let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::new(n, &edges).unwrap()
}

/// The path on `n >= 1` nodes.
pub fn path(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::new(n, &edges).unwrap()
}

/// The complete graph on `n >= 1` nodes.
pub fn complete(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    Graph::new(n, &edges).unwrap()
}

/// The star with `leaves >= 1` leaves attached to node 0.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::new(leaves + 1, &edges).unwrap()
}
