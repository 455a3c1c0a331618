//! Graphs, configurations, identity assignments, and radius-t ball snapshots.
//!
//! A *configuration* is a connected simple graph together with one finite byte
//! string of input per node (the empty string is allowed).  Identities are an
//! optional overlay: positive, pairwise-distinct integers with no upper bound
//! tied to the node count.  The radius-t *ball* around a node is everything a
//! node can learn in t synchronous message rounds: all nodes within distance
//! t, with the induced edges except those joining two nodes that are both at
//! distance exactly t (those edges are reported by no ball member in time).

use std::collections::BTreeSet;
use std::collections::VecDeque;

use itertools::Itertools;

use crate::error::Error;

/// Connected simple undirected graph over node indices `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints, empty node sets, and disconnected edge sets.
    pub fn new(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut normalized = BTreeSet::new();
        for &(a, b) in edges {
            for node in [a, b] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !normalized.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
        }
        let edges: Vec<(usize, usize)> = normalized.into_iter().collect();
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = Graph {
            node_count,
            edges,
            adjacency,
        };
        if graph.distances_from(0).iter().any(|d| d.is_none()) {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges normalized as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    fn distances_from(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS distances from `root`; total because the graph is connected.
    pub fn bfs_distances(&self, root: usize) -> Vec<usize> {
        self.distances_from(root)
            .into_iter()
            .map(|d| d.expect("graph is connected by construction"))
            .collect()
    }

    /// All-pairs distances, one BFS per node.
    pub fn all_distances(&self) -> Vec<Vec<usize>> {
        (0..self.node_count).map(|v| self.bfs_distances(v)).collect()
    }

    /// Degree sequence sorted descending (an isomorphism invariant).
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degs: Vec<usize> = (0..self.node_count).map(|v| self.degree(v)).collect();
        degs.sort_unstable_by(|a, b| b.cmp(a));
        degs
    }
}

/// A configuration: a connected graph plus one input string per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    graph: Graph,
    inputs: Vec<Vec<u8>>,
}

impl Instance {
    pub fn new(graph: Graph, inputs: Vec<Vec<u8>>) -> Result<Self, Error> {
        if inputs.len() != graph.node_count() {
            return Err(Error::InputLength {
                got: inputs.len(),
                expect: graph.node_count(),
            });
        }
        Ok(Instance { graph, inputs })
    }

    /// Every node carries the same input (`b""` gives an input-free instance).
    pub fn uniform(graph: Graph, input: &[u8]) -> Self {
        let inputs = vec![input.to_vec(); graph.node_count()];
        Instance { graph, inputs }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn inputs(&self) -> &[Vec<u8>] {
        &self.inputs
    }

    pub fn input(&self, v: usize) -> &[u8] {
        &self.inputs[v]
    }

    /// The distinct inputs present, in ascending byte order.
    pub fn input_alphabet(&self) -> Vec<Vec<u8>> {
        let set: BTreeSet<Vec<u8>> = self.inputs.iter().cloned().collect();
        set.into_iter().collect()
    }

    /// Relabels nodes: node `v` becomes `perm[v]`.  `perm` must be a
    /// permutation of `0..n`; the result is the isomorphic copy.
    pub fn relabel(&self, perm: &[usize]) -> Instance {
        assert_eq!(perm.len(), self.node_count(), "permutation length");
        let n = self.node_count();
        let mut seen = vec![false; n];
        for &p in perm {
            assert!(p < n && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let edges: Vec<(usize, usize)> = self
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| (perm[u], perm[v]))
            .collect();
        let graph = Graph::new(n, &edges).expect("relabeling preserves graph validity");
        let mut inputs = vec![Vec::new(); n];
        for v in 0..n {
            inputs[perm[v]] = self.inputs[v].clone();
        }
        Instance { graph, inputs }
    }

    /// Removes node `v`, compacting indices.  Returns `None` when the removal
    /// would disconnect the graph or delete the last node.
    pub fn delete_node(&self, v: usize) -> Option<Instance> {
        let n = self.node_count();
        if n <= 1 || v >= n {
            return None;
        }
        let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        let local = |u: usize| if u < v { u } else { u - 1 };
        let edges: Vec<(usize, usize)> = self
            .graph
            .edges()
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (local(a), local(b)))
            .collect();
        let graph = Graph::new(n - 1, &edges).ok()?;
        let inputs = keep.iter().map(|&u| self.inputs[u].clone()).collect();
        Some(Instance { graph, inputs })
    }
}

/// Positive, pairwise-distinct identities, one per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityAssignment {
    ids: Vec<u64>,
}

impl IdentityAssignment {
    pub fn new(ids: Vec<u64>) -> Result<Self, Error> {
        if ids.contains(&0) {
            return Err(Error::ZeroIdentity);
        }
        let distinct: BTreeSet<u64> = ids.iter().copied().collect();
        if distinct.len() != ids.len() {
            return Err(Error::DuplicateIdentity);
        }
        Ok(IdentityAssignment { ids })
    }

    fn unchecked(ids: Vec<u64>) -> Self {
        IdentityAssignment { ids }
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// What a node has learned after `radius` message rounds: its radius-t ball.
///
/// Node indices are local to the ball; `members[i]` is the parent-instance
/// index of local node `i`, and members are listed in ascending parent order.
/// `identities`, `certificates`, and `oracle_bound` are present only when the
/// parent run supplied them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub root: usize,
    pub structure: Graph,
    pub radius: usize,
    pub inputs: Vec<Vec<u8>>,
    pub identities: Option<Vec<u64>>,
    pub certificates: Option<Vec<Vec<u8>>>,
    pub distance_to_root: Vec<usize>,
    pub members: Vec<usize>,
    pub oracle_bound: Option<u64>,
}

impl Ball {
    pub fn node_count(&self) -> usize {
        self.structure.node_count()
    }

    /// The ball viewed as a standalone configuration (structure + inputs).
    pub fn as_instance(&self) -> Instance {
        Instance::new(self.structure.clone(), self.inputs.clone())
            .expect("ball inputs align with ball structure")
    }

    /// A copy of this ball carrying the given identities (ball-local order).
    pub fn with_identities(&self, ids: Vec<u64>) -> Ball {
        assert_eq!(ids.len(), self.node_count(), "one identity per ball node");
        let mut ball = self.clone();
        ball.identities = Some(ids);
        ball
    }
}

/// Extracts the radius-`radius` ball around `root`.
///
/// `ids`, `certs`, and `bounds` are optional per-node overlays on the parent
/// instance; when present they must cover every parent node, and the slices
/// relevant to the ball are attached (`bounds` contributes only the root's
/// own bound, which is all a node knows of the oracle).
pub fn extract_ball(
    instance: &Instance,
    ids: Option<&IdentityAssignment>,
    certs: Option<&[Vec<u8>]>,
    bounds: Option<&[u64]>,
    root: usize,
    radius: usize,
) -> Result<Ball, Error> {
    let n = instance.node_count();
    if root >= n {
        return Err(Error::NodeOutOfRange {
            node: root,
            node_count: n,
        });
    }
    if let Some(ids) = ids {
        if ids.len() != n {
            return Err(Error::IdentityLength {
                got: ids.len(),
                expect: n,
            });
        }
    }
    if let Some(certs) = certs {
        if certs.len() != n {
            return Err(Error::CertificateLength {
                got: certs.len(),
                expect: n,
            });
        }
    }
    if let Some(bounds) = bounds {
        if bounds.len() != n {
            return Err(Error::OracleLength {
                got: bounds.len(),
                expect: n,
            });
        }
    }

    let dist = instance.graph().bfs_distances(root);
    let members: Vec<usize> = (0..n).filter(|&v| dist[v] <= radius).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for &(u, v) in instance.graph().edges() {
        if local[u] == usize::MAX || local[v] == usize::MAX {
            continue;
        }
        // Edges joining two frontier nodes are invisible within `radius` rounds.
        if dist[u] == radius && dist[v] == radius {
            continue;
        }
        edges.push((local[u], local[v]));
    }
    let structure =
        Graph::new(members.len(), &edges).expect("ball structure is connected by construction");
    Ok(Ball {
        root: local[root],
        structure,
        radius,
        inputs: members.iter().map(|&v| instance.input(v).to_vec()).collect(),
        identities: ids.map(|a| members.iter().map(|&v| a.ids()[v]).collect()),
        certificates: certs.map(|c| members.iter().map(|&v| c[v].clone()).collect()),
        distance_to_root: members.iter().map(|&v| dist[v]).collect(),
        members,
        oracle_bound: bounds.map(|b| b[root]),
    })
}

/// Witness for a rooted isomorphism: `mapping[i]` is the image in the second
/// ball of the first ball's local node `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedIsoWitness {
    pub mapping: Vec<usize>,
}

/// Searches for a rooted isomorphism between two balls of equal radius.
///
/// The witness must map root to root and preserve adjacency (both ways),
/// inputs, and distance-to-root.  The search assigns ball-one nodes in index
/// order, trying images in ascending order, so the first witness found is the
/// lexicographically least one; identities and certificates are ignored.
pub fn rooted_isomorphic(b1: &Ball, b2: &Ball) -> Result<Option<RootedIsoWitness>, Error> {
    if b1.radius != b2.radius {
        return Err(Error::RadiusMismatch(b1.radius, b2.radius));
    }
    let n = b1.node_count();
    if n != b2.node_count() {
        return Ok(None);
    }
    let compatible = |u: usize, w: usize| {
        b1.inputs[u] == b2.inputs[w]
            && b1.distance_to_root[u] == b2.distance_to_root[w]
            && b1.structure.degree(u) == b2.structure.degree(w)
    };
    if !compatible(b1.root, b2.root) {
        return Ok(None);
    }
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    mapping[b1.root] = b2.root;
    used[b2.root] = true;

    fn search(
        b1: &Ball,
        b2: &Ball,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
        compatible: &dyn Fn(usize, usize) -> bool,
        v: usize,
    ) -> bool {
        let n = mapping.len();
        if v == n {
            return true;
        }
        if mapping[v] != usize::MAX {
            return search(b1, b2, mapping, used, compatible, v + 1);
        }
        'cands: for w in 0..n {
            if used[w] || !compatible(v, w) {
                continue;
            }
            for (u, &mapped) in mapping.iter().enumerate() {
                if mapped == usize::MAX || u == v {
                    continue;
                }
                if b1.structure.has_edge(v, u) != b2.structure.has_edge(w, mapped) {
                    continue 'cands;
                }
            }
            mapping[v] = w;
            used[w] = true;
            if search(b1, b2, mapping, used, compatible, v + 1) {
                return true;
            }
            mapping[v] = usize::MAX;
            used[w] = false;
        }
        false
    }

    if search(b1, b2, &mut mapping, &mut used, &compatible, 0) {
        Ok(Some(RootedIsoWitness { mapping }))
    } else {
        Ok(None)
    }
}

/// Streams every injective assignment of identities from `1..=range_max` to
/// `k` nodes, in lexicographic order.  There are
/// `range_max! / (range_max - k)!` of them.
pub fn enumerate_identity_assignments(
    k: usize,
    range_max: u64,
) -> Result<impl Iterator<Item = IdentityAssignment>, Error> {
    if (range_max as u128) < k as u128 {
        return Err(Error::RangeTooSmall { k, range_max });
    }
    Ok((1..=range_max)
        .permutations(k)
        .map(IdentityAssignment::unchecked))
}

/// Allocation-free twin of [`enumerate_identity_assignments`] for hot loops:
/// calls `f` with each assignment in the same lexicographic order, stopping
/// early when `f` returns `false`.  Returns `true` when the enumeration ran
/// to completion.
pub(crate) fn for_each_injective_assignment(
    k: usize,
    range_max: u64,
    mut f: impl FnMut(&[u64]) -> bool,
) -> bool {
    fn recurse(k: usize, range_max: u64, chosen: &mut Vec<u64>, f: &mut impl FnMut(&[u64]) -> bool) -> bool {
        if chosen.len() == k {
            return f(chosen);
        }
        for value in 1..=range_max {
            if chosen.contains(&value) {
                continue;
            }
            chosen.push(value);
            let keep_going = recurse(k, range_max, chosen, f);
            chosen.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    let mut chosen = Vec::with_capacity(k);
    recurse(k, range_max, &mut chosen, &mut f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;

    fn path3() -> Instance {
        Instance::uniform(enumerate::path(3), b"")
    }

    #[test]
    fn graph_construction_rejects_invalid_input() {
        assert!(matches!(Graph::new(0, &[]), Err(Error::EmptyGraph)));
        assert!(matches!(
            Graph::new(2, &[(0, 0)]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(3, &[(0, 1)]),
            Err(Error::Disconnected)
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 5)]),
            Err(Error::NodeOutOfRange { node: 5, .. })
        ));
    }

    #[test]
    fn ball_of_path_center_is_whole_path() {
        let ball = extract_ball(&path3(), None, None, None, 1, 1).unwrap();
        assert_eq!(ball.members, vec![0, 1, 2]);
        assert_eq!(ball.root, 1);
        assert_eq!(ball.structure.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(ball.distance_to_root, vec![1, 0, 1]);
    }

    #[test]
    fn ball_radius_zero_is_single_node() {
        let ball = extract_ball(&path3(), None, None, None, 0, 0).unwrap();
        assert_eq!(ball.node_count(), 1);
        assert_eq!(ball.root, 0);
        assert!(ball.structure.edges().is_empty());
    }

    #[test]
    fn five_cycle_ball_at_radius_two_drops_the_far_edge() {
        let c5 = Instance::uniform(enumerate::cycle(5), b"");
        let ball = extract_ball(&c5, None, None, None, 0, 2).unwrap();
        assert_eq!(ball.node_count(), 5);
        // Nodes 2 and 3 are both at distance exactly 2, so edge 2-3 is gone:
        // the snapshot is the path 2-1-0-4-3.
        assert_eq!(ball.structure.edges(), &[(0, 1), (0, 4), (1, 2), (3, 4)]);
        assert_eq!(ball.distance_to_root, vec![0, 1, 2, 2, 1]);
    }

    #[test]
    fn ball_covers_everything_beyond_the_diameter() {
        for n in 1..=6 {
            for g in enumerate::connected_graphs(n) {
                let inst = Instance::uniform(g, b"");
                let diam = *inst
                    .graph()
                    .all_distances()
                    .iter()
                    .flatten()
                    .max()
                    .unwrap();
                for v in 0..n {
                    let ball = extract_ball(&inst, None, None, None, v, diam).unwrap();
                    assert_eq!(ball.node_count(), n);
                }
            }
        }
    }

    #[test]
    fn extract_ball_rejects_bad_root() {
        assert!(matches!(
            extract_ball(&path3(), None, None, None, 9, 1),
            Err(Error::NodeOutOfRange { node: 9, .. })
        ));
    }

    #[test]
    fn rooted_isomorphism_matches_equal_stars() {
        let star = Instance::uniform(enumerate::star(3), b"");
        let b1 = extract_ball(&star, None, None, None, 0, 1).unwrap();
        let b2 = extract_ball(&star, None, None, None, 0, 1).unwrap();
        let witness = rooted_isomorphic(&b1, &b2).unwrap().unwrap();
        assert_eq!(witness.mapping[b1.root], b2.root);
    }

    #[test]
    fn rooted_isomorphism_rejects_different_leaf_counts() {
        let s3 = Instance::uniform(enumerate::star(3), b"");
        let s2 = Instance::uniform(enumerate::star(2), b"");
        let b1 = extract_ball(&s3, None, None, None, 0, 1).unwrap();
        let b2 = extract_ball(&s2, None, None, None, 0, 1).unwrap();
        assert!(rooted_isomorphic(&b1, &b2).unwrap().is_none());
    }

    #[test]
    fn eight_cycle_and_four_cycle_balls_differ_at_radius_two() {
        let c8 = Instance::uniform(enumerate::cycle(8), b"");
        let c4 = Instance::uniform(enumerate::cycle(4), b"");
        let b8 = extract_ball(&c8, None, None, None, 0, 2).unwrap();
        let b4 = extract_ball(&c4, None, None, None, 0, 2).unwrap();
        assert_eq!(b8.node_count(), 5);
        assert_eq!(b4.node_count(), 4);
        assert!(rooted_isomorphic(&b8, &b4).unwrap().is_none());
    }

    #[test]
    fn rooted_isomorphism_requires_equal_radii() {
        let b1 = extract_ball(&path3(), None, None, None, 0, 1).unwrap();
        let b2 = extract_ball(&path3(), None, None, None, 0, 2).unwrap();
        assert!(matches!(
            rooted_isomorphic(&b1, &b2),
            Err(Error::RadiusMismatch(1, 2))
        ));
    }

    #[test]
    fn identity_enumeration_counts_and_injectivity() {
        let all: Vec<_> = enumerate_identity_assignments(3, 5).unwrap().collect();
        assert_eq!(all.len(), 60); // 5 * 4 * 3
        for a in &all {
            assert_eq!(a.len(), 3);
            IdentityAssignment::new(a.ids().to_vec()).expect("injective and positive");
        }
        let first: Vec<_> = all.first().unwrap().ids().to_vec();
        assert_eq!(first, vec![1, 2, 3]);
    }

    #[test]
    fn identity_enumeration_rejects_small_ranges() {
        assert!(matches!(
            enumerate_identity_assignments(4, 3),
            Err(Error::RangeTooSmall { k: 4, range_max: 3 })
        ));
    }

    #[test]
    fn streaming_enumeration_matches_the_iterator() {
        let mut streamed = Vec::new();
        for_each_injective_assignment(2, 4, |ids| {
            streamed.push(ids.to_vec());
            true
        });
        let collected: Vec<Vec<u64>> = enumerate_identity_assignments(2, 4)
            .unwrap()
            .map(|a| a.ids().to_vec())
            .collect();
        assert_eq!(streamed, collected);
        assert_eq!(streamed.len(), 12);
    }

    #[test]
    fn delete_node_respects_connectivity() {
        let p3 = path3();
        assert!(p3.delete_node(1).is_none()); // middle of a path disconnects
        let end = p3.delete_node(2).unwrap();
        assert_eq!(end.node_count(), 2);
        let k1 = Instance::uniform(enumerate::complete(1), b"");
        assert!(k1.delete_node(0).is_none());
    }

    #[test]
    fn identity_assignment_validation() {
        assert!(IdentityAssignment::new(vec![1, 2, 3]).is_ok());
        assert!(matches!(
            IdentityAssignment::new(vec![0, 1]),
            Err(Error::ZeroIdentity)
        ));
        assert!(matches!(
            IdentityAssignment::new(vec![2, 2]),
            Err(Error::DuplicateIdentity)
        ));
    }
}
