//! Node maps, t-local isomorphisms, and the lift-closure counterexample scan.
//!
//! A *t-local isomorphism* from one configuration onto another is a node map
//! whose restriction to every radius-t ball is a rooted isomorphism onto the
//! radius-t ball of the image node (structure, inputs, and root all match).
//! Such maps are exactly what radius-t ball snapshots cannot see across: a
//! node of the source and its image in the target observe identical balls,
//! so any radius-t rule votes identically on both.  Consequences used here:
//!
//! * every t-local isomorphism is an input-preserving homomorphism, maps a
//!   node's neighbors bijectively onto its image's neighbors (so it is a
//!   covering map), and is onto a connected target;
//! * fibers have constant size, so the target size divides the source size;
//! * a t-local isomorphism is also an s-local isomorphism for 1 <= s <= t.
//!
//! The divisibility and per-node degree/input facts serve as sound pruning
//! in the searches; the authoritative test is always the full per-ball check.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::exec;
use crate::graph::{extract_ball, Ball, Instance};
use crate::languages::Language;

/// A total map from the nodes of `source` to the nodes of `target`:
/// `map[v]` is the image of source node `v`.  Construction checks only
/// totality and range; structural properties are separate predicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMap {
    source: Instance,
    target: Instance,
    map: Vec<usize>,
}

impl NodeMap {
    pub fn new(source: Instance, target: Instance, map: Vec<usize>) -> Result<Self, Error> {
        if map.len() != source.node_count() {
            return Err(Error::MapLength {
                got: map.len(),
                expect: source.node_count(),
            });
        }
        for (node, &image) in map.iter().enumerate() {
            if image >= target.node_count() {
                return Err(Error::MapOutOfRange {
                    node,
                    image,
                    target_nodes: target.node_count(),
                });
            }
        }
        Ok(NodeMap {
            source,
            target,
            map,
        })
    }

    pub fn source(&self) -> &Instance {
        &self.source
    }

    pub fn target(&self) -> &Instance {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn is_onto(&self) -> bool {
        let mut hit = vec![false; self.target.node_count()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.iter().all(|&h| h)
    }

    /// `self` followed by `then`; requires `self.target == then.source`.
    pub fn compose(&self, then: &NodeMap) -> Result<NodeMap, Error> {
        if self.target != then.source {
            return Err(Error::ComposeMismatch);
        }
        let map = self.map.iter().map(|&v| then.map[v]).collect();
        NodeMap::new(self.source.clone(), then.target.clone(), map)
    }
}

/// Whether the map preserves inputs and sends every source edge to a target
/// edge.  (Collapsing an edge fails: targets have no self-loops.)
pub fn is_homomorphism(map: &NodeMap) -> bool {
    let inputs_ok = (0..map.source.node_count())
        .all(|v| map.source.input(v) == map.target.input(map.image(v)));
    inputs_ok
        && map
            .source
            .graph()
            .edges()
            .iter()
            .all(|&(u, v)| map.target.graph().has_edge(map.image(u), map.image(v)))
}

/// The full per-ball check: for every source node, the restriction of the
/// map to its radius-t ball must be a rooted isomorphism onto the image
/// node's radius-t ball.  `t` must be at least 1.
pub fn is_t_local_isomorphism(map: &NodeMap, t: usize) -> Result<bool, Error> {
    if t == 0 {
        return Err(Error::RadiusZero);
    }
    Ok(map_is_t_local_iso(&map.source, &map.target, &map.map, t))
}

fn map_is_t_local_iso(source: &Instance, target: &Instance, map: &[usize], t: usize) -> bool {
    (0..source.node_count()).all(|u| {
        let sball = extract_ball(source, None, None, None, u, t)
            .expect("roots in range, no overlays");
        let tball = extract_ball(target, None, None, None, map[u], t)
            .expect("map range checked at construction");
        ball_restriction_is_rooted_iso(&sball, &tball, map)
    })
}

/// Whether `map` (indexed by parent-instance node), restricted to the
/// members of `sball`, is a rooted isomorphism onto `tball`: bijective on
/// members, root to root, preserving inputs, distance to the root, and ball
/// edges in both directions.  Also the backbone of the certificate
/// verifier's consistency test.
pub(crate) fn ball_restriction_is_rooted_iso(sball: &Ball, tball: &Ball, map: &[usize]) -> bool {
    let k = sball.node_count();
    if k != tball.node_count() {
        return false;
    }
    let mut img = vec![usize::MAX; k];
    let mut hit = vec![false; k];
    for a in 0..k {
        let image_parent = map[sball.members[a]];
        let Ok(b) = tball.members.binary_search(&image_parent) else {
            return false; // image escapes the target ball
        };
        if hit[b] {
            return false; // not injective on the ball
        }
        hit[b] = true;
        img[a] = b;
        if sball.inputs[a] != tball.inputs[b]
            || sball.distance_to_root[a] != tball.distance_to_root[b]
        {
            return false;
        }
    }
    if img[sball.root] != tball.root {
        return false;
    }
    for a in 0..k {
        for b in (a + 1)..k {
            if sball.structure.has_edge(a, b) != tball.structure.has_edge(img[a], img[b]) {
                return false;
            }
        }
    }
    true
}

/// Searches for a t-local isomorphism from `source` onto `target`.
///
/// Deterministic: source nodes are assigned in (degree descending, input,
/// index) order and images tried in ascending target order, so the returned
/// witness never depends on worker count or platform.  Returns `None` when
/// no such map exists; `t` must be at least 1.
pub fn find_t_local_isomorphism(
    source: &Instance,
    target: &Instance,
    t: usize,
) -> Result<Option<NodeMap>, Error> {
    search_maps(source, target, t, true).map(|(witness, _)| witness)
}

/// Counts all t-local isomorphisms from `source` onto `target`.
pub fn count_t_local_isomorphisms(
    source: &Instance,
    target: &Instance,
    t: usize,
) -> Result<u64, Error> {
    search_maps(source, target, t, false).map(|(_, count)| count)
}

fn search_maps(
    source: &Instance,
    target: &Instance,
    t: usize,
    stop_at_first: bool,
) -> Result<(Option<NodeMap>, u64), Error> {
    if t == 0 {
        return Err(Error::RadiusZero);
    }
    let n = source.node_count();
    let m = target.node_count();
    // Local isomorphisms are onto with constant fiber size.
    if m > n || !n.is_multiple_of(m) {
        return Ok((None, 0));
    }
    // A node and its image have identical radius-t balls, hence equal
    // degrees and inputs; empty candidate sets end the search immediately.
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..m)
                .filter(|&y| {
                    target.graph().degree(y) == source.graph().degree(v)
                        && target.input(y) == source.input(v)
                })
                .collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok((None, 0));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        source
            .graph()
            .degree(b)
            .cmp(&source.graph().degree(a))
            .then_with(|| source.input(a).cmp(source.input(b)))
            .then_with(|| a.cmp(&b))
    });
    let dist = source.graph().all_distances();

    struct Search<'a> {
        source: &'a Instance,
        target: &'a Instance,
        candidates: &'a [Vec<usize>],
        order: &'a [usize],
        dist: &'a [Vec<usize>],
        two_t: usize,
        t: usize,
        stop_at_first: bool,
        img: Vec<usize>,
        witness: Option<Vec<usize>>,
        count: u64,
    }

    impl Search<'_> {
        /// Returns false to abort the whole search (first witness found).
        fn go(&mut self, idx: usize) -> bool {
            if idx == self.order.len() {
                if map_is_t_local_iso(self.source, self.target, &self.img, self.t) {
                    self.count += 1;
                    if self.stop_at_first {
                        self.witness = Some(self.img.clone());
                        return false;
                    }
                }
                return true;
            }
            let v = self.order[idx];
            'cands: for &y in &self.candidates[v] {
                // Partial homomorphism: assigned neighbors must stay adjacent.
                for &w in self.source.graph().neighbors(v) {
                    if self.img[w] != usize::MAX && !self.target.graph().has_edge(y, self.img[w]) {
                        continue 'cands;
                    }
                }
                // Nodes within distance 2t share a ball, so their images
                // must differ (the shared ball's restriction is injective).
                for u in 0..self.img.len() {
                    if self.img[u] == y && self.dist[u][v] <= self.two_t {
                        continue 'cands;
                    }
                }
                self.img[v] = y;
                let keep_going = self.go(idx + 1);
                self.img[v] = usize::MAX;
                if !keep_going {
                    return false;
                }
            }
            true
        }
    }

    let mut search = Search {
        source,
        target,
        candidates: &candidates,
        order: &order,
        dist: &dist,
        two_t: 2 * t,
        t,
        stop_at_first,
        img: vec![usize::MAX; n],
        witness: None,
        count: 0,
    };
    search.go(0);
    let witness = match search.witness {
        Some(map) => Some(NodeMap::new(source.clone(), target.clone(), map)?),
        None => None,
    };
    Ok((witness, search.count))
}

/// Whether `instance` projects onto `seed` by some 1-local isomorphism,
/// i.e. single-round snapshots cannot tell `instance` apart from `seed`
/// node for node.
pub fn is_seed(seed: &Instance, instance: &Instance) -> Result<bool, Error> {
    Ok(find_t_local_isomorphism(instance, seed, 1)?.is_some())
}

/// Result of scanning for a lift-closure violation: a nonmember that
/// projects onto a member by a t-local isomorphism.  Any radius-t decider
/// (with or without certificates fixed per isomorphism class) treats the
/// pair alike, so such a pair is a hard obstruction for the language.
#[derive(Debug, Clone)]
pub struct ClosureSearchOutcome {
    /// The witnessing map, if any: its source is a nonmember, its target a
    /// member.
    pub counterexample: Option<NodeMap>,
    /// Connected instances enumerated (members and nonmembers combined).
    pub instances_enumerated: u64,
    /// (source, target) pairs that survived the divisibility and
    /// star-spectrum prefilters; all of them, independent of early exit.
    pub candidate_pairs: u64,
    /// Index into the candidate-pair scan order of the first witness.
    pub first_hit_index: Option<u64>,
}

/// Multiset of radius-1 ball shapes: (root input, sorted neighbor inputs)
/// with multiplicity.  A t-local isomorphism (t >= 1) preserves each node's
/// shape and has constant fiber size f, so a source spectrum must be
/// exactly f times its target's.
fn star_spectrum(inst: &Instance) -> BTreeMap<(Vec<u8>, Vec<Vec<u8>>), usize> {
    let mut spectrum = BTreeMap::new();
    for v in 0..inst.node_count() {
        let mut around: Vec<Vec<u8>> = inst
            .graph()
            .neighbors(v)
            .iter()
            .map(|&w| inst.input(w).to_vec())
            .collect();
        around.sort();
        *spectrum
            .entry((inst.input(v).to_vec(), around))
            .or_insert(0) += 1;
    }
    spectrum
}

/// Scans every connected instance with at most `max_nodes` nodes over
/// `alphabet` for a lift-closure counterexample of `language` at radius `t`.
///
/// Scan order is deterministic: sources (nonmembers) by node count
/// descending, then canonical enumeration order; targets (members) by node
/// count ascending, then canonical order.  The first surviving pair with a
/// witness is reported; the witness search itself may run in parallel but
/// the earliest pair always wins.
pub fn lift_closure_counterexample(
    language: &Language,
    t: usize,
    max_nodes: usize,
    alphabet: &[Vec<u8>],
) -> Result<ClosureSearchOutcome, Error> {
    if t == 0 {
        return Err(Error::RadiusZero);
    }
    crate::enumerate::check_cap(max_nodes)?;
    let mut members: Vec<Instance> = Vec::new();
    let mut nonmembers_by_size: Vec<Vec<Instance>> = vec![Vec::new(); max_nodes + 1];
    let mut instances_enumerated = 0u64;
    for (n, bucket) in nonmembers_by_size.iter_mut().enumerate().skip(1) {
        for graph in crate::enumerate::connected_graphs(n) {
            for instance in crate::enumerate::instances_over(&graph, alphabet) {
                instances_enumerated += 1;
                if language.is_member(&instance) {
                    members.push(instance);
                } else {
                    bucket.push(instance);
                }
            }
        }
    }
    let sources: Vec<Instance> = nonmembers_by_size
        .into_iter()
        .rev()
        .flatten()
        .collect();
    let member_spectra: Vec<_> = members.iter().map(star_spectrum).collect();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (si, source) in sources.iter().enumerate() {
        let n = source.node_count();
        let source_spectrum = star_spectrum(source);
        for (ti, target) in members.iter().enumerate() {
            let m = target.node_count();
            if m > n || n % m != 0 {
                continue;
            }
            let f = n / m;
            let tspec = &member_spectra[ti];
            let compatible = source_spectrum.len() == tspec.len()
                && tspec
                    .iter()
                    .all(|(shape, &c)| source_spectrum.get(shape) == Some(&(c * f)));
            if compatible {
                pairs.push((si, ti));
            }
        }
    }
    let candidate_pairs = pairs.len() as u64;

    let hit = exec::first_hit(&pairs, |_, &(si, ti)| {
        find_t_local_isomorphism(&sources[si], &members[ti], t)
            .expect("radius validated above")
    });
    let (counterexample, first_hit_index) = match hit {
        Some((idx, map)) => (Some(map), Some(idx as u64)),
        None => (None, None),
    };
    Ok(ClosureSearchOutcome {
        counterexample,
        instances_enumerated,
        candidate_pairs,
        first_hit_index,
    })
}
