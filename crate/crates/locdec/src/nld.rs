//! Nondeterministic local decision with map-shaped certificates.
//!
//! A certificate is a claim "this is the whole network, and I am node i":
//! a labeled instance (the *map*) plus the holder's own 1-based label.  The
//! verifier at each node runs three tests on its radius-t ball:
//!
//! 1. every ball member's certificate cites the identical map;
//! 2. the label assignment, restricted to the ball, is a rooted isomorphism
//!    onto the cited map's ball around the node's own label;
//! 3. the cited map is a member of the language.
//!
//! Any failure (including unparsable bytes) is a no-vote, never an error.
//! On a member instance the honest certificates — everyone cites a
//! canonically labeled copy of the real instance — pass everywhere.  An
//! accepting certificate vector on a connected instance pins down a single
//! cited map (test 1 plus connectivity), and the label assignment is then a
//! t-local isomorphism onto it (test 2 at every node, onto by neighborhood
//! closure).  So the verifier accepts exactly the instances that project
//! onto some member: languages closed under such projections are verified
//! soundly, and [`acceptance_oracle`] makes that characterization
//! executable for cross-checking.

use crate::error::Error;
use crate::exec;
use crate::graph::{extract_ball, Ball, Graph, Instance};
use crate::languages::Language;
use crate::lift::{ball_restriction_is_rooted_iso, find_t_local_isomorphism, NodeMap};
use crate::semantics::{Decision, Verdict, Vote};

/// One node's certificate: a claimed copy of the whole network and the
/// node's own position in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapCertificate {
    label: usize,
    map: Instance,
}

/// Raw per-node certificate bytes, one entry per instance node.
pub type CertificateVector = Vec<Vec<u8>>;

impl MapCertificate {
    /// `label` is 1-based and must index a node of `map`.
    pub fn new(label: usize, map: Instance) -> Result<Self, Error> {
        if label == 0 || label > map.node_count() {
            return Err(Error::CertificateLabel {
                label,
                node_count: map.node_count(),
            });
        }
        Ok(MapCertificate { label, map })
    }

    /// The holder's 1-based label in the cited map.
    pub fn label(&self) -> usize {
        self.label
    }

    /// The cited map (G′, x′).
    pub fn map(&self) -> &Instance {
        &self.map
    }

    /// Binary encoding: big-endian u16 node count, u16 label, the upper
    /// triangle of the adjacency matrix row-major (most significant bit
    /// first, zero padding), then per node a u16 input length and the input
    /// bytes.
    pub fn encode(&self) -> Result<Vec<u8>, Error> {
        let n = self.map.node_count();
        let n16 = u16::try_from(n)
            .map_err(|_| Error::CertificateField(format!("{n} nodes")))?;
        let mut out = Vec::new();
        out.extend_from_slice(&n16.to_be_bytes());
        out.extend_from_slice(&(self.label as u16).to_be_bytes());
        let pair_count = n * (n - 1) / 2;
        let mut adjacency = vec![0u8; pair_count.div_ceil(8)];
        for &(u, v) in self.map.graph().edges() {
            let k = pair_bit(n, u, v);
            adjacency[k / 8] |= 1 << (7 - k % 8);
        }
        out.extend_from_slice(&adjacency);
        for v in 0..n {
            let input = self.map.input(v);
            let len = u16::try_from(input.len())
                .map_err(|_| Error::CertificateField(format!("input of {} bytes", input.len())))?;
            out.extend_from_slice(&len.to_be_bytes());
            out.extend_from_slice(input);
        }
        Ok(out)
    }

    /// Inverse of [`MapCertificate::encode`].  Rejects truncated or trailing
    /// bytes, nonzero padding, out-of-range labels, and claimed maps that
    /// are not valid instances (e.g. disconnected).
    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut cursor = Cursor { bytes, at: 0 };
        let n = cursor.u16()? as usize;
        if n == 0 {
            return Err(Error::CertificateMalformed("claimed map has no nodes".into()));
        }
        let label = cursor.u16()? as usize;
        if label == 0 || label > n {
            return Err(Error::CertificateLabel {
                label,
                node_count: n,
            });
        }
        let pair_count = n * (n - 1) / 2;
        let adjacency = cursor.take(pair_count.div_ceil(8))?;
        let mut edges = Vec::new();
        let mut k = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if adjacency[k / 8] >> (7 - k % 8) & 1 == 1 {
                    edges.push((u, v));
                }
                k += 1;
            }
        }
        if !pair_count.is_multiple_of(8) {
            let padding = adjacency[pair_count / 8] & ((1 << (8 - pair_count % 8)) - 1);
            if padding != 0 {
                return Err(Error::CertificateMalformed("nonzero adjacency padding".into()));
            }
        }
        let mut inputs = Vec::with_capacity(n);
        for _ in 0..n {
            let len = cursor.u16()? as usize;
            inputs.push(cursor.take(len)?.to_vec());
        }
        if cursor.at != bytes.len() {
            return Err(Error::CertificateMalformed(format!(
                "{} trailing bytes",
                bytes.len() - cursor.at
            )));
        }
        let graph = Graph::new(n, &edges)
            .map_err(|e| Error::CertificateMalformed(format!("claimed map: {e}")))?;
        let map = Instance::new(graph, inputs).expect("one input per node by construction");
        MapCertificate::new(label, map)
    }
}

/// Bit position of the pair `(u, v)`, `u < v`, in the row-major upper
/// triangle of an `n`-node adjacency matrix.
fn pair_bit(n: usize, u: usize, v: usize) -> usize {
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], Error> {
        if self.at + len > self.bytes.len() {
            return Err(Error::CertificateMalformed("truncated certificate".into()));
        }
        let slice = &self.bytes[self.at..self.at + len];
        self.at += len;
        Ok(slice)
    }

    fn u16(&mut self) -> Result<u16, Error> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }
}

/// Canonical 1-based labeling used by the honest prover: breadth-first
/// order from node 0, visiting neighbors in ascending index order.
pub fn honest_labeling(instance: &Instance) -> Vec<usize> {
    let n = instance.node_count();
    let order = {
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in instance.graph().neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    };
    let mut labels = vec![0usize; n];
    for (position, &v) in order.iter().enumerate() {
        labels[v] = position + 1;
    }
    labels
}

/// The honest prover: every node cites the same canonically labeled copy of
/// the instance itself and claims its own position in it.
pub fn honest_certificates(instance: &Instance) -> Result<CertificateVector, Error> {
    let labels = honest_labeling(instance);
    let perm: Vec<usize> = labels.iter().map(|&l| l - 1).collect();
    let cited = instance.relabel(&perm);
    (0..instance.node_count())
        .map(|v| MapCertificate::new(labels[v], cited.clone())?.encode())
        .collect()
}

/// Certificates asserting that the instance projects onto `map.target()`
/// along `map`: node v claims label `map[v] + 1` in the target.  With a
/// t-local isomorphism these certificates make the verifier accept the
/// source — honestly when the target tells the truth about the language,
/// adversarially when a nonmember source projects onto a member.
pub fn certificates_from_map(map: &NodeMap) -> Result<CertificateVector, Error> {
    (0..map.source().node_count())
        .map(|v| MapCertificate::new(map.image(v) + 1, map.target().clone())?.encode())
        .collect()
}

/// The per-node verifier.  `ball` must carry certificates (from an
/// extraction with a certificate overlay); its radius is the verification
/// radius.  All failures are no-votes.
pub fn verify_node(ball: &Ball, language: &Language) -> Vote {
    let Some(certs) = ball.certificates.as_ref() else {
        return Vote::No;
    };
    let mut labels = vec![0usize; ball.node_count()];
    let mut cited: Option<Instance> = None;
    for (a, bytes) in certs.iter().enumerate() {
        let Ok(cert) = MapCertificate::decode(bytes) else {
            return Vote::No;
        };
        labels[a] = cert.label;
        match &cited {
            // Test 1: the whole ball cites one identical map.
            Some(map) if map != cert.map() => return Vote::No,
            Some(_) => {}
            None => cited = Some(cert.map().clone()),
        }
    }
    let cited = cited.expect("balls are nonempty");
    let own_label = labels[ball.root];

    // Test 2: labels restricted to the ball form a rooted isomorphism onto
    // the cited map's ball around the node's own label.
    let target_ball = extract_ball(&cited, None, None, None, own_label - 1, ball.radius)
        .expect("decoded labels index the cited map");
    let highest_member = *ball.members.last().expect("balls are nonempty");
    let mut label_map = vec![usize::MAX; highest_member + 1];
    for (a, &parent) in ball.members.iter().enumerate() {
        label_map[parent] = labels[a] - 1;
    }
    if !ball_restriction_is_rooted_iso(ball, &target_ball, &label_map) {
        return Vote::No;
    }

    // Test 3: the cited map belongs to the language.
    if language.is_member(&cited) {
        Vote::Yes
    } else {
        Vote::No
    }
}

/// Runs the verifier at every node on its certificate-carrying radius-t
/// ball.  Accepts iff all nodes vote yes.
pub fn verify(
    instance: &Instance,
    certs: &CertificateVector,
    language: &Language,
    t: usize,
) -> Result<Decision, Error> {
    if t == 0 {
        return Err(Error::RadiusZero);
    }
    let n = instance.node_count();
    if certs.len() != n {
        return Err(Error::CertificateLength {
            got: certs.len(),
            expect: n,
        });
    }
    let votes = exec::map_indexed(n, |v| {
        let ball = extract_ball(instance, None, Some(certs), None, v, t)
            .expect("certificate length validated above");
        verify_node(&ball, language)
    });
    let verdict = if votes.iter().all(|&v| v == Vote::Yes) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(Decision { votes, verdict })
}

/// The independent characterization of acceptance: does the instance
/// project onto some member with at most `min(max_target_nodes, n)` nodes
/// by a t-local isomorphism?  Targets beyond the instance's own size are
/// never needed (accepting label maps are onto), and target inputs are
/// drawn from the instance's own alphabet for the same reason.
pub fn acceptance_oracle(
    instance: &Instance,
    language: &Language,
    t: usize,
    max_target_nodes: usize,
) -> Result<bool, Error> {
    if t == 0 {
        return Err(Error::RadiusZero);
    }
    let limit = max_target_nodes.min(instance.node_count());
    crate::enumerate::check_cap(limit)?;
    let alphabet = instance.input_alphabet();
    for m in 1..=limit {
        if !instance.node_count().is_multiple_of(m) {
            continue; // fibers of a local isomorphism have constant size
        }
        for graph in crate::enumerate::connected_graphs(m) {
            for target in crate::enumerate::instances_over(&graph, &alphabet) {
                if !language.is_member(&target) {
                    continue;
                }
                if find_t_local_isomorphism(instance, &target, t)?.is_some() {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Exhausts the certificate space through the real verifier: tries every
/// member map with at most `min(max_target_nodes, n)` nodes over the
/// instance's alphabet and every label assignment, returning the first
/// certificate vector the verifier accepts.
///
/// This is a complete search despite its restrictions: an accepted vector
/// cites one shared map (test 1 plus connectivity) that is a member
/// (test 3), reached onto by the labels (test 2 plus neighborhood closure),
/// so it lies inside the searched space.  Label assignments are explored by
/// backtracking, pruning a partial assignment as soon as some node whose
/// ball is fully labeled fails [`verify_node`] — pruned branches cannot
/// contain an accepting extension because a node's vote depends only on its
/// own ball's certificates.
pub fn exhaustive_accepting_certificate(
    instance: &Instance,
    language: &Language,
    t: usize,
    max_target_nodes: usize,
) -> Result<Option<CertificateVector>, Error> {
    if t == 0 {
        return Err(Error::RadiusZero);
    }
    let n = instance.node_count();
    let limit = max_target_nodes.min(n);
    crate::enumerate::check_cap(limit)?;
    let alphabet = instance.input_alphabet();

    // Node u's vote settles once every member of its ball holds a
    // certificate; with assignment order 0..n that happens at the ball's
    // highest member index.
    let balls: Vec<Ball> = (0..n)
        .map(|v| extract_ball(instance, None, None, None, v, t).expect("valid roots"))
        .collect();
    let mut settles_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, ball) in balls.iter().enumerate() {
        settles_at[*ball.members.last().expect("nonempty ball")].push(v);
    }

    for m in 1..=limit {
        for graph in crate::enumerate::connected_graphs(m) {
            for target in crate::enumerate::instances_over(&graph, &alphabet) {
                if !language.is_member(&target) {
                    continue;
                }
                // A node's certificate must survive test 2 at the node
                // itself, which forces equal degree and input with its
                // claimed label.
                let candidates: Vec<Vec<usize>> = (0..n)
                    .map(|v| {
                        (0..m)
                            .filter(|&y| {
                                target.graph().degree(y) == instance.graph().degree(v)
                                    && target.input(y) == instance.input(v)
                            })
                            .collect()
                    })
                    .collect();
                if candidates.iter().any(|c| c.is_empty()) {
                    continue;
                }
                let encodings: Vec<Vec<u8>> = (0..m)
                    .map(|y| {
                        MapCertificate::new(y + 1, target.clone())
                            .expect("label in range")
                            .encode()
                            .expect("desk-scale fields fit")
                    })
                    .collect();

                struct Assign<'a> {
                    instance: &'a Instance,
                    language: &'a Language,
                    t: usize,
                    candidates: &'a [Vec<usize>],
                    encodings: &'a [Vec<u8>],
                    settles_at: &'a [Vec<usize>],
                    certs: CertificateVector,
                }

                impl Assign<'_> {
                    fn go(&mut self, v: usize) -> Option<CertificateVector> {
                        let n = self.instance.node_count();
                        if v == n {
                            let decision =
                                verify(self.instance, &self.certs, self.language, self.t)
                                    .expect("lengths match by construction");
                            return (decision.verdict == Verdict::Accept)
                                .then(|| self.certs.clone());
                        }
                        'labels: for &y in &self.candidates[v] {
                            self.certs[v] = self.encodings[y].clone();
                            for &settled in &self.settles_at[v] {
                                let ball = extract_ball(
                                    self.instance,
                                    None,
                                    Some(&self.certs),
                                    None,
                                    settled,
                                    self.t,
                                )
                                .expect("lengths match by construction");
                                if verify_node(&ball, self.language) == Vote::No {
                                    continue 'labels;
                                }
                            }
                            if let Some(hit) = self.go(v + 1) {
                                return Some(hit);
                            }
                        }
                        self.certs[v] = Vec::new();
                        None
                    }
                }

                let mut assign = Assign {
                    instance,
                    language,
                    t,
                    candidates: &candidates,
                    encodings: &encodings,
                    settles_at: &settles_at,
                    certs: vec![Vec::new(); n],
                };
                if let Some(certs) = assign.go(0) {
                    return Ok(Some(certs));
                }
            }
        }
    }
    Ok(None)
}

/// Exact encoded size, in bits, of each node's certificate.
pub fn certificate_size_bits(certs: &CertificateVector) -> Vec<u64> {
    certs.iter().map(|c| c.len() as u64 * 8).collect()
}
