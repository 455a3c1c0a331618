//! Property-based invariants: relabeling invariance of anonymous deciders,
//! identity-independence of identity-blind rules, certificate and text
//! roundtrips, lift stability across faithful bounds, and agreement of the
//! execution helpers with plain sequential iteration.

use proptest::prelude::*;

use locdec::anonymize::{run_lifted, OracleN};
use locdec::exec;
use locdec::graph::{extract_ball, Graph, IdentityAssignment, Instance};
use locdec::languages::coloring_language;
use locdec::nld::MapCertificate;
use locdec::semantics::{hereditary_decider, identity_tiebreak_coloring_decider};
use locdec::textio;

/// Connected instances with up to `max_nodes` nodes and inputs drawn from a
/// fixed two-symbol alphabet; discards disconnected edge masks.
fn instances(max_nodes: usize) -> impl Strategy<Value = Instance> {
    (1..=max_nodes)
        .prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                .collect();
            let masks = proptest::collection::vec(any::<bool>(), pairs.len());
            let inputs = proptest::collection::vec(
                proptest::sample::select(vec![b"x".to_vec(), b"y".to_vec()]),
                n,
            );
            (Just(pairs), masks, inputs)
        })
        .prop_filter_map("connected graphs only", |(pairs, mask, inputs)| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .zip(&mask)
                .filter(|(_, &keep)| keep)
                .map(|(&e, _)| e)
                .collect();
            let n = inputs.len();
            Graph::new(n, &edges)
                .ok()
                .map(|g| Instance::new(g, inputs).expect("one input per node"))
        })
}

/// An instance together with a uniformly shuffled node permutation
/// (`perm[old] = new`).
fn instances_with_permutation(
    max_nodes: usize,
) -> impl Strategy<Value = (Instance, Vec<usize>)> {
    instances(max_nodes).prop_flat_map(|instance| {
        let n = instance.node_count();
        let perm = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
        (Just(instance), perm)
    })
}

/// An instance together with a random injective identity assignment.
fn instances_with_ids(max_nodes: usize) -> impl Strategy<Value = (Instance, IdentityAssignment)> {
    instances(max_nodes).prop_flat_map(|instance| {
        let n = instance.node_count();
        let ids = proptest::sample::subsequence((1..=20u64).collect::<Vec<_>>(), n)
            .prop_shuffle()
            .prop_map(|ids| IdentityAssignment::new(ids).expect("distinct positive ids"));
        (Just(instance), ids)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Anonymous verdicts are invariant under node relabeling, with votes
    /// following the permutation.
    #[test]
    fn anonymous_deciders_ignore_node_labels((instance, perm) in instances_with_permutation(6)) {
        let decider = hereditary_decider(&coloring_language(), 1).unwrap();
        let original = decider.run(&instance, None).unwrap();
        let relabeled_instance = instance.relabel(&perm);
        let relabeled = decider.run(&relabeled_instance, None).unwrap();
        prop_assert_eq!(original.verdict, relabeled.verdict);
        for (v, &new_name) in perm.iter().enumerate() {
            prop_assert_eq!(original.votes[v], relabeled.votes[new_name]);
        }
    }

    /// Identity-blind rules produce the same decision whether or not an
    /// assignment is supplied.
    #[test]
    fn identity_blind_rules_ignore_assignments((instance, ids) in instances_with_ids(6)) {
        let decider = hereditary_decider(&coloring_language(), 1).unwrap();
        let without = decider.run(&instance, None).unwrap();
        let with = decider.run(&instance, Some(&ids)).unwrap();
        prop_assert_eq!(without, with);
    }

    /// Certificates survive an encode/decode roundtrip for any cited map and
    /// label.
    #[test]
    fn certificates_roundtrip((map, label_seed) in (instances(6), any::<usize>())) {
        let label = 1 + label_seed % map.node_count();
        let certificate = MapCertificate::new(label, map).unwrap();
        let bytes = certificate.encode().unwrap();
        prop_assert_eq!(MapCertificate::decode(&bytes).unwrap(), certificate);
    }

    /// Instance files roundtrip through format/parse, identities included.
    #[test]
    fn instance_text_roundtrips((instance, ids) in instances_with_ids(6)) {
        let text = textio::format_instance(&instance, Some(&ids));
        let (back, back_ids) = textio::parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &instance);
        let back_ids = back_ids.unwrap();
        prop_assert_eq!(back_ids.ids(), ids.ids());

        let text = textio::format_instance(&instance, None);
        let (back, back_ids) = textio::parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &instance);
        prop_assert!(back_ids.is_none());
    }

    /// The lifted decider's decision is stable across faithful uniform
    /// bounds (every bound at least the instance size).
    #[test]
    fn lift_is_stable_across_faithful_bounds(
        (instance, extra) in (instances(4), 0..3u64)
    ) {
        let rule = identity_tiebreak_coloring_decider();
        let n = instance.node_count() as u64;
        let base = run_lifted(&instance, &rule, &OracleN::uniform(instance.node_count(), n).unwrap()).unwrap();
        let wider = run_lifted(&instance, &rule, &OracleN::uniform(instance.node_count(), n + 1 + extra).unwrap()).unwrap();
        prop_assert_eq!(base.verdict, wider.verdict);
        let base_votes: Vec<_> = base.nodes.iter().map(|r| r.vote).collect();
        let wider_votes: Vec<_> = wider.nodes.iter().map(|r| r.vote).collect();
        prop_assert_eq!(base_votes, wider_votes);
    }

    /// Balls of radius at least the diameter contain the whole instance with
    /// its full edge set.
    #[test]
    fn wide_balls_cover_the_instance(instance in instances(6)) {
        let n = instance.node_count();
        let ball = extract_ball(&instance, None, None, None, 0, n).unwrap();
        prop_assert_eq!(ball.node_count(), n);
        prop_assert_eq!(ball.structure.edge_count(), instance.graph().edge_count());
        prop_assert_eq!(&ball.as_instance(), &instance);
    }

    /// The execution helpers agree with plain sequential iteration; in the
    /// parallel build this pins the ordered-semantics contract.
    #[test]
    fn exec_helpers_match_sequential_iteration(values in proptest::collection::vec(0..100u32, 0..40)) {
        let doubled = exec::map_indexed(values.len(), |i| values[i] * 2);
        let expected: Vec<u32> = values.iter().map(|v| v * 2).collect();
        prop_assert_eq!(doubled, expected);

        let probe = |i: usize, v: &u32| if (*v + i as u32).is_multiple_of(7) { Some(*v) } else { None };
        let hit = exec::first_hit(&values, probe);
        let expected = values
            .iter()
            .enumerate()
            .find_map(|(i, v)| probe(i, v).map(|r| (i, r)));
        prop_assert_eq!(hit, expected);
    }
}
