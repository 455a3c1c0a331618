//! The exhaustive acceptance battery: nine numbered criteria covering the
//! fixture maps, the onto and composition properties of local isomorphisms,
//! hereditary ball deciders, the identity-enumeration lift, certificate
//! completeness and soundness, the cycle-cover soundness failure, and the
//! quadratic certificate size bound.
//!
//! Each criterion runs a fixed deterministic battery and reports a
//! [`CriterionOutcome`] whose detail string contains only counters and
//! structural facts — never timing — so reports are byte-identical across
//! runs and thread counts.  Wall-clock budgets (criteria 1 and 4) only flip
//! the pass flag when blown.
//!
//! Criterion 4 is expected to fail: its radius-2 forest rule cannot see the
//! far side of a 5-cycle (every radius-2 ball of the 5-cycle is a 5-node
//! path, which is a forest), so the battery reports that counterexample
//! honestly instead of hiding it.  See the README for the full argument.

use std::fmt;
use std::time::{Duration, Instant};

use crate::anonymize::{run_lifted, OracleN};
use crate::enumerate::{connected_graphs, cycle, instances_over, instances_up_to, path};
use crate::exec;
use crate::graph::{Graph, Instance};
use crate::languages::{
    alternating_ab_language, coloring_language, forest_language, independent_set_language,
    size_at_most_language, Language,
};
use crate::lift::{
    find_t_local_isomorphism, is_homomorphism, is_t_local_isomorphism,
    lift_closure_counterexample, NodeMap,
};
use crate::nld::{
    acceptance_oracle, certificate_size_bits, certificates_from_map,
    exhaustive_accepting_certificate, honest_certificates, verify,
};
use crate::semantics::{
    decides_correctly, hereditary_decider, identity_tiebreak_coloring_decider, Correctness,
    Counterexample, Verdict, Vote,
};

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    /// Criterion number, 1 through [`CRITERION_COUNT`].
    pub id: usize,
    /// Short battery name.
    pub title: &'static str,
    pub pass: bool,
    /// Deterministic counters and structural facts; no timing.
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "pass" } else { "fail" };
        write!(
            f,
            "criterion {} {} {}: {}",
            self.id, status, self.title, self.detail
        )
    }
}

/// Criteria implemented in the library.  A tenth criterion — byte-identical
/// CLI reports across runs and `--workers` settings — needs a built binary
/// and therefore lives in the CLI crate.
pub const CRITERION_COUNT: usize = 9;

/// Runs one criterion battery; `None` for ids outside
/// `1..=`[`CRITERION_COUNT`].
pub fn run_criterion(id: usize) -> Option<CriterionOutcome> {
    match id {
        1 => Some(cover_fixtures()),
        2 => Some(found_maps_are_onto()),
        3 => Some(local_isomorphisms_compose()),
        4 => Some(hereditary_deciders_at_desk_scale()),
        5 => Some(identity_enumeration_decides_anonymously()),
        6 => Some(honest_certificates_complete()),
        7 => Some(certificate_search_matches_oracle()),
        8 => Some(size_bound_broken_by_cycle_cover()),
        9 => Some(certificate_size_quadratic_bound()),
        _ => None,
    }
}

/// Runs all library criteria in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=CRITERION_COUNT)
        .map(|id| run_criterion(id).expect("id in range"))
        .collect()
}

fn unary(graph: Graph) -> Instance {
    Instance::uniform(graph, b"")
}

fn unary_alphabet() -> Vec<Vec<u8>> {
    vec![Vec::new()]
}

/// Criterion 1: the two fixture maps out of the 8-cycle.  Reducing modulo 4
/// onto the 4-cycle is both a homomorphism and a 1-local isomorphism;
/// reducing modulo 2 onto a single edge is a homomorphism but not 1-local
/// (the image ball is too small).  Budget: under a second.
fn cover_fixtures() -> CriterionOutcome {
    let start = Instant::now();
    let c8 = unary(cycle(8));
    let mod4 = NodeMap::new(
        c8.clone(),
        unary(cycle(4)),
        (0..8).map(|u| u % 4).collect(),
    )
    .expect("mod-4 images are in range");
    let mod2 = NodeMap::new(c8, unary(path(2)), (0..8).map(|u| u % 2).collect())
        .expect("mod-2 images are in range");

    let mod4_hom = is_homomorphism(&mod4);
    let mod4_local = is_t_local_isomorphism(&mod4, 1).expect("radius is positive");
    let mod2_hom = is_homomorphism(&mod2);
    let mod2_local = is_t_local_isomorphism(&mod2, 1).expect("radius is positive");

    let mut pass = mod4_hom && mod4_local && mod2_hom && !mod2_local;
    let mut detail = format!(
        "8-cycle mod 4 onto 4-cycle: homomorphism={mod4_hom} 1-local={mod4_local}; \
         8-cycle mod 2 onto edge: homomorphism={mod2_hom} 1-local={mod2_local}"
    );
    if start.elapsed() >= Duration::from_secs(1) {
        pass = false;
        detail.push_str("; over the 1 s budget");
    }
    CriterionOutcome {
        id: 1,
        title: "cover fixtures",
        pass,
        detail,
    }
}

/// The fixed cover triples used by criteria 2: cycle covers (and one colored
/// variant) at radii 1 and 2, all of which must be found.
fn cover_triples() -> Vec<(Instance, Instance, usize)> {
    let alternating = |n: usize| {
        Instance::new(
            cycle(n),
            (0..n)
                .map(|u| if u % 2 == 0 { b"a".to_vec() } else { b"b".to_vec() })
                .collect(),
        )
        .expect("one input per node")
    };
    vec![
        (unary(cycle(6)), unary(cycle(3)), 1),
        (unary(cycle(8)), unary(cycle(4)), 1),
        (unary(cycle(9)), unary(cycle(3)), 1),
        (unary(cycle(10)), unary(cycle(5)), 1),
        (unary(cycle(12)), unary(cycle(3)), 1),
        (unary(cycle(12)), unary(cycle(4)), 1),
        (unary(cycle(12)), unary(cycle(6)), 1),
        (alternating(8), alternating(4), 1),
        (unary(cycle(10)), unary(cycle(5)), 2),
        (unary(cycle(12)), unary(cycle(6)), 2),
        (unary(cycle(14)), unary(cycle(7)), 2),
        (unary(cycle(16)), unary(cycle(8)), 2),
    ]
}

/// Criterion 2: every found local isomorphism is onto.  Generates 200
/// (source, target, radius) triples on which the search succeeds — first the
/// fixed cycle covers, then self-pairs over every connected input-free
/// instance up to 6 nodes at radii 1 and 2 — and checks surjectivity on each
/// witness.
fn found_maps_are_onto() -> CriterionOutcome {
    const TARGET: usize = 200;
    let mut found = 0usize;
    let mut onto = 0usize;
    let mut missing_covers = 0usize;
    let covers = cover_triples();
    let cover_count = covers.len();

    for (source, target, t) in &covers {
        match find_t_local_isomorphism(source, target, *t).expect("radius is positive") {
            Some(map) => {
                found += 1;
                if map.is_onto() {
                    onto += 1;
                }
            }
            None => missing_covers += 1,
        }
    }

    let pool = instances_up_to(6, &unary_alphabet()).expect("within the enumeration cap");
    'fill: for instance in &pool {
        for t in [1usize, 2] {
            if found == TARGET {
                break 'fill;
            }
            if let Some(map) =
                find_t_local_isomorphism(instance, instance, t).expect("radius is positive")
            {
                found += 1;
                if map.is_onto() {
                    onto += 1;
                }
            }
        }
    }

    let pass = missing_covers == 0 && found == TARGET && onto == TARGET;
    CriterionOutcome {
        id: 2,
        title: "found maps are onto",
        pass,
        detail: format!(
            "triples found={found} onto={onto} (cover fixtures {}/{cover_count}, \
             rest self-pairs up to 6 nodes)",
            cover_count - missing_covers
        ),
    }
}

/// Criterion 3: found 1-local isomorphisms compose.  Searches every ordered
/// pair of connected input-free instances up to 6 nodes (source size a
/// multiple of target size), keeps each first witness, and checks that every
/// composable pair of witnesses is again a 1-local isomorphism.
fn local_isomorphisms_compose() -> CriterionOutcome {
    let pool = instances_up_to(6, &unary_alphabet()).expect("within the enumeration cap");
    let per_source: Vec<Vec<(usize, usize, NodeMap)>> = exec::map_indexed(pool.len(), |i| {
        let source = &pool[i];
        let mut maps = Vec::new();
        for (j, target) in pool.iter().enumerate() {
            if !source.node_count().is_multiple_of(target.node_count()) {
                continue;
            }
            if let Some(map) =
                find_t_local_isomorphism(source, target, 1).expect("radius is positive")
            {
                maps.push((i, j, map));
            }
        }
        maps
    });
    let maps: Vec<(usize, usize, NodeMap)> = per_source.into_iter().flatten().collect();

    let mut composites = 0u64;
    let mut violations = 0u64;
    for (_, j, first) in &maps {
        for (i2, _, second) in &maps {
            if j != i2 {
                continue;
            }
            let composite = first.compose(second).expect("endpoints agree");
            composites += 1;
            if !is_t_local_isomorphism(&composite, 1).expect("radius is positive") {
                violations += 1;
            }
        }
    }

    let pass = !maps.is_empty() && composites > 0 && violations == 0;
    CriterionOutcome {
        id: 3,
        title: "local isomorphisms compose",
        pass,
        detail: format!(
            "pool={} witnesses={} composable_pairs={composites} violations={violations}",
            pool.len(),
            maps.len()
        ),
    }
}

fn describe_counterexample(c: &Counterexample) -> String {
    let kind = if c.member {
        "member rejected"
    } else {
        "nonmember accepted"
    };
    let no_votes = c.votes.iter().filter(|&&v| v == Vote::No).count();
    format!(
        "{kind}: {} nodes, {} edges, degrees {:?}, {} no-vote(s)",
        c.instance.node_count(),
        c.instance.graph().edge_count(),
        c.instance.graph().degree_sequence(),
        no_votes
    )
}

/// Criterion 4: hereditary ball deciders at desk scale.  The radius-1
/// coloring rule must decide colorability on every connected instance up to
/// 6 nodes over 3 colors.  The radius-2 forest rule is checked over every
/// connected input-free instance up to 6 nodes — and is expected to fail on
/// the 5-cycle, whose radius-2 balls are all 5-node paths and therefore
/// forests; the criterion reports that counterexample and stays red.
/// Budget: under two minutes.
fn hereditary_deciders_at_desk_scale() -> CriterionOutcome {
    let start = Instant::now();
    let colors = vec![b"1".to_vec(), b"2".to_vec(), b"3".to_vec()];
    let coloring = coloring_language();
    let coloring_rule = hereditary_decider(&coloring, 1).expect("coloring is hereditary");

    let mut coloring_instances = 0u64;
    let mut coloring_cex: Option<Counterexample> = None;
    'coloring: for n in 1..=6 {
        let graphs = connected_graphs(n);
        let outcomes = exec::map_indexed(graphs.len(), |i| {
            let batch = instances_over(&graphs[i], &colors);
            decides_correctly(&coloring_rule, &coloring, &batch, 6)
                .expect("anonymous rule needs no identity range")
        });
        for outcome in outcomes {
            match outcome {
                Correctness::Decides {
                    instances_checked, ..
                } => coloring_instances += instances_checked,
                Correctness::Fails(c) => {
                    coloring_cex = Some(*c);
                    break 'coloring;
                }
            }
        }
    }

    let forest = forest_language();
    let forest_rule = hereditary_decider(&forest, 2).expect("forests are hereditary");
    let pool = instances_up_to(6, &unary_alphabet()).expect("within the enumeration cap");
    let forest_outcome = decides_correctly(&forest_rule, &forest, &pool, 6)
        .expect("anonymous rule needs no identity range");

    let coloring_part = match &coloring_cex {
        None => format!("coloring at radius 1: {coloring_instances} instances, 0 counterexamples"),
        Some(c) => format!("coloring at radius 1: {}", describe_counterexample(c)),
    };
    let forest_part = match &forest_outcome {
        Correctness::Decides {
            instances_checked, ..
        } => format!("forest at radius 2: {instances_checked} instances, 0 counterexamples"),
        Correctness::Fails(c) => format!("forest at radius 2: {}", describe_counterexample(c)),
    };

    let mut pass = coloring_cex.is_none() && forest_outcome.decides();
    let mut detail = format!("{coloring_part}; {forest_part}");
    if start.elapsed() >= Duration::from_secs(120) {
        pass = false;
        detail.push_str("; over the 2 min budget");
    }
    CriterionOutcome {
        id: 4,
        title: "hereditary ball deciders",
        pass,
        detail,
    }
}

/// Criterion 5: the identity-enumeration lift decides anonymously.  The
/// identity-tiebreak coloring rule is correct with identities; its lift must
/// match coloring membership on every connected instance up to 5 nodes over
/// two colors, under uniform faithful size bounds n, n+1, and 2n, with
/// planned replay counts equal to the falling factorial of the bound over
/// the ball size and performed counts exhausting the plan on yes votes.
fn identity_enumeration_decides_anonymously() -> CriterionOutcome {
    let alphabet = vec![b"1".to_vec(), b"2".to_vec()];
    let coloring = coloring_language();
    let rule = identity_tiebreak_coloring_decider();
    let pool = instances_up_to(5, &alphabet).expect("within the enumeration cap");

    let falling = |bound: u64, k: usize| -> u128 {
        (0..k as u64).map(|i| (bound - i) as u128).product()
    };

    let per_instance: Vec<(u64, u128, u64)> = exec::map_indexed(pool.len(), |i| {
        let instance = &pool[i];
        let n = instance.node_count() as u64;
        let member = coloring.is_member(instance);
        let mut runs = 0u64;
        let mut replays = 0u128;
        let mut mismatches = 0u64;
        for bound in [n, n + 1, 2 * n] {
            let oracle = OracleN::uniform(n as usize, bound).expect("positive bound");
            let run = run_lifted(instance, &rule, &oracle).expect("lift on a faithful oracle");
            runs += 1;
            let verdict_ok = (run.verdict == Verdict::Accept) == member;
            let counters_ok = run.nodes.iter().all(|node| {
                let plan_ok = node.planned == falling(bound, node.ball_nodes);
                let performed_ok = match node.vote {
                    Vote::Yes => node.performed == node.planned,
                    Vote::No => node.performed >= 1 && node.performed <= node.planned,
                };
                plan_ok && performed_ok
            });
            if !(verdict_ok && counters_ok) {
                mismatches += 1;
            }
            replays += run.nodes.iter().map(|node| node.performed).sum::<u128>();
        }
        (runs, replays, mismatches)
    });

    let runs: u64 = per_instance.iter().map(|r| r.0).sum();
    let replays: u128 = per_instance.iter().map(|r| r.1).sum();
    let mismatches: u64 = per_instance.iter().map(|r| r.2).sum();

    let pass = mismatches == 0 && !pool.is_empty();
    CriterionOutcome {
        id: 5,
        title: "identity enumeration decides anonymously",
        pass,
        detail: format!(
            "instances={} lifted_runs={runs} replays={replays} mismatches={mismatches}",
            pool.len()
        ),
    }
}

/// Criterion 6: honest certificates are complete.  For every member instance
/// up to 6 nodes of three languages — colorability over three colors,
/// forests over empty inputs, and the alternating two-symbol path pattern —
/// the honest prover's certificates make the radius-1 verifier accept.
fn honest_certificates_complete() -> CriterionOutcome {
    let batteries: Vec<(&str, Language, Vec<Vec<u8>>)> = vec![
        (
            "coloring",
            coloring_language(),
            vec![b"1".to_vec(), b"2".to_vec(), b"3".to_vec()],
        ),
        ("forest", forest_language(), unary_alphabet()),
        (
            "alternating-path",
            alternating_ab_language(),
            vec![b"a".to_vec(), b"b".to_vec()],
        ),
    ];

    let mut parts = Vec::new();
    let mut pass = true;
    for (label, language, alphabet) in &batteries {
        let mut members = 0u64;
        let mut accepted = 0u64;
        for n in 1..=6 {
            let graphs = connected_graphs(n);
            let counts = exec::map_indexed(graphs.len(), |i| {
                let mut members = 0u64;
                let mut accepted = 0u64;
                for instance in instances_over(&graphs[i], alphabet) {
                    if !language.is_member(&instance) {
                        continue;
                    }
                    members += 1;
                    let certs = honest_certificates(&instance).expect("instance fits the format");
                    let decision =
                        verify(&instance, &certs, language, 1).expect("matching lengths");
                    if decision.verdict == Verdict::Accept {
                        accepted += 1;
                    }
                }
                (members, accepted)
            });
            for (m, a) in counts {
                members += m;
                accepted += a;
            }
        }
        pass = pass && members > 0 && accepted == members;
        parts.push(format!("{label} {accepted}/{members}"));
    }

    CriterionOutcome {
        id: 6,
        title: "honest certificates complete",
        pass,
        detail: format!("members accepted: {}", parts.join(", ")),
    }
}

/// Criterion 7: exhaustive certificate search matches the acceptance oracle.
/// On every connected instance up to 5 nodes over each registry language's
/// alphabet, a certificate vector citing a member map of at most 5 nodes
/// exists exactly when the instance projects onto such a member by a 1-local
/// isomorphism; found vectors re-verify.  For colorability — closed under
/// these projections at this scale — nonmembers must reject under every
/// certificate, i.e. the search must come back empty.
fn certificate_search_matches_oracle() -> CriterionOutcome {
    let registry: Vec<(&str, Language, Vec<Vec<u8>>)> = vec![
        (
            "coloring",
            coloring_language(),
            vec![b"1".to_vec(), b"2".to_vec()],
        ),
        (
            "independent-set",
            independent_set_language(),
            vec![b"0".to_vec(), b"1".to_vec()],
        ),
        ("forest", forest_language(), unary_alphabet()),
        (
            "size-at-most:4",
            size_at_most_language(4).expect("positive bound"),
            unary_alphabet(),
        ),
        (
            "alternating-path",
            alternating_ab_language(),
            vec![b"a".to_vec(), b"b".to_vec()],
        ),
    ];

    let mut checked = 0u64;
    let mut mismatches = 0u64;
    let mut coloring_unsound = 0u64;
    for (label, language, alphabet) in &registry {
        let pool = instances_up_to(5, alphabet).expect("within the enumeration cap");
        let results: Vec<(bool, bool, bool)> = exec::map_indexed(pool.len(), |i| {
            let instance = &pool[i];
            let oracle =
                acceptance_oracle(instance, language, 1, 5).expect("within the enumeration cap");
            let certificate = exhaustive_accepting_certificate(instance, language, 1, 5)
                .expect("within the enumeration cap");
            let consistent = certificate.is_some() == oracle
                && certificate.as_ref().is_none_or(|certs| {
                    verify(instance, certs, language, 1)
                        .expect("matching lengths")
                        .verdict
                        == Verdict::Accept
                });
            (consistent, oracle, language.is_member(instance))
        });
        checked += results.len() as u64;
        mismatches += results.iter().filter(|r| !r.0).count() as u64;
        if *label == "coloring" {
            coloring_unsound += results.iter().filter(|r| r.1 && !r.2).count() as u64;
        }
    }

    let pass = mismatches == 0 && coloring_unsound == 0 && checked > 0;
    CriterionOutcome {
        id: 7,
        title: "certificate search matches the acceptance oracle",
        pass,
        detail: format!(
            "languages={} instances={checked} mismatches={mismatches} \
             coloring_nonmembers_accepting={coloring_unsound}",
            registry.len()
        ),
    }
}

/// Criterion 8: the size bound is broken by a cycle cover.  The closure scan
/// for the 4-node size bound at radius 1 over instances up to 8 nodes must
/// return the 8-cycle-over-4-cycle counterexample as its first candidate,
/// and the certificates read off that cover must make the verifier accept
/// the 8-node nonmember.
fn size_bound_broken_by_cycle_cover() -> CriterionOutcome {
    let language = size_at_most_language(4).expect("positive bound");
    let outcome = lift_closure_counterexample(&language, 1, 8, &unary_alphabet())
        .expect("within the enumeration cap");

    let Some(map) = &outcome.counterexample else {
        return CriterionOutcome {
            id: 8,
            title: "size bound broken by a cycle cover",
            pass: false,
            detail: format!(
                "no counterexample found ({} instances, {} candidate pairs)",
                outcome.instances_enumerated, outcome.candidate_pairs
            ),
        };
    };

    let source = map.source();
    let target = map.target();
    let all_degree_two =
        |i: &Instance| (0..i.node_count()).all(|v| i.graph().degree(v) == 2);
    let shape_ok = source.node_count() == 8
        && source.graph().edge_count() == 8
        && all_degree_two(source)
        && target.node_count() == 4
        && target.graph().edge_count() == 4
        && all_degree_two(target)
        && !language.is_member(source)
        && language.is_member(target)
        && outcome.first_hit_index == Some(0)
        && outcome.instances_enumerated == 12113;

    let certs = certificates_from_map(map).expect("target fits the format");
    let verdict = verify(source, &certs, &language, 1)
        .expect("matching lengths")
        .verdict;
    let accepted = verdict == Verdict::Accept;

    CriterionOutcome {
        id: 8,
        title: "size bound broken by a cycle cover",
        pass: shape_ok && accepted,
        detail: format!(
            "counterexample: 8-cycle covers 4-cycle (candidate 0 of {}, {} instances scanned); \
             verifier verdict on the 8-node nonmember: {verdict}",
            outcome.candidate_pairs, outcome.instances_enumerated
        ),
    }
}

/// Criterion 9: honest certificates fit a quadratic size bound.  Over cycles
/// and paths with 4 to 32 nodes and empty inputs, every per-node certificate
/// size must equal the closed form
/// `8 * (4 + ceil(n(n-1)/2 / 8) + 2n)` bits, and the measured constant
/// `C = max bits / n^2` must be stable — it peaks at n = 4 with 104 bits,
/// i.e. C = 6.5, and decays toward zero from there.
fn certificate_size_quadratic_bound() -> CriterionOutcome {
    let closed_form = |n: u64| 8 * (4 + (n * (n - 1) / 2).div_ceil(8) + 2 * n);

    let mut checked = 0u64;
    let mut deviations = 0u64;
    let mut max_ratio = 0.0f64;
    let mut peak = (0u64, 0u64);
    for n in 4..=32u64 {
        for graph in [cycle(n as usize), path(n as usize)] {
            let instance = unary(graph);
            let certs = honest_certificates(&instance).expect("instance fits the format");
            let sizes = certificate_size_bits(&certs);
            let expected = closed_form(n);
            checked += 1;
            if !sizes.iter().all(|&bits| bits == expected) {
                deviations += 1;
            }
            let ratio = expected as f64 / (n * n) as f64;
            if ratio > max_ratio {
                max_ratio = ratio;
                peak = (n, expected);
            }
        }
    }

    let pass = deviations == 0 && (max_ratio - 6.5).abs() < 1e-12 && peak.0 == 4;
    CriterionOutcome {
        id: 9,
        title: "certificate size quadratic bound",
        pass,
        detail: format!(
            "cycles and paths n=4..=32: {checked} instances match the closed form \
             ({deviations} deviations); C = {max_ratio} with peak {} bits at n = {}",
            peak.1, peak.0
        ),
    }
}
