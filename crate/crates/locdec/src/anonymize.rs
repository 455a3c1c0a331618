//! Removing identities from a decider by brute-force simulation.
//!
//! An identity-reading decider can be traded for an identity-blind one when
//! every node knows some upper bound on the instance size: the new rule
//! replays the old rule on the node's own ball under **every** injective
//! identity assignment drawn from `1..=bound` and votes yes only if all
//! replays do.  Members survive (all genuine assignments succeed, and every
//! replayed assignment is a genuine one on the ball), and nonmembers still
//! get a dissenting vote because the genuine assignment is among those
//! replayed.  The price is a falling-factorial number of simulations per
//! node.
//!
//! When a node's bound is smaller than its ball (the oracle lied), the rule
//! votes no: a bound that cannot host the ball's identities proves the
//! advice inconsistent, and rejecting keeps nonmember runs sound.  Note the
//! simulation work grows as a falling factorial of the bound, so this is a
//! desk-scale construction: keep bounds small.

use crate::error::Error;
use crate::exec;
use crate::graph::{extract_ball, for_each_injective_assignment, Ball, Instance};
use crate::semantics::{Decision, LocalDecider, Verdict, Vote};

/// Per-node upper bounds on the instance size ("everyone knows some n_u
/// with n <= n_u").  Bounds may differ across nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleN {
    bounds: Vec<u64>,
}

impl OracleN {
    /// The same bound at every node.
    pub fn uniform(node_count: usize, bound: u64) -> Result<Self, Error> {
        OracleN::per_node(vec![bound; node_count])
    }

    pub fn per_node(bounds: Vec<u64>) -> Result<Self, Error> {
        if bounds.contains(&0) {
            return Err(Error::ZeroOracleBound);
        }
        Ok(OracleN { bounds })
    }

    pub fn bounds(&self) -> &[u64] {
        &self.bounds
    }

    /// Whether every bound really dominates the instance size.
    pub fn is_faithful_for(&self, instance: &Instance) -> bool {
        self.bounds.len() == instance.node_count()
            && self.bounds.iter().all(|&b| b >= instance.node_count() as u64)
    }
}

/// Number of injective assignments from `1..=bound` to `ball_nodes` nodes:
/// the falling factorial `bound * (bound-1) * ... * (bound-ball_nodes+1)`,
/// saturating at `u128::MAX`, and 0 when the bound is too small to host the
/// ball.
pub fn simulation_count(ball_nodes: usize, bound: u64) -> u128 {
    if (bound as u128) < ball_nodes as u128 {
        return 0;
    }
    let mut count: u128 = 1;
    for i in 0..ball_nodes as u64 {
        count = count.saturating_mul((bound - i) as u128);
    }
    count
}

/// Replays `rule` on `ball` under every injective identity assignment from
/// `1..=bound`, in lexicographic order, stopping at the first dissent.
/// Returns the combined vote and the number of replays performed.
pub fn simulate(rule: &LocalDecider, ball: &Ball, bound: u64) -> (Vote, u128) {
    let k = ball.node_count();
    if (bound as u128) < k as u128 {
        return (Vote::No, 0);
    }
    let mut work = ball.clone();
    work.identities = Some(vec![0; k]);
    let mut performed: u128 = 0;
    let unanimous = for_each_injective_assignment(k, bound, |ids| {
        work.identities
            .as_mut()
            .expect("scratch identities installed above")
            .copy_from_slice(ids);
        performed += 1;
        rule.vote(&work) == Vote::Yes
    });
    let vote = if unanimous { Vote::Yes } else { Vote::No };
    (vote, performed)
}

/// The identity-blind version of `rule`: same radius, no identities, but a
/// per-node size bound is required at run time.  See the module docs for
/// why correctness carries over.
pub fn lift_to_anonymous(rule: &LocalDecider) -> LocalDecider {
    let inner = rule.clone();
    LocalDecider::new(rule.radius(), false, true, move |ball: &Ball| {
        let bound = ball
            .oracle_bound
            .expect("oracle-reading rule always runs with bounds");
        simulate(&inner, ball, bound).0
    })
}

/// What one node did during a lifted run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSimReport {
    /// Nodes in this node's ball, i.e. identities per replay.
    pub ball_nodes: usize,
    /// Replays a full enumeration would take (0 when the bound is too small).
    pub planned: u128,
    /// Replays actually run before the vote settled.
    pub performed: u128,
    pub vote: Vote,
}

/// A lifted run with per-node simulation accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftRun {
    pub verdict: Verdict,
    pub nodes: Vec<NodeSimReport>,
}

impl LiftRun {
    pub fn decision(&self) -> Decision {
        Decision {
            votes: self.nodes.iter().map(|r| r.vote).collect(),
            verdict: self.verdict,
        }
    }
}

/// Runs the lift of `rule` on `instance` under `oracle`, reporting per-node
/// simulation counts alongside the verdict.  Equivalent to running
/// [`lift_to_anonymous`]`(rule)` with the same bounds, but keeps the books.
pub fn run_lifted(
    instance: &Instance,
    rule: &LocalDecider,
    oracle: &OracleN,
) -> Result<LiftRun, Error> {
    let n = instance.node_count();
    if oracle.bounds().len() != n {
        return Err(Error::OracleLength {
            got: oracle.bounds().len(),
            expect: n,
        });
    }
    let reports = exec::map_indexed(n, |v| {
        let ball = extract_ball(instance, None, None, Some(oracle.bounds()), v, rule.radius())
            .expect("oracle length validated above");
        let bound = ball.oracle_bound.expect("bounds supplied to extraction");
        let planned = simulation_count(ball.node_count(), bound);
        let (vote, performed) = simulate(rule, &ball, bound);
        NodeSimReport {
            ball_nodes: ball.node_count(),
            planned,
            performed,
            vote,
        }
    });
    let verdict = if reports.iter().all(|r| r.vote == Vote::Yes) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(LiftRun {
        verdict,
        nodes: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;
    use crate::languages;
    use crate::semantics::identity_tiebreak_coloring_decider;

    fn inst(g: crate::graph::Graph, inputs: &[&[u8]]) -> Instance {
        Instance::new(g, inputs.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn falling_factorial_counts() {
        assert_eq!(simulation_count(3, 5), 60);
        assert_eq!(simulation_count(2, 4), 12);
        assert_eq!(simulation_count(1, 1), 1);
        assert_eq!(simulation_count(5, 3), 0, "bound below ball size");
        assert_eq!(simulation_count(0, 7), 1, "empty product");
        assert_eq!(
            simulation_count(10, 1 << 40),
            u128::MAX,
            "oversized products saturate"
        );
    }

    #[test]
    fn lifted_tiebreak_on_a_monochromatic_edge() {
        // Both balls are the whole edge (2 nodes, bound 2 -> 2 replays).
        // Node 0 is ball-local root 0: the first replay [1,2] gives it the
        // smaller identity and it dissents immediately.  Node 1 is
        // ball-local root 1: replay [1,2] passes, replay [2,1] dissents.
        let instance = inst(enumerate::path(2), &[b"1", b"1"]);
        let oracle = OracleN::uniform(2, 2).unwrap();
        let run = run_lifted(&instance, &identity_tiebreak_coloring_decider(), &oracle).unwrap();
        assert_eq!(run.verdict, Verdict::Reject);
        assert_eq!(run.nodes[0].planned, 2);
        assert_eq!(run.nodes[0].performed, 1);
        assert_eq!(run.nodes[0].vote, Vote::No);
        assert_eq!(run.nodes[1].planned, 2);
        assert_eq!(run.nodes[1].performed, 2);
        assert_eq!(run.nodes[1].vote, Vote::No);
    }

    #[test]
    fn lifted_tiebreak_accepts_a_proper_coloring() {
        // Members never dissent, so every replay runs: performed == planned.
        let instance = inst(enumerate::path(2), &[b"1", b"2"]);
        let oracle = OracleN::uniform(2, 3).unwrap();
        let run = run_lifted(&instance, &identity_tiebreak_coloring_decider(), &oracle).unwrap();
        assert_eq!(run.verdict, Verdict::Accept);
        for report in &run.nodes {
            assert_eq!(report.planned, 6); // 3 * 2 injective pairs
            assert_eq!(report.performed, 6);
        }
    }

    #[test]
    fn lying_oracle_forces_rejection() {
        let instance = inst(enumerate::path(2), &[b"1", b"2"]);
        let oracle = OracleN::uniform(2, 1).unwrap();
        assert!(!oracle.is_faithful_for(&instance));
        let run = run_lifted(&instance, &identity_tiebreak_coloring_decider(), &oracle).unwrap();
        assert_eq!(run.verdict, Verdict::Reject);
        assert_eq!(run.nodes[0].planned, 0);
        assert_eq!(run.nodes[0].performed, 0);
    }

    #[test]
    fn lift_matches_bookkeeping_run() {
        // The anonymous decider built by lift_to_anonymous and the
        // bookkeeping runner agree vote for vote.
        let rule = identity_tiebreak_coloring_decider();
        let lifted = lift_to_anonymous(&rule);
        assert!(!lifted.uses_identities());
        assert!(lifted.uses_oracle());
        for inputs in [[b"1", b"1"], [b"1", b"2"]] {
            let instance = inst(enumerate::path(2), &inputs.map(|x| x.as_slice()));
            let oracle = OracleN::uniform(2, 3).unwrap();
            let via_decider = lifted
                .run_with(&instance, None, Some(oracle.bounds()))
                .unwrap();
            let via_runner = run_lifted(&instance, &rule, &oracle).unwrap();
            assert_eq!(via_decider.votes, via_runner.decision().votes);
        }
    }

    #[test]
    fn lifted_coloring_is_correct_on_small_instances() {
        // The lift of the identity-tiebreak rule agrees with membership on
        // every connected instance with <=3 nodes over a two-symbol
        // alphabet, under the faithful uniform oracle.
        let rule = identity_tiebreak_coloring_decider();
        let lang = languages::coloring_language();
        let alphabet = [b"1".to_vec(), b"2".to_vec()];
        for n in 1..=3 {
            for graph in enumerate::connected_graphs(n) {
                for instance in enumerate::instances_over(&graph, &alphabet) {
                    let oracle = OracleN::uniform(n, n as u64).unwrap();
                    let run = run_lifted(&instance, &rule, &oracle).unwrap();
                    let expect = if lang.is_member(&instance) {
                        Verdict::Accept
                    } else {
                        Verdict::Reject
                    };
                    assert_eq!(run.verdict, expect, "inputs {:?}", instance.inputs());
                }
            }
        }
    }

    #[test]
    fn verdict_stable_as_faithful_bounds_grow() {
        let rule = identity_tiebreak_coloring_decider();
        for inputs in [[b"1", b"1"], [b"1", b"2"]] {
            let instance = inst(enumerate::path(2), &inputs.map(|x| x.as_slice()));
            let verdicts: Vec<Verdict> = (2..=4)
                .map(|b| {
                    run_lifted(&instance, &rule, &OracleN::uniform(2, b).unwrap())
                        .unwrap()
                        .verdict
                })
                .collect();
            assert!(verdicts.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn oracle_validation() {
        assert!(matches!(
            OracleN::per_node(vec![3, 0, 3]),
            Err(Error::ZeroOracleBound)
        ));
        let instance = Instance::uniform(enumerate::path(3), b"");
        let short = OracleN::uniform(2, 5).unwrap();
        assert!(matches!(
            run_lifted(&instance, &identity_tiebreak_coloring_decider(), &short),
            Err(Error::OracleLength { got: 2, expect: 3 })
        ));
        assert!(!short.is_faithful_for(&instance));
        assert!(OracleN::uniform(3, 3).unwrap().is_faithful_for(&instance));
    }
}
