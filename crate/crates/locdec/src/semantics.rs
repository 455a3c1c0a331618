//! Local deciders and the double-quantifier correctness check.
//!
//! A decider runs the same rule at every node on that node's radius-t ball
//! and votes yes or no; the global verdict accepts exactly when every node
//! votes yes.  A decider *decides* a language when members are accepted
//! under **every** identity assignment and nonmembers are rejected under
//! **every** identity assignment.  Rules that ignore identities collapse
//! that quantifier to a single run.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::exec;
use crate::graph::{
    enumerate_identity_assignments, extract_ball, Ball, IdentityAssignment, Instance,
};
use crate::languages::Language;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vote {
    Yes,
    No,
}

impl fmt::Display for Vote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vote::Yes => write!(f, "yes"),
            Vote::No => write!(f, "no"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => write!(f, "accept"),
            Verdict::Reject => write!(f, "reject"),
        }
    }
}

/// Outcome of one run: the per-node votes and the derived verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub votes: Vec<Vote>,
    pub verdict: Verdict,
}

impl Decision {
    fn from_votes(votes: Vec<Vote>) -> Decision {
        let verdict = if votes.iter().all(|&v| v == Vote::Yes) {
            Verdict::Accept
        } else {
            Verdict::Reject
        };
        Decision { votes, verdict }
    }
}

type Rule = Arc<dyn Fn(&Ball) -> Vote + Send + Sync>;

/// A uniform local rule: every node applies `rule` to its own radius-t ball.
///
/// The two flags declare what the rule reads beyond structure and inputs.
/// `uses_identities` rules must be given an identity assignment at run time;
/// `uses_oracle` rules must be given per-node size bounds.  Runs fail fast
/// when a declared requirement is missing, and never attach overlays the
/// rule did not declare.
#[derive(Clone)]
pub struct LocalDecider {
    radius: usize,
    uses_identities: bool,
    uses_oracle: bool,
    rule: Rule,
}

impl LocalDecider {
    pub fn new(
        radius: usize,
        uses_identities: bool,
        uses_oracle: bool,
        rule: impl Fn(&Ball) -> Vote + Send + Sync + 'static,
    ) -> Self {
        LocalDecider {
            radius,
            uses_identities,
            uses_oracle,
            rule: Arc::new(rule),
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn uses_identities(&self) -> bool {
        self.uses_identities
    }

    pub fn uses_oracle(&self) -> bool {
        self.uses_oracle
    }

    /// The vote this rule casts on a single ball.
    pub fn vote(&self, ball: &Ball) -> Vote {
        (self.rule)(ball)
    }

    /// Runs the decider on an instance, supplying identities if the rule
    /// reads them.  Shorthand for [`LocalDecider::run_with`] without bounds.
    pub fn run(
        &self,
        instance: &Instance,
        ids: Option<&IdentityAssignment>,
    ) -> Result<Decision, Error> {
        self.run_with(instance, ids, None)
    }

    /// Runs the decider with optional identity and size-bound overlays.
    ///
    /// Node votes are independent, so they are computed in parallel; the
    /// vote vector is always in node order regardless of worker count.
    pub fn run_with(
        &self,
        instance: &Instance,
        ids: Option<&IdentityAssignment>,
        bounds: Option<&[u64]>,
    ) -> Result<Decision, Error> {
        if self.uses_identities && ids.is_none() {
            return Err(Error::MissingIdentities);
        }
        if self.uses_oracle && bounds.is_none() {
            return Err(Error::MissingOracle);
        }
        let ids = if self.uses_identities { ids } else { None };
        let bounds = if self.uses_oracle { bounds } else { None };
        // Surface overlay length errors before fanning out.
        extract_ball(instance, ids, None, bounds, 0, self.radius)?;
        let votes = exec::map_indexed(instance.node_count(), |v| {
            let ball = extract_ball(instance, ids, None, bounds, v, self.radius)
                .expect("overlays validated above");
            (self.rule)(&ball)
        });
        Ok(Decision::from_votes(votes))
    }
}

impl fmt::Debug for LocalDecider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalDecider")
            .field("radius", &self.radius)
            .field("uses_identities", &self.uses_identities)
            .field("uses_oracle", &self.uses_oracle)
            .finish_non_exhaustive()
    }
}

/// The canonical anonymous decider for a hereditary language: vote yes
/// exactly when the ball, viewed as a standalone instance, is a member.
///
/// Hereditariness is what makes this sound on members: every ball of a
/// member is itself a member, so members are unanimously accepted.  On a
/// nonmember the rule rejects only if some radius-t ball already fails
/// membership, which depends on the language/radius pair; use
/// [`decides_correctly`] to check a given pair at desk scale.
pub fn hereditary_decider(language: &Language, radius: usize) -> Result<LocalDecider, Error> {
    if !language.hereditary() {
        return Err(Error::NotHereditary(language.name().to_string()));
    }
    let language = language.clone();
    Ok(LocalDecider::new(radius, false, false, move |ball| {
        if language.is_member(&ball.as_instance()) {
            Vote::Yes
        } else {
            Vote::No
        }
    }))
}

/// A radius-1 decider for proper coloring that genuinely reads identities:
/// a node votes no exactly when some neighbor shares its input **and** the
/// node's own identity is smaller than that neighbor's.
///
/// On a properly colored instance no neighbor ever shares an input, so all
/// nodes vote yes under every assignment.  On a miscolored instance some
/// edge is monochromatic, and whichever endpoint holds the smaller identity
/// votes no — under every assignment, since identities are distinct.  The
/// identity of the dissenting node varies with the assignment, which is the
/// point: correct decisions don't require identity-independent votes.
pub fn identity_tiebreak_coloring_decider() -> LocalDecider {
    LocalDecider::new(1, true, false, |ball: &Ball| {
        let ids = ball
            .identities
            .as_ref()
            .expect("identity-reading rule always runs with identities");
        let root = ball.root;
        for &w in ball.structure.neighbors(root) {
            if ball.inputs[w] == ball.inputs[root] && ids[root] < ids[w] {
                return Vote::No;
            }
        }
        Vote::Yes
    })
}

/// The trivial anonymous decider that accepts everything.  Decides no
/// nontrivial language; used as a fixture for the correctness checker.
pub fn always_yes_decider(radius: usize) -> LocalDecider {
    LocalDecider::new(radius, false, false, |_| Vote::Yes)
}

/// An identity-reading fixture with no correct behavior: a node votes yes
/// exactly when its own identity is odd.  Useful for exercising the
/// per-assignment quantifier in [`decides_correctly`].
pub fn identity_parity_decider(radius: usize) -> LocalDecider {
    LocalDecider::new(radius, true, false, |ball: &Ball| {
        let ids = ball
            .identities
            .as_ref()
            .expect("identity-reading rule always runs with identities");
        if ids[ball.root] % 2 == 1 {
            Vote::Yes
        } else {
            Vote::No
        }
    })
}

/// A witness that a decider fails on some instance: the instance, its true
/// membership, the identity assignment under which the run went wrong (for
/// identity-reading rules), and the offending votes.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub instance: Instance,
    pub member: bool,
    pub identities: Option<Vec<u64>>,
    pub votes: Vec<Vote>,
}

/// Outcome of the exhaustive desk-scale correctness check.
#[derive(Debug, Clone)]
pub enum Correctness {
    Decides {
        instances_checked: u64,
        runs_checked: u64,
    },
    Fails(Box<Counterexample>),
}

impl Correctness {
    pub fn decides(&self) -> bool {
        matches!(self, Correctness::Decides { .. })
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Correctness::Decides { .. } => None,
            Correctness::Fails(c) => Some(c),
        }
    }
}

/// Exhaustively checks whether `decider` decides `language` on the given
/// instance family.
///
/// For identity-reading rules every injective assignment from
/// `1..=id_range_max` is tried on each instance: a member must be accepted
/// under all of them, a nonmember rejected under all of them.  The range
/// must cover the largest instance (else `RangeTooSmall`); identity-blind
/// rules are run once per instance and ignore the range.  Rules that read a
/// size bound are given the exact instance size, the tightest faithful
/// bound.
///
/// Instances are visited in slice order and assignments in lexicographic
/// order, so the first counterexample is deterministic.  Desk scale only:
/// the assignment space is a falling factorial per instance.
pub fn decides_correctly(
    decider: &LocalDecider,
    language: &Language,
    instances: &[Instance],
    id_range_max: u64,
) -> Result<Correctness, Error> {
    let mut instances_checked = 0u64;
    let mut runs_checked = 0u64;
    for instance in instances {
        instances_checked += 1;
        let n = instance.node_count();
        let member = language.is_member(instance);
        let bounds_vec = vec![n as u64; n];
        let bounds = decider.uses_oracle().then_some(bounds_vec.as_slice());
        if decider.uses_identities() {
            for ids in enumerate_identity_assignments(n, id_range_max)? {
                runs_checked += 1;
                let decision = decider.run_with(instance, Some(&ids), bounds)?;
                let ok = match member {
                    true => decision.verdict == Verdict::Accept,
                    false => decision.verdict == Verdict::Reject,
                };
                if !ok {
                    return Ok(Correctness::Fails(Box::new(Counterexample {
                        instance: instance.clone(),
                        member,
                        identities: Some(ids.ids().to_vec()),
                        votes: decision.votes,
                    })));
                }
            }
        } else {
            runs_checked += 1;
            let decision = decider.run_with(instance, None, bounds)?;
            let ok = match member {
                true => decision.verdict == Verdict::Accept,
                false => decision.verdict == Verdict::Reject,
            };
            if !ok {
                return Ok(Correctness::Fails(Box::new(Counterexample {
                    instance: instance.clone(),
                    member,
                    identities: None,
                    votes: decision.votes,
                })));
            }
        }
    }
    Ok(Correctness::Decides {
        instances_checked,
        runs_checked,
    })
}
