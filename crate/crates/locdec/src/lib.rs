//! Local distributed decision on small graphs, exactly.
//!
//! A *local decider* runs at every node of a connected graph whose nodes
//! carry input strings, sees only its radius-`t` ball (optionally decorated
//! with node identities, an upper bound on the graph size, or a
//! certificate), and votes yes or no; the instance is accepted when every
//! node votes yes.  This crate implements that model and three constructions
//! around it, all at desk scale where exhaustive checking is feasible:
//!
//! * [`semantics`] — deciders, runs, and exhaustive correctness checking of
//!   a decider against a language over every instance of a family and every
//!   identity assignment from a bounded range.
//! * [`anonymize`] — the identity-enumeration transform that turns an
//!   identity-reading decider into an anonymous one given per-node upper
//!   bounds on the graph size, with exact simulation-cost accounting.
//! * [`lift`] — `t`-local isomorphisms (maps that restrict to rooted
//!   isomorphisms on every radius-`t` ball), the search for them, and the
//!   scan for languages that are not closed under such projections.
//! * [`nld`] — a nondeterministic local verifier whose certificates cite a
//!   small member map and a landing label in it, with a wire codec, an
//!   honest prover, an exhaustive certificate search, and an independent
//!   acceptance oracle.
//!
//! Supporting modules: [`graph`] (graphs, instances, balls, identity
//! assignments), [`languages`] (the membership-predicate registry),
//! [`enumerate`] (canonical connected-graph and instance enumeration up to
//! eight nodes), [`textio`] (line-oriented file formats), and [`exec`]
//! (data-parallel driving with a sequential fallback; see the `parallel`
//! feature).
//!
//! Everything is deterministic: enumeration orders are fixed, searches
//! return first hits in a documented order, and results are independent of
//! thread count.

#![forbid(unsafe_code)]

pub mod anonymize;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod graph;
pub mod languages;
pub mod lift;
pub mod nld;
pub mod semantics;
pub mod suite;
pub mod textio;

pub use error::Error;
