//! Synthesis of coordinator processes for networks of flat CSP agents.
//!
//! The pipeline: parse a model (agent network + specification pair), flatten
//! the network into a single environment process, translate the liveness
//! formula's negation to a Büchi automaton, build the specification automaton
//! over `Σ × 2^Σ` (explicitly or symbolically with BDDs), reinterpret it as a
//! universal co-Büchi automaton, and search for a Moore machine of bounded
//! size with a SAT encoding. Extracted machines are converted back to CSP and
//! re-checked by an independent verifier.

pub mod automata;
pub mod bdd;
pub mod benchgen;
pub mod coordinator;
pub mod csp;
pub mod ltl;
pub mod parse;
pub mod pipeline;
pub mod sat;
pub mod specauto;
pub mod synth;
pub mod verify;

pub use csp::{Action, ActionId, ActionTable, Network, Process, SpecPair, StateId, Trace};
