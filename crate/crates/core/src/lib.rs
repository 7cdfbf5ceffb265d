//! Covariant 2-structures as labelled term rewriting systems, with decision
//! procedures for commutativity of diagrams (Lambek coherence) and bounded
//! verification that all diagrams commute (Mac Lane coherence).

pub mod coherence;
pub mod corpus;
pub mod critical;
pub mod format;
pub mod graph;
pub mod imc;
pub mod par;
pub mod planar;
pub mod rewriting;
pub mod steps;
pub mod syntax;
pub mod terms;

pub use terms::{
    canonicalize, match_many, match_modulo, term_eq, unify_syntactic, CanonicalTerm, ObjectTheory, Position, Signature,
    Substitution, Term, TermError,
};
