//! Tools for forbidden-subposet problems on the Boolean lattice.
//!
//! The central quantity is La(n, P): the largest family of subsets of an
//! n-element ground set containing no weak copy of a pattern poset P.
//! This crate provides
//!
//! * a small poset algebra (seven named base posets, series sum `+`,
//!   glued product `*`, duals, isomorphism tests),
//! * weak-subposet embedding search and P-freeness checks for set families,
//! * double chains: the two interleaved chains attached to a permutation,
//!   their counting identity, and Lubell-style averages,
//! * the double-chain upper bound La(n, P) <= sigma(n, b(P)) with
//!   b(P) = (|P| + h(P))/2 - 1, where h is the longest-chain length,
//! * window checks on the infinite double chain and level-family scans
//!   that bound the companion parameter e(P),
//! * an exact La(n, P) solver for small n, and certificates tying the
//!   pieces together.

pub mod cert;
pub mod cli;
pub mod dchain;
pub mod embed;
pub mod expr;
pub mod extremal;
pub mod family;
pub mod poset;

pub use cert::{Budget, Certificate, Verdict, Witness};
pub use dchain::{
    audit_double_chains, chain_lubell_sum, count_containing, count_containing_enumerated,
    double_chain, double_lubell_sum, window_condition, window_poset, DoubleChain, Role,
};
pub use embed::{embeds_weak, family_poset, is_p_free, validate_embedding, Embedding};
pub use expr::{eval_expr, parse_expr, PosetExpr};
pub use extremal::{
    double_chain_bound, e_composition_bound, e_lower_scan, e_upper_witness, la_exact,
    path_embedding_bound, verify_sharp_bound, BoundKind, LaOutcome, LevelsWitness,
};
pub use family::{binomial, sigma, Family};
pub use poset::{base_poset, BaseName, Poset};
