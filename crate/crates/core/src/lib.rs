//! Finite relational structures under the Hrushovski predimension
//! `δ(X) = |X| − #tuples(X)`, with the tools needed to study amalgamation
//! classes `K_f`, a concrete counterexample to dimension comparison for
//! `f = log_b(x + 1)`, a finite Szemerédi-style harness and a checker for
//! dimension/measure catalogs.

pub mod amalgamation;
pub mod budget;
pub mod canon;
pub mod cli;
pub mod control;
pub mod counterexample;
pub mod embed;
pub mod error;
pub mod generic;
pub mod measure;
mod flow;
pub mod predim;
pub mod random;
pub mod structure;
pub mod szemeredi;

pub use amalgamation::{free_amalgam, free_power, Amalgam};
pub use budget::Budget;
pub use canon::{are_isomorphic, canonical_form, canonical_form_fixing, CanonicalForm};
pub use control::{good_f_report, kf_member, ControlFunction, GoodFReport, KfMembership};
pub use embed::{embeddings, find_isomorphism, find_leq_embeddings};
pub use error::{Error, Result};
pub use predim::{closure, delta, dim, dim_rel, in_k0, is_d_independent, is_self_sufficient};
pub use structure::{induced_substructure, Embedding, FinStruct, Signature};
