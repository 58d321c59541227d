//! Combinatorial calculus of Artin defining graphs.
//!
//! An Artin group is presented by a finite labelled simplicial graph: vertices
//! are generators, and an edge `{a, b}` with label `m >= 2` imposes the braid
//! relation `prod(a,b,m) = prod(b,a,m)`, where `prod(u,v,m)` is the length-`m`
//! prefix of the alternating word `uvuv...`. A missing edge means no relation
//! (`m = infinity`). This crate computes with such graphs:
//!
//! - [`graph`]: the defining-graph data model, JSON parsing, separating
//!   vertices, big-chunk (block) decompositions, odd components;
//! - [`canon`]: canonical forms and labelled-graph isomorphism;
//! - [`algebra`]: exact arithmetic in cyclotomic fields, used to decide signs
//!   of Gram-matrix minors without floating-point ambiguity;
//! - [`coxeter`]: spherical-type detection, the finite-type classification,
//!   longest-element diagram automorphisms, Garside words;
//! - [`word`]: formal words in generators and Garside letters;
//! - [`ribbon`]: elementary ribbons, ribbon-word validation and composition,
//!   odd-path conjugation witnesses;
//! - [`twist`]: elementary twists, twist orbits, twist-equivalence decision,
//!   and the compiler from Dehn twists (given by ribbon words) to sequences of
//!   elementary twists;
//! - [`gog`]: the crushed graph of groups `M_S` and its deformation moves
//!   (collapse, expansion, reduction, surviving edges, Betti number);
//! - [`certify`]: a sufficient-condition certifier for the strong twist
//!   conjecture, built from per-chunk class checks and per-clique ribbon
//!   checks.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to use from multiple threads.

pub mod algebra;
pub mod canon;
pub mod certify;
pub mod coxeter;
pub mod gog;
pub mod graph;
pub mod ribbon;
pub mod twist;
pub mod word;

pub use canon::CanonicalForm;

pub use coxeter::{CoxeterClass, CoxeterError, FiniteType};

pub use graph::{ChunkDecomposition, DefiningGraph, GraphError, Vertex};
pub use ribbon::{RibbonError, RibbonLetter, RibbonLetterKind, RibbonWord};




pub use word::{FormalWord, Letter, LetterKind};

/// Vertex-count cap applied by the search entry points (twist enumeration,
/// orbits, equivalence, certification). Canonical forms and the plain graph
/// operations work on larger graphs, but backtracking and subset enumeration
/// are only intended for desk scale.
pub const DEFAULT_VERTEX_CAP: usize = 16;
