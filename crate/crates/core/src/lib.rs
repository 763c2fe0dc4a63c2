//! Combinatorics of stable marked modular graphs.
//!
//! The crate models graphs with flags, genus labels and classes in a free
//! commutative monoid, together with the morphisms between them:
//! contractions, combinatorial morphisms, stabilization, stable pullback and
//! the isogeny categories used for splitting-type bookkeeping of
//! Gromov–Witten classes, including the dimension and degree of graphs
//! marked by a target-variety profile.

pub mod canon;
pub mod cli;
pub mod error;
pub mod graph;
pub mod io;
pub mod isogeny;
pub mod morphism;
pub mod pullback;
pub mod sample;
pub mod stabilize;
pub mod semigroup;
mod util;

pub use error::{Error, Result, Violation};
pub use graph::{AGraph, Edge, FlagId, GraphBuilder, VertexId};
pub use semigroup::{LinearForm, MonoidElement, MonoidHom};
