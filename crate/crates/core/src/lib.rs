//! Asynchronous non-uniform cellular automata over Z^d.
//!
//! A configuration of local rules `s` assigns a rule table (all over one
//! memory `M`) to every cell; the automaton `σ_s` updates cell `g` with
//! `s(g)` applied to the neighbourhood `g + M`. This crate evaluates such
//! automata exactly on finite windows and periodic boxes, composes them, and
//! searches for the finite certificates behind injectivity, surjectivity,
//! reversibility and post-surjectivity.

pub mod analysis;
pub mod caps;
pub mod codes;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod rules;
pub mod sample;
mod search;
pub mod universe;

pub use caps::Caps;
pub use engine::Pattern;
pub use error::{Error, Result};
pub use rules::{LocalRule, RuleConfig, Symbol};
pub use universe::{Cell, CellSet, Cuboid};
