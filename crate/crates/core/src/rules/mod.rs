//! Local rule tables and finitely described configurations of local rules.

pub(crate) mod config;
pub mod file;
mod local;
mod view;

pub use config::{orbit_closure, OrbitClosure, RuleConfig};
pub use local::{LocalRule, Symbol};
pub use view::{distinct_view_classes, local_view, LocalView, ViewClass};

pub(crate) use view::derive_config;
