//! Finite certificates for injectivity, surjectivity, reversibility and
//! post-surjectivity.
//!
//! Every search is exhaustive over an explicit finite space and visits it in
//! a fixed order (radii ascending, patterns by lexicographic code), so the
//! certificate returned is the first one in that order regardless of thread
//! count.

mod certificate;
mod collision;
mod image;
mod injectivity1d;
mod inverse;
mod periodic;
mod post;

pub use certificate::Certificate;
pub use collision::{
    collision_search, stable_injectivity_check, RepresentativeResult, StableInjectivityReport,
    StableVerdict,
};
pub use image::{image_window, pattern_in_image, surjectivity_deficit, ImageWindow};
pub use injectivity1d::{constant_injectivity_1d, EventuallyPeriodic, Injectivity1D};
pub use inverse::{
    composite_is_identity, determination_table, min_determining_radius, synthesize_inverse,
    verify_left_inverse,
};
pub use periodic::{psi_inverse_table, psi_invertibility_check, wrap_compatibility};
pub use post::{lift_exists, post_surjectivity_lift, uniform_post_surjectivity_radius, LiftProbe};

use crate::caps::within_cap;
use crate::codes::lex_weights;
use crate::engine::output_plans;
use crate::error::{Error, Result};
use crate::rules::{RuleConfig, Symbol};
use crate::search::Enumerator;
use crate::universe::{CellSet, Coord, Cuboid};

/// `B_r = [-r, r]^d`.
pub fn ball(dim: usize, r: u32) -> Result<CellSet> {
    Ok(Cuboid::centered(dim, r as Coord)?.cells())
}

/// Enumerates `free` inside an input buffer over `support` (other cells fixed
/// by `template`) and reports image codes on `outputs`.
pub(crate) fn enumerator(
    s: &RuleConfig,
    outputs: &CellSet,
    support: &CellSet,
    free: &CellSet,
    template: Vec<Symbol>,
    cap: u64,
    what: &str,
) -> Result<Enumerator> {
    let q = s.alphabet();
    within_cap(q as u64, outputs.len(), u64::MAX, "image code")?;
    let plans = output_plans(s, outputs, support)?;
    let free = free
        .iter()
        .map(|c| {
            support
                .index_of(c)
                .ok_or_else(|| Error::SupportMismatch(format!("free cell {c} outside the input")))
        })
        .collect::<Result<Vec<_>>>()?;
    Enumerator::new(q, template, free, plans, lex_weights(q, outputs.len()), cap, what)
}
