//! Exact evaluation: induced local maps on windows, periodization maps and
//! composition.

mod compose;
mod pattern;
mod periodic;
mod window;

pub use compose::compose;
pub use pattern::Pattern;
pub use periodic::{apply_periodized, lift_eval, PeriodizedMap};
pub use window::{apply_window, apply_window_on, apply_window_with_background};

pub(crate) use window::{output_plans, OutputPlan};
