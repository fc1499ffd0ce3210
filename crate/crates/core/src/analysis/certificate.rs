use serde::{Deserialize, Serialize};

use crate::analysis::{
    composite_is_identity, lift_exists, pattern_in_image, post_surjectivity_lift,
    psi_invertibility_check, verify_left_inverse, LiftProbe,
};
use crate::caps::Caps;
use crate::engine::{apply_window_with_background, Pattern, PeriodizedMap};
use crate::error::Result;
use crate::rules::file::RuleFile;
use crate::rules::{RuleConfig, Symbol};
use crate::universe::{minkowski, Cell, CellSet, Cuboid};

/// A finite, replayable witness for an analysis verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Two patterns on `window`, extended by `background`, with equal images.
    /// Images can only differ on `window - M`, which is where `image` lives.
    CollisionAsymptotic {
        radius: u32,
        background: Symbol,
        window: Cuboid,
        left: Pattern,
        right: Pattern,
        image: Pattern,
    },
    /// Two patterns on a box whose periodic lifts have equal images.
    CollisionPeriodic {
        period_box: Cuboid,
        left: Pattern,
        right: Pattern,
        image: Pattern,
    },
    /// A pattern that no configuration maps onto.
    MissingImagePattern { radius: u32, pattern: Pattern },
    /// A left inverse with memory `memory`, found at search radius `radius`.
    InverseSynthesized {
        radius: u32,
        memory: CellSet,
        inverse: RuleFile,
    },
    PsiBijection {
        period_box: Cuboid,
        table_size: u64,
        inverse_digest: String,
    },
    PsiCollision {
        period_box: Cuboid,
        left: Pattern,
        right: Pattern,
        image: Pattern,
    },
    /// Every probed flip of an image cell lifted to a change on `cell + lift_set`.
    LiftWitness {
        cell: Cell,
        lift_set: CellSet,
        trials: u32,
        window_radius: u32,
        seed: u64,
        background: Symbol,
        note: String,
    },
    /// No change of `x` on `cell + lift_set` realizes the flipped image.
    LiftFailure {
        cell: Cell,
        lift_set: CellSet,
        x: Pattern,
        background: Symbol,
        flipped_to: Symbol,
        note: String,
    },
    Inconclusive {
        search: String,
        bound: u32,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        notes: Vec<String>,
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::CollisionAsymptotic { .. } => "collision-asymptotic",
            Certificate::CollisionPeriodic { .. } => "collision-periodic",
            Certificate::MissingImagePattern { .. } => "missing-image-pattern",
            Certificate::InverseSynthesized { .. } => "inverse-synthesized",
            Certificate::PsiBijection { .. } => "psi-bijection",
            Certificate::PsiCollision { .. } => "psi-collision",
            Certificate::LiftWitness { .. } => "lift-witness",
            Certificate::LiftFailure { .. } => "lift-failure",
            Certificate::Inconclusive { .. } => "inconclusive",
        }
    }

    /// Whether the certificate refutes the property that was searched for.
    pub fn is_refutation(&self) -> bool {
        matches!(
            self,
            Certificate::CollisionAsymptotic { .. }
                | Certificate::CollisionPeriodic { .. }
                | Certificate::MissingImagePattern { .. }
                | Certificate::PsiCollision { .. }
                | Certificate::LiftFailure { .. }
        )
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Certificate::Inconclusive { .. })
    }

    /// The synthesized inverse, if this is an inverse certificate.
    pub fn inverse_config(&self) -> Result<Option<RuleConfig>> {
        match self {
            Certificate::InverseSynthesized { inverse, .. } => inverse.to_config().map(Some),
            _ => Ok(None),
        }
    }

    /// Re-checks the certificate against `s` with the engine.
    pub fn replay(&self, s: &RuleConfig, caps: &Caps) -> Result<bool> {
        match self {
            Certificate::CollisionAsymptotic {
                background,
                window,
                left,
                right,
                image,
                ..
            } => {
                let w = window.cells();
                if left.support() != &w || right.support() != &w || left == right {
                    return Ok(false);
                }
                let out = minkowski(&w, &s.memory().negated()?)?;
                if image.support() != &out {
                    return Ok(false);
                }
                let a = apply_window_with_background(s, &out, left, *background)?;
                let b = apply_window_with_background(s, &out, right, *background)?;
                Ok(&a == image && &b == image)
            }
            Certificate::CollisionPeriodic {
                period_box,
                left,
                right,
                image,
            } => {
                let k = period_box.cells();
                if left.support() != &k || right.support() != &k || left == right {
                    return Ok(false);
                }
                let psi = PeriodizedMap::new(s, period_box)?;
                if &psi.apply(left)? != image || &psi.apply(right)? != image {
                    return Ok(false);
                }
                crate::analysis::collision::lifts_collide(s, period_box, left.symbols(), right.symbols())
            }
            Certificate::PsiCollision {
                period_box,
                left,
                right,
                image,
            } => {
                let psi = PeriodizedMap::new(s, period_box)?;
                Ok(left != right && &psi.apply(left)? == image && &psi.apply(right)? == image)
            }
            Certificate::MissingImagePattern { pattern, .. } => {
                Ok(!pattern_in_image(s, pattern, caps)?)
            }
            Certificate::InverseSynthesized { memory, inverse, .. } => {
                let q = inverse.to_config()?;
                if q.memory().as_ref() != memory {
                    return Ok(false);
                }
                Ok(composite_is_identity(&q, s, caps)?
                    && verify_left_inverse(&q, s, 100, 3, 0, caps)?)
            }
            Certificate::PsiBijection { period_box, .. } => {
                Ok(&psi_invertibility_check(s, period_box, caps)? == self)
            }
            Certificate::LiftWitness {
                cell,
                lift_set,
                trials,
                window_radius,
                seed,
                background,
                ..
            } => {
                let probe = LiftProbe {
                    trials: *trials,
                    window_radius: *window_radius,
                    seed: *seed,
                    background: *background,
                };
                Ok(&post_surjectivity_lift(s, cell, lift_set, &probe, caps)? == self)
            }
            Certificate::LiftFailure {
                cell,
                lift_set,
                x,
                background,
                flipped_to,
                ..
            } => {
                let current =
                    apply_window_with_background(s, &CellSet::singleton(cell.clone()), x, *background)?;
                if current.symbols()[0] == *flipped_to {
                    return Ok(false);
                }
                Ok(!lift_exists(s, cell, lift_set, x, *background, *flipped_to, caps)?)
            }
            Certificate::Inconclusive { .. } => Ok(true),
        }
    }
}
