use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{ball, enumerator, Certificate};
use crate::caps::Caps;
use crate::codes::lex_code;
use crate::engine::{apply_window_with_background, output_plans, Pattern};
use crate::error::{Error, Result};
use crate::rules::{distinct_view_classes, RuleConfig, Symbol};
use crate::universe::{minkowski, same_dim, translate, Cell, CellSet, Coord};

const NOTE: &str = "x is random on the window and equals the background outside it; \
                    the lift check is exact for that configuration";

/// Parameters of a post-surjectivity probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftProbe {
    pub trials: u32,
    pub window_radius: u32,
    pub seed: u64,
    pub background: Symbol,
}

/// Whether some `z` equal to `x` (background-extended) off `g + E` has the
/// image of `x` with the symbol at `g` replaced by `flipped_to`.
///
/// Images of such `z` can only change on `g + E - M`, so comparing there and
/// at `g` is exact.
pub fn lift_exists(
    s: &RuleConfig,
    g: &Cell,
    lift_set: &CellSet,
    x: &Pattern,
    background: Symbol,
    flipped_to: Symbol,
    caps: &Caps,
) -> Result<bool> {
    same_dim(s.dim(), g.dim())?;
    let q = s.alphabet();
    if background >= q || flipped_to >= q {
        return Err(Error::InvalidParameter("symbol outside the alphabet".into()));
    }
    x.check_alphabet(q)?;
    let ge = translate(lift_set, g)?;
    let outs = minkowski(&ge, &s.memory().negated()?)?.union(&CellSet::singleton(g.clone()))?;
    let support = minkowski(&outs, s.memory())?;
    let template: Vec<Symbol> = support.iter().map(|c| x.get(c).unwrap_or(background)).collect();
    let mut target: Vec<Symbol> = output_plans(s, &outs, &support)?
        .iter()
        .map(|p| p.eval(&template))
        .collect();
    target[outs.index_of(g).expect("g is an output cell")] = flipped_to;
    let target = lex_code(&target, q);
    let e = enumerator(s, &outs, &support, &ge, template, caps.enumeration, "lift search")?;
    Ok(e
        .scan(|_, img| {
            if img == target {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .is_some())
}

/// Probes whether single-cell changes of images at `g` lift to changes of the
/// preimage on `g + E`. Evidence only: success on random trials does not
/// prove post-surjectivity, but a failure is exact for the reported `x`.
pub fn post_surjectivity_lift(
    s: &RuleConfig,
    g: &Cell,
    lift_set: &CellSet,
    probe: &LiftProbe,
    caps: &Caps,
) -> Result<Certificate> {
    same_dim(s.dim(), g.dim())?;
    same_dim(s.dim(), lift_set.dim())?;
    let q = s.alphabet();
    let w = translate(&ball(s.dim(), probe.window_radius)?, g)?;
    let at_g = CellSet::singleton(g.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    for _ in 0..probe.trials {
        let x = Pattern::from_fn(w.clone(), |_| rng.gen_range(0..q));
        let y = apply_window_with_background(s, &at_g, &x, probe.background)?.symbols()[0];
        for a in (0..q).filter(|&a| a != y) {
            if !lift_exists(s, g, lift_set, &x, probe.background, a, caps)? {
                return Ok(Certificate::LiftFailure {
                    cell: g.clone(),
                    lift_set: lift_set.clone(),
                    x,
                    background: probe.background,
                    flipped_to: a,
                    note: NOTE.into(),
                });
            }
        }
    }
    Ok(Certificate::LiftWitness {
        cell: g.clone(),
        lift_set: lift_set.clone(),
        trials: probe.trials,
        window_radius: probe.window_radius,
        seed: probe.seed,
        background: probe.background,
        note: NOTE.into(),
    })
}

/// Smallest `r <= max_radius` such that lifts with `E = B_r` succeed at every
/// listed cell. With no cells listed, one cell per view class is probed.
/// Each probe uses window radius `r + ρ + 1` and background 0.
pub fn uniform_post_surjectivity_radius(
    s: &RuleConfig,
    cells: &[Cell],
    max_radius: u32,
    trials: u32,
    seed: u64,
    caps: &Caps,
) -> Result<Option<u32>> {
    let rho = s.memory().radius();
    let cells: Vec<Cell> = if cells.is_empty() {
        let reach = (2 * max_radius as Coord + 3 * rho + 1) as u32;
        distinct_view_classes(s, &ball(s.dim(), reach)?)?
            .into_iter()
            .map(|c| c.representative)
            .collect()
    } else {
        cells.to_vec()
    };
    for r in 0..=max_radius {
        let e = ball(s.dim(), r)?;
        let probe = LiftProbe {
            trials,
            window_radius: r + rho as u32 + 1,
            seed,
            background: 0,
        };
        let mut all = true;
        for g in &cells {
            if post_surjectivity_lift(s, g, &e, &probe, caps)?.is_refutation() {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::LocalRule;
    use std::sync::Arc;

    fn probe() -> LiftProbe {
        LiftProbe {
            trials: 10,
            window_radius: 3,
            seed: 1,
            background: 0,
        }
    }

    #[test]
    fn shift_lifts_with_right_neighbour() {
        let shift = RuleConfig::constant(
            LocalRule::from_fn(2, Arc::new(CellSet::interval(-1, 1)), |n| n[2]).unwrap(),
        );
        let g = Cell::from(0);
        let c = post_surjectivity_lift(&shift, &g, &CellSet::from_ints([1]), &probe(), &Caps::default()).unwrap();
        assert_eq!(c.kind(), "lift-witness");
        assert!(c.replay(&shift, &Caps::default()).unwrap());
        let f = post_surjectivity_lift(&shift, &g, &CellSet::from_ints([0]), &probe(), &Caps::default()).unwrap();
        assert_eq!(f.kind(), "lift-failure");
        assert!(f.replay(&shift, &Caps::default()).unwrap());
        assert_eq!(
            uniform_post_surjectivity_radius(&shift, &[], 3, 5, 0, &Caps::default()).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn xor_never_lifts() {
        let xor = RuleConfig::constant(
            LocalRule::from_fn(2, Arc::new(CellSet::interval(-1, 0)), |n| (n[0] + n[1]) % 2).unwrap(),
        );
        for r in 0..=3 {
            let c = post_surjectivity_lift(&xor, &Cell::from(0), &ball(1, r).unwrap(), &probe(), &Caps::default())
                .unwrap();
            assert_eq!(c.kind(), "lift-failure");
            assert!(c.replay(&xor, &Caps::default()).unwrap());
        }
    }

    #[test]
    fn patched_permutation_lifts_in_place() {
        let id = LocalRule::from_fn(3, Arc::new(CellSet::from_ints([0])), |n| n[0]).unwrap();
        let perm = LocalRule::from_fn(3, Arc::new(CellSet::from_ints([0])), |n| (n[0] + 1) % 3).unwrap();
        let s = RuleConfig::patched(id, [(Cell::from(2), perm)]).unwrap();
        assert_eq!(
            uniform_post_surjectivity_radius(&s, &[], 2, 4, 0, &Caps::default()).unwrap(),
            Some(0)
        );
    }
}
