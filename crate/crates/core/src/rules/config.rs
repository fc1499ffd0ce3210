use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rules::local::LocalRule;
use crate::universe::{same_dim, Cell, CellSet, Coord, Cuboid};

pub type Patch = BTreeMap<Cell, LocalRule>;

/// A finitely described assignment of a local rule to every cell of Z^d.
///
/// All rules share one memory and one alphabet. Patch entries override the
/// variant's default rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleConfig {
    Constant {
        rule: LocalRule,
    },
    /// Asymptotic to the constant `background` configuration.
    Patched {
        background: LocalRule,
        patch: Patch,
    },
    /// One-dimensional: `left` on `n <= cut`, `right` on `n > cut`.
    TwoSided1D {
        left: LocalRule,
        right: LocalRule,
        cut: Coord,
        patch: Patch,
    },
    /// Constant on each listed box (first match wins), `background` elsewhere.
    BoxList {
        background: LocalRule,
        boxes: Vec<(Cuboid, LocalRule)>,
        patch: Patch,
    },
}

/// The far-field behaviour of a configuration: what `rule_at` returns away
/// from every special cell.
pub(crate) enum FarField<'a> {
    Uniform(&'a LocalRule),
    Split {
        cut: Coord,
        left: &'a LocalRule,
        right: &'a LocalRule,
    },
}

impl RuleConfig {
    pub fn constant(rule: LocalRule) -> Self {
        RuleConfig::Constant { rule }
    }

    pub fn patched(background: LocalRule, patch: impl IntoIterator<Item = (Cell, LocalRule)>) -> Result<Self> {
        let c = RuleConfig::Patched {
            background,
            patch: patch.into_iter().collect(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn two_sided(
        left: LocalRule,
        right: LocalRule,
        cut: Coord,
        patch: impl IntoIterator<Item = (Cell, LocalRule)>,
    ) -> Result<Self> {
        let c = RuleConfig::TwoSided1D {
            left,
            right,
            cut,
            patch: patch.into_iter().collect(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn box_list(
        background: LocalRule,
        boxes: Vec<(Cuboid, LocalRule)>,
        patch: impl IntoIterator<Item = (Cell, LocalRule)>,
    ) -> Result<Self> {
        let c = RuleConfig::BoxList {
            background,
            boxes,
            patch: patch.into_iter().collect(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            RuleConfig::Constant { .. } => "constant",
            RuleConfig::Patched { .. } => "patched",
            RuleConfig::TwoSided1D { .. } => "two_sided_1d",
            RuleConfig::BoxList { .. } => "box_list",
        }
    }

    fn primary(&self) -> &LocalRule {
        match self {
            RuleConfig::Constant { rule } => rule,
            RuleConfig::Patched { background, .. } => background,
            RuleConfig::TwoSided1D { left, .. } => left,
            RuleConfig::BoxList { background, .. } => background,
        }
    }

    pub fn alphabet(&self) -> u8 {
        self.primary().alphabet()
    }

    pub fn memory(&self) -> &Arc<CellSet> {
        self.primary().memory()
    }

    pub fn dim(&self) -> usize {
        self.memory().dim()
    }

    pub fn patch(&self) -> Option<&Patch> {
        match self {
            RuleConfig::Constant { .. } => None,
            RuleConfig::Patched { patch, .. }
            | RuleConfig::TwoSided1D { patch, .. }
            | RuleConfig::BoxList { patch, .. } => Some(patch),
        }
    }

    /// Every rule mentioned in the description.
    pub fn rules(&self) -> Vec<&LocalRule> {
        let mut out = Vec::new();
        match self {
            RuleConfig::Constant { rule } => out.push(rule),
            RuleConfig::Patched { background, .. } => out.push(background),
            RuleConfig::TwoSided1D { left, right, .. } => {
                out.push(left);
                out.push(right);
            }
            RuleConfig::BoxList {
                background, boxes, ..
            } => {
                out.push(background);
                out.extend(boxes.iter().map(|(_, r)| r));
            }
        }
        if let Some(p) = self.patch() {
            out.extend(p.values());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.alphabet();
        let memory = self.memory();
        let d = memory.dim();
        for r in self.rules() {
            if r.alphabet() != q {
                return Err(Error::InvalidRule(format!(
                    "mixed alphabets {q} and {}",
                    r.alphabet()
                )));
            }
            if r.memory() != memory {
                return Err(Error::InvalidRule("rules do not share one memory".into()));
            }
        }
        if let Some(p) = self.patch() {
            for c in p.keys() {
                same_dim(d, c.dim())?;
            }
        }
        match self {
            RuleConfig::TwoSided1D { .. } if d != 1 => Err(Error::InvalidRule(
                "two-sided configurations are one-dimensional".into(),
            )),
            RuleConfig::BoxList { boxes, .. } => {
                for (b, _) in boxes {
                    same_dim(d, b.dim())?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The rule governing cell `g`.
    pub fn rule_at(&self, g: &Cell) -> &LocalRule {
        if let Some(r) = self.patch().and_then(|p| p.get(g)) {
            return r;
        }
        match self {
            RuleConfig::Constant { rule } => rule,
            RuleConfig::Patched { background, .. } => background,
            RuleConfig::TwoSided1D {
                left, right, cut, ..
            } => {
                if g.coords()[0] <= *cut {
                    left
                } else {
                    right
                }
            }
            RuleConfig::BoxList {
                background, boxes, ..
            } => boxes
                .iter()
                .find(|(b, _)| b.contains(g))
                .map(|(_, r)| r)
                .unwrap_or(background),
        }
    }

    /// The translate `g s`, with `rule_at(gs, h) = rule_at(s, h - g)`.
    pub fn translate(&self, g: &Cell) -> Result<RuleConfig> {
        same_dim(self.dim(), g.dim())?;
        let shift_patch = |p: &Patch| -> Result<Patch> {
            p.iter()
                .map(|(c, r)| Ok((c.checked_add(g)?, r.clone())))
                .collect()
        };
        Ok(match self {
            RuleConfig::Constant { .. } => self.clone(),
            RuleConfig::Patched { background, patch } => RuleConfig::Patched {
                background: background.clone(),
                patch: shift_patch(patch)?,
            },
            RuleConfig::TwoSided1D {
                left,
                right,
                cut,
                patch,
            } => RuleConfig::TwoSided1D {
                left: left.clone(),
                right: right.clone(),
                cut: cut.checked_add(g.coords()[0]).ok_or(Error::Overflow)?,
                patch: shift_patch(patch)?,
            },
            RuleConfig::BoxList {
                background,
                boxes,
                patch,
            } => RuleConfig::BoxList {
                background: background.clone(),
                boxes: boxes
                    .iter()
                    .map(|(b, r)| Ok((b.translate(g)?, r.clone())))
                    .collect::<Result<Vec<_>>>()?,
                patch: shift_patch(patch)?,
            },
        })
    }

    /// Applies `f` to every rule of the description, keeping the structure.
    pub fn map_rules(&self, mut f: impl FnMut(&LocalRule) -> Result<LocalRule>) -> Result<RuleConfig> {
        let map_patch = |p: &Patch, f: &mut dyn FnMut(&LocalRule) -> Result<LocalRule>| -> Result<Patch> {
            p.iter().map(|(c, r)| Ok((c.clone(), f(r)?))).collect()
        };
        let out = match self {
            RuleConfig::Constant { rule } => RuleConfig::Constant { rule: f(rule)? },
            RuleConfig::Patched { background, patch } => RuleConfig::Patched {
                background: f(background)?,
                patch: map_patch(patch, &mut f)?,
            },
            RuleConfig::TwoSided1D {
                left,
                right,
                cut,
                patch,
            } => RuleConfig::TwoSided1D {
                left: f(left)?,
                right: f(right)?,
                cut: *cut,
                patch: map_patch(patch, &mut f)?,
            },
            RuleConfig::BoxList {
                background,
                boxes,
                patch,
            } => RuleConfig::BoxList {
                background: f(background)?,
                boxes: boxes
                    .iter()
                    .map(|(b, r)| Ok((b.clone(), f(r)?)))
                    .collect::<Result<Vec<_>>>()?,
                patch: map_patch(patch, &mut f)?,
            },
        };
        out.validate()?;
        Ok(out)
    }

    pub(crate) fn far_field(&self) -> FarField<'_> {
        match self {
            RuleConfig::Constant { rule } => FarField::Uniform(rule),
            RuleConfig::Patched { background, .. } | RuleConfig::BoxList { background, .. } => {
                FarField::Uniform(background)
            }
            RuleConfig::TwoSided1D {
                left, right, cut, ..
            } => FarField::Split {
                cut: *cut,
                left,
                right,
            },
        }
    }

    /// Cells whose rule may differ from the far field (the cut of a two-sided
    /// configuration is handled separately).
    pub(crate) fn special_cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = self.patch().map(|p| p.keys().cloned().collect()).unwrap_or_default();
        if let RuleConfig::BoxList { boxes, .. } = self {
            for (b, _) in boxes {
                out.extend(b.cells().iter().cloned());
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Finite description of the orbit closure `Σ(s)`: the translates of `s`
/// together with `limit_points`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClosure {
    pub translates_hint: String,
    pub limit_points: Vec<RuleConfig>,
}

pub fn orbit_closure(s: &RuleConfig) -> Result<OrbitClosure> {
    match s {
        RuleConfig::Constant { .. } => Ok(OrbitClosure {
            translates_hint: "constant: every translate equals s".into(),
            limit_points: vec![s.clone()],
        }),
        RuleConfig::Patched { background, .. } => Ok(OrbitClosure {
            translates_hint: "translates gs for g in Z^d".into(),
            limit_points: vec![RuleConfig::constant(background.clone())],
        }),
        RuleConfig::TwoSided1D { left, right, .. } => Ok(OrbitClosure {
            translates_hint: "translates s_k (cut moved to k) for k in Z".into(),
            limit_points: vec![
                RuleConfig::constant(left.clone()),
                RuleConfig::constant(right.clone()),
            ],
        }),
        RuleConfig::BoxList { .. } => Err(Error::Unsupported(
            "orbit closure of a box-list configuration".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mem() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    fn rule(seed: u8) -> LocalRule {
        LocalRule::from_fn(2, mem(), move |n| (n[(seed % 3) as usize] + seed / 3) % 2).unwrap()
    }

    #[test]
    fn rule_at_variants() {
        let f = rule(2);
        let g = rule(0);
        let h = rule(1);
        assert_eq!(RuleConfig::constant(f.clone()).rule_at(&Cell::from(9)), &f);

        let s = RuleConfig::two_sided(f.clone(), g.clone(), 0, []).unwrap();
        assert_eq!(s.rule_at(&Cell::from(0)), &f);
        assert_eq!(s.rule_at(&Cell::from(1)), &g);

        let p = RuleConfig::patched(f.clone(), [(Cell::from(0), h.clone())]).unwrap();
        assert_eq!(p.rule_at(&Cell::from(0)), &h);
        assert_eq!(p.rule_at(&Cell::from(7)), &f);
    }

    #[test]
    fn translate_examples() {
        let f = rule(2);
        let g = rule(0);
        let h = rule(1);
        let c = RuleConfig::constant(f.clone());
        assert_eq!(c.translate(&Cell::from(5)).unwrap(), c);

        let s0 = RuleConfig::two_sided(f.clone(), g.clone(), 0, []).unwrap();
        let s3 = RuleConfig::two_sided(f.clone(), g.clone(), 3, []).unwrap();
        assert_eq!(s0.translate(&Cell::from(3)).unwrap(), s3);

        let p = RuleConfig::patched(f.clone(), [(Cell::from(0), h.clone())]).unwrap();
        let p3 = RuleConfig::patched(f.clone(), [(Cell::from(3), h.clone())]).unwrap();
        assert_eq!(p.translate(&Cell::from(3)).unwrap(), p3);
    }

    #[test]
    fn validation_rejects_mixed_memory_and_dim() {
        let f = rule(2);
        let other = LocalRule::from_fn(2, Arc::new(CellSet::from_ints([0])), |n| n[0]).unwrap();
        assert!(RuleConfig::patched(f.clone(), [(Cell::from(0), other)]).is_err());
        let m2 = Arc::new(CellSet::new(2, vec![Cell::from([0, 0])]).unwrap());
        let r2 = LocalRule::from_fn(2, m2, |n| n[0]).unwrap();
        assert!(RuleConfig::two_sided(r2.clone(), r2, 0, []).is_err());
    }

    #[test]
    fn orbit_closure_limits() {
        let f = rule(2);
        let g = rule(0);
        let c = RuleConfig::constant(f.clone());
        assert_eq!(orbit_closure(&c).unwrap().limit_points, vec![c.clone()]);
        let s = RuleConfig::two_sided(f.clone(), g.clone(), 0, []).unwrap();
        assert_eq!(
            orbit_closure(&s).unwrap().limit_points,
            vec![RuleConfig::constant(f.clone()), RuleConfig::constant(g.clone())]
        );
        let p = RuleConfig::patched(f.clone(), [(Cell::from(0), g.clone())]).unwrap();
        assert_eq!(orbit_closure(&p).unwrap().limit_points, vec![RuleConfig::constant(f.clone())]);
        let b = RuleConfig::box_list(f.clone(), vec![(Cuboid::interval(0, 2).unwrap(), g)], []).unwrap();
        assert!(matches!(orbit_closure(&b), Err(Error::Unsupported(_))));
    }

    #[test]
    fn patched_limit_is_hamming_limit() {
        // translates by g_n agree with the background on [-n, n] once the
        // patch has left that box
        let f = rule(2);
        let p = RuleConfig::patched(f.clone(), [(Cell::from(0), rule(1)), (Cell::from(2), rule(0))]).unwrap();
        let limit = RuleConfig::constant(f);
        let patch_radius = 2;
        for n in 0..8i64 {
            for sign in [-1, 1] {
                let gn = sign * (n + patch_radius + 1);
                let t = p.translate(&Cell::from(gn)).unwrap();
                for h in -n..=n {
                    assert_eq!(t.rule_at(&Cell::from(h)), limit.rule_at(&Cell::from(h)));
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn translate_law(g in -30i64..30, h in -40i64..40, cut in -5i64..5, pc in -4i64..4) {
                let s = RuleConfig::two_sided(rule(2), rule(0), cut, [(Cell::from(pc), rule(4))]).unwrap();
                let t = s.translate(&Cell::from(g)).unwrap();
                prop_assert_eq!(t.rule_at(&Cell::from(h)), s.rule_at(&Cell::from(h - g)));
                let b = RuleConfig::box_list(rule(5), vec![(Cuboid::interval(cut, cut + 3).unwrap(), rule(1))],
                                             [(Cell::from(pc), rule(3))]).unwrap();
                let t = b.translate(&Cell::from(g)).unwrap();
                prop_assert_eq!(t.rule_at(&Cell::from(h)), b.rule_at(&Cell::from(h - g)));
            }
        }
    }
}
