//! Local views `s|_{g+E}` and the finite enumeration of their translation
//! classes for finitely described configurations.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rules::config::{FarField, RuleConfig};
use crate::rules::local::LocalRule;
use crate::universe::{same_dim, Cell, CellSet, Coord};

/// The rules of a configuration on a cell set, in canonical cell order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalView {
    rules: Vec<LocalRule>,
}

impl LocalView {
    pub fn rules(&self) -> &[LocalRule] {
        &self.rules
    }

    /// Stable hex fingerprint of the view.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for r in &self.rules {
            h.update([r.alphabet()]);
            h.update(r.digit_string().as_bytes());
            h.update(b"|");
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// `s|_E` for an absolute cell set `E`.
pub fn local_view(s: &RuleConfig, cells: &CellSet) -> Result<LocalView> {
    same_dim(s.dim(), cells.dim())?;
    Ok(LocalView {
        rules: cells.iter().map(|c| s.rule_at(c).clone()).collect(),
    })
}

fn view_at(s: &RuleConfig, g: &Cell, offsets: &CellSet) -> Result<LocalView> {
    let rules = offsets
        .iter()
        .map(|e| Ok(s.rule_at(&g.checked_add(e)?).clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalView { rules })
}

/// A representative cell `g` and the view of `s` on `g + E`, which is the
/// view of the translate `(-g)s` on `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewClass {
    pub representative: Cell,
    pub view: LocalView,
}

/// One representative per class of views `s|_{g+E}`, `g ∈ Z^d`.
///
/// The list is complete: every cell's view equals the view of some listed
/// representative. Representatives come in canonical order, with far-field
/// representatives last.
pub fn distinct_view_classes(s: &RuleConfig, offsets: &CellSet) -> Result<Vec<ViewClass>> {
    let plan = ViewPlan::new(&[(s, offsets)])?;
    let mut seen: HashMap<LocalView, ()> = HashMap::new();
    let mut out = Vec::new();
    for g in plan.representatives() {
        let view = view_at(s, &g, offsets)?;
        if seen.insert(view.clone(), ()).is_none() {
            out.push(ViewClass {
                representative: g,
                view,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub(crate) enum FarReps {
    Uniform(Cell),
    Split { cut: Coord, left: Cell, right: Cell },
}

/// Cells at which the joint views of several configurations can differ from
/// their far-field views, plus one representative per far-field side.
#[derive(Clone, Debug)]
pub(crate) struct ViewPlan {
    region: Vec<Cell>,
    far: FarReps,
}

impl ViewPlan {
    pub(crate) fn new(inputs: &[(&RuleConfig, &CellSet)]) -> Result<Self> {
        let dim = inputs
            .first()
            .map(|(s, _)| s.dim())
            .ok_or_else(|| Error::InvalidParameter("view plan needs an input".into()))?;
        let mut region = Vec::new();
        let mut split: Option<(Coord, Coord, Coord)> = None;
        for (s, offsets) in inputs {
            same_dim(dim, s.dim())?;
            same_dim(dim, offsets.dim())?;
            for p in s.special_cells() {
                for e in offsets.iter() {
                    region.push(p.checked_sub(e)?);
                }
            }
            if let FarField::Split { cut, .. } = s.far_field() {
                let (lo, hi) = match offsets.bounds() {
                    Some((lo, hi)) => (
                        cut.checked_sub(hi.coords()[0]).ok_or(Error::Overflow)?,
                        cut.checked_add(1 - lo.coords()[0]).ok_or(Error::Overflow)?,
                    ),
                    None => (cut, cut + 1),
                };
                split = Some(match split {
                    None => (cut, lo, hi),
                    Some((c0, l0, h0)) => (c0, l0.min(lo), h0.max(hi)),
                });
            }
        }
        if let Some((cut, lo, hi)) = split {
            let lo = lo.min(cut) - 1;
            let hi = hi.max(cut + 1) + 1;
            region.extend((lo..=hi).map(Cell::from));
        }
        region.sort();
        region.dedup();
        let far = match split {
            Some((cut, ..)) => {
                let lo = region.first().expect("split region is non-empty").coords()[0];
                let hi = region.last().expect("split region is non-empty").coords()[0];
                FarReps::Split {
                    cut,
                    left: Cell::from(lo - 1),
                    right: Cell::from(hi + 1),
                }
            }
            None => {
                let mut far = vec![0; dim];
                if let Some(max0) = region.iter().map(|c| c.coords()[0]).max() {
                    far[0] = max0.checked_add(1).ok_or(Error::Overflow)?;
                }
                FarReps::Uniform(Cell::new(far))
            }
        };
        Ok(ViewPlan { region, far })
    }

    pub(crate) fn region(&self) -> &[Cell] {
        &self.region
    }

    pub(crate) fn far(&self) -> &FarReps {
        &self.far
    }

    pub(crate) fn far_cells(&self) -> Vec<Cell> {
        match &self.far {
            FarReps::Uniform(c) => vec![c.clone()],
            FarReps::Split { left, right, .. } => vec![left.clone(), right.clone()],
        }
    }

    pub(crate) fn representatives(&self) -> Vec<Cell> {
        let mut out = self.region.clone();
        out.extend(self.far_cells());
        out
    }
}

/// Builds the configuration whose rule at `g` is `rule_for(views of inputs at g)`.
///
/// The result is exact: away from the plan region every cell sees far-field
/// views, so its rule equals that of the matching far representative.
/// `rule_for` is evaluated once per distinct joint view.
pub(crate) fn derive_config(
    inputs: &[(&RuleConfig, &CellSet)],
    mut rule_for: impl FnMut(&Cell, &[LocalView]) -> Result<LocalRule>,
) -> Result<RuleConfig> {
    let plan = ViewPlan::new(inputs)?;
    let mut memo: HashMap<Vec<LocalView>, LocalRule> = HashMap::new();
    let mut rule_at = |g: &Cell| -> Result<LocalRule> {
        let views = inputs
            .iter()
            .map(|(s, e)| view_at(s, g, e))
            .collect::<Result<Vec<_>>>()?;
        if let Some(r) = memo.get(&views) {
            return Ok(r.clone());
        }
        let r = rule_for(g, &views)?;
        memo.insert(views, r.clone());
        Ok(r)
    };

    let all_constant = inputs
        .iter()
        .all(|(s, _)| matches!(s, RuleConfig::Constant { .. }));
    let any_box_list = inputs
        .iter()
        .any(|(s, _)| matches!(s, RuleConfig::BoxList { .. }));

    match plan.far().clone() {
        FarReps::Split { cut, left, right } => {
            let left_rule = rule_at(&left)?;
            let right_rule = rule_at(&right)?;
            let mut patch = Vec::new();
            for g in plan.region() {
                let r = rule_at(g)?;
                let default = if g.coords()[0] <= cut { &left_rule } else { &right_rule };
                if &r != default {
                    patch.push((g.clone(), r));
                }
            }
            RuleConfig::two_sided(left_rule, right_rule, cut, patch)
        }
        FarReps::Uniform(far) => {
            let background = rule_at(&far)?;
            if all_constant {
                return Ok(RuleConfig::constant(background));
            }
            let mut patch = Vec::new();
            for g in plan.region() {
                let r = rule_at(g)?;
                if r != background {
                    patch.push((g.clone(), r));
                }
            }
            if any_box_list {
                RuleConfig::box_list(background, Vec::new(), patch)
            } else {
                RuleConfig::patched(background, patch)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Cuboid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn mem() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    fn read(pos: usize) -> LocalRule {
        LocalRule::from_fn(2, mem(), move |n| n[pos]).unwrap()
    }

    fn xor01() -> LocalRule {
        LocalRule::from_fn(2, mem(), |n| (n[0] + n[1]) % 2).unwrap()
    }

    #[test]
    fn constant_has_one_class() {
        let s = RuleConfig::constant(read(2));
        let classes = distinct_view_classes(&s, &CellSet::interval(-3, 3)).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].representative, Cell::from(0));
    }

    #[test]
    fn patched_single_cell_has_two_classes() {
        let s = RuleConfig::patched(read(2), [(Cell::from(0), read(1))]).unwrap();
        let classes = distinct_view_classes(&s, &CellSet::from_ints([0])).unwrap();
        assert_eq!(classes.len(), 2);
    }

    // Oracle: brute-force the distinct views of s_k = (−k)s on E over a wide range of k.
    fn brute_classes(s: &RuleConfig, e: &CellSet, range: i64) -> usize {
        let mut seen = std::collections::HashSet::new();
        for k in -range..=range {
            seen.insert(view_at(s, &Cell::from(k), e).unwrap());
        }
        seen.len()
    }

    #[test]
    fn two_sided_classes_match_enumeration() {
        let s = RuleConfig::two_sided(read(2), xor01(), 0, []).unwrap();
        let e1 = CellSet::from_ints([0]);
        assert_eq!(brute_classes(&s, &e1, 50), 2);
        assert_eq!(distinct_view_classes(&s, &e1).unwrap().len(), 2);

        let e3 = CellSet::interval(-1, 1);
        let brute = brute_classes(&s, &e3, 50);
        // two constant views plus the |E|-1 mixed ones
        assert_eq!(brute, 4);
        assert!(brute <= e3.len() + 1);
        assert_eq!(distinct_view_classes(&s, &e3).unwrap().len(), brute);
    }

    #[test]
    fn patched_classes_bounded_by_interaction_range() {
        let s = RuleConfig::patched(read(2), [(Cell::from(0), read(0)), (Cell::from(2), xor01())]).unwrap();
        let e = CellSet::interval(-2, 2);
        let classes = distinct_view_classes(&s, &e).unwrap();
        // patch box [0,2] plus E has 7 cells
        assert!(classes.len() <= 7 + 1);
        assert_eq!(classes.len(), brute_classes(&s, &e, 40));
    }

    #[test]
    fn classes_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let configs = vec![
            RuleConfig::two_sided(read(2), xor01(), 3, [(Cell::from(-2), read(1))]).unwrap(),
            RuleConfig::patched(read(0), [(Cell::from(1), xor01()), (Cell::from(5), read(1))]).unwrap(),
            RuleConfig::box_list(
                read(1),
                vec![(Cuboid::interval(-6, -3).unwrap(), read(2)), (Cuboid::interval(4, 9).unwrap(), xor01())],
                [(Cell::from(0), read(0))],
            )
            .unwrap(),
        ];
        let e = CellSet::from_ints([-2, 0, 1]);
        for s in &configs {
            let classes = distinct_view_classes(s, &e).unwrap();
            for _ in 0..1000 {
                let g = Cell::from(rng.gen_range(-60..=60));
                let v = view_at(s, &g, &e).unwrap();
                assert!(classes.iter().any(|c| c.view == v), "{g} not represented");
            }
        }
    }

    #[test]
    fn derive_identity_reproduces_config() {
        let s = RuleConfig::two_sided(read(2), xor01(), 1, [(Cell::from(-3), read(0))]).unwrap();
        let e = CellSet::from_ints([0]);
        let d = derive_config(&[(&s, &e)], |_, v| Ok(v[0].rules()[0].clone())).unwrap();
        for g in -20..20 {
            assert_eq!(d.rule_at(&Cell::from(g)), s.rule_at(&Cell::from(g)));
        }
    }

    #[test]
    fn fingerprint_is_stable_and_discriminating() {
        let s = RuleConfig::patched(read(2), [(Cell::from(0), read(1))]).unwrap();
        let a = local_view(&s, &CellSet::interval(-1, 1)).unwrap();
        let b = local_view(&s, &CellSet::interval(5, 7)).unwrap();
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
