use rayon::prelude::*;

use crate::caps::{within_cap, Caps};
use crate::codes::{decode_lex, lex_weights};
use crate::engine::{OutputPlan, Pattern};
use crate::error::{Error, Result};
use crate::rules::{RuleConfig, Symbol};
use crate::universe::{box_reduce, Cell, Cuboid};

/// `x̃(g) = x(k_g)`: the K-periodic lift of a pattern over the box `K`.
pub fn lift_eval(x: &Pattern, k: &Cuboid, g: &Cell) -> Result<Symbol> {
    let reduced = box_reduce(g, k)?;
    x.get(&reduced)
        .ok_or_else(|| Error::SupportMismatch("pattern does not cover the box".into()))
}

/// The periodization map `Ψ_{K,s}(x) = σ_s(x̃)|_K`.
#[derive(Clone, Debug)]
pub struct PeriodizedMap {
    cuboid: Cuboid,
    q: u8,
    plans: Vec<OutputPlan>,
    forward: Option<Vec<u64>>,
}

impl PeriodizedMap {
    pub fn new(s: &RuleConfig, k: &Cuboid) -> Result<Self> {
        crate::universe::same_dim(s.dim(), k.dim())?;
        let cells = k.cells();
        let plans = cells
            .iter()
            .map(|g| {
                let inputs = s
                    .memory()
                    .iter()
                    .map(|m| {
                        let c = box_reduce(&g.checked_add(m)?, k)?;
                        Ok(k.index_of(&c).expect("reduced cell lies in the box"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(OutputPlan {
                    q: s.alphabet(),
                    table: s.rule_at(g).shared_table(),
                    inputs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PeriodizedMap {
            cuboid: k.clone(),
            q: s.alphabet(),
            plans,
            forward: None,
        })
    }

    pub fn cuboid(&self) -> &Cuboid {
        &self.cuboid
    }

    pub fn cells(&self) -> usize {
        self.plans.len()
    }

    pub fn alphabet(&self) -> u8 {
        self.q
    }

    pub(crate) fn apply_symbols(&self, x: &[Symbol], out: &mut [Symbol]) {
        for (slot, plan) in out.iter_mut().zip(&self.plans) {
            *slot = plan.eval(x);
        }
    }

    pub fn apply(&self, x: &Pattern) -> Result<Pattern> {
        if x.support() != &self.cuboid.cells() {
            return Err(Error::SupportMismatch("pattern must cover exactly the box".into()));
        }
        x.check_alphabet(self.q)?;
        let mut out = vec![0; self.plans.len()];
        self.apply_symbols(x.symbols(), &mut out);
        Pattern::new(self.cuboid.cells(), out)
    }

    /// Image of a lexicographic code.
    pub fn apply_code(&self, code: u64) -> u64 {
        let n = self.plans.len();
        let mut x = vec![0; n];
        decode_lex(code, self.q, &mut x);
        let w = lex_weights(self.q, n);
        self.plans
            .iter()
            .zip(&w)
            .map(|(p, w)| p.eval(&x) as u64 * w)
            .sum()
    }

    /// Materializes the whole map on lexicographic codes.
    pub fn materialize(&mut self, caps: &Caps) -> Result<&[u64]> {
        if self.forward.is_none() {
            let total = within_cap(self.q as u64, self.plans.len(), caps.materialize, "periodization table")?;
            let n = self.plans.len();
            let w = lex_weights(self.q, n);
            let mut table = vec![0u64; total as usize];
            const CHUNK: usize = 1 << 10;
            table.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, out)| {
                let mut x = vec![0; n];
                decode_lex((ci * CHUNK) as u64, self.q, &mut x);
                for slot in out.iter_mut() {
                    *slot = self.plans.iter().zip(&w).map(|(p, w)| p.eval(&x) as u64 * w).sum();
                    for d in x.iter_mut().rev() {
                        *d += 1;
                        if *d < self.q {
                            break;
                        }
                        *d = 0;
                    }
                }
            });
            self.forward = Some(table);
        }
        Ok(self.forward.as_deref().expect("just materialized"))
    }

    pub fn forward_table(&self) -> Option<&[u64]> {
        self.forward.as_deref()
    }
}

pub fn apply_periodized(s: &RuleConfig, k: &Cuboid, x: &Pattern) -> Result<Pattern> {
    PeriodizedMap::new(s, k)?.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::LocalRule;
    use crate::universe::CellSet;
    use std::sync::Arc;

    fn m3() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    #[test]
    fn lift_examples() {
        let k = Cuboid::interval(0, 2).unwrap();
        let x = Pattern::from_packed(&k, "012").unwrap();
        assert_eq!(lift_eval(&x, &k, &Cell::from(1)).unwrap(), 1);
        assert_eq!(lift_eval(&x, &k, &Cell::from(4)).unwrap(), 1);
        assert_eq!(lift_eval(&x, &k, &Cell::from(-1)).unwrap(), 2);
    }

    #[test]
    fn shift_is_cyclic() {
        let shift = RuleConfig::constant(LocalRule::from_fn(3, m3(), |n| n[2]).unwrap());
        let k = Cuboid::interval(0, 2).unwrap();
        let x = Pattern::from_packed(&k, "012").unwrap();
        assert_eq!(apply_periodized(&shift, &k, &x).unwrap().packed(), "120");
    }

    #[test]
    fn xor_period_one_collapses() {
        let xor = RuleConfig::constant(LocalRule::from_fn(2, m3(), |n| (n[0] + n[1]) % 2).unwrap());
        let k = Cuboid::interval(0, 0).unwrap();
        for (input, expect) in [("0", "0"), ("1", "0")] {
            let x = Pattern::from_packed(&k, input).unwrap();
            assert_eq!(apply_periodized(&xor, &k, &x).unwrap().packed(), expect);
        }
    }

    #[test]
    fn materialized_matches_pointwise() {
        let rule = LocalRule::from_fn(2, m3(), |n| (n[0] * n[2] + n[1]) % 2).unwrap();
        let s = RuleConfig::patched(rule.clone(), [(Cell::from(1), LocalRule::from_fn(2, m3(), |n| n[0]).unwrap())]).unwrap();
        let k = Cuboid::interval(-2, 3).unwrap();
        let mut map = PeriodizedMap::new(&s, &k).unwrap();
        let table = map.materialize(&Caps::default()).unwrap().to_vec();
        for code in 0..64u64 {
            assert_eq!(table[code as usize], map.apply_code(code));
        }
    }
}
