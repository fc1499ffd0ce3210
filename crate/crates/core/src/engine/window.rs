use std::sync::Arc;

use crate::error::{Error, Result};
use crate::engine::Pattern;
use crate::rules::{RuleConfig, Symbol};
use crate::universe::{minkowski, same_dim, CellSet};

/// Evaluation of one output cell: a rule table and the positions of its
/// neighbourhood in an input buffer (memory order).
#[derive(Clone, Debug)]
pub(crate) struct OutputPlan {
    pub(crate) q: u8,
    pub(crate) table: Arc<[Symbol]>,
    pub(crate) inputs: Vec<usize>,
}

impl OutputPlan {
    #[inline]
    pub(crate) fn eval(&self, buf: &[Symbol]) -> Symbol {
        let q = self.q as usize;
        let idx = self
            .inputs
            .iter()
            .rev()
            .fold(0usize, |acc, &p| acc * q + buf[p] as usize);
        self.table[idx]
    }
}

/// Output plans for the cells of `window`, reading from a buffer laid out
/// over `input_support` in canonical order.
pub(crate) fn output_plans(
    s: &RuleConfig,
    window: &CellSet,
    input_support: &CellSet,
) -> Result<Vec<OutputPlan>> {
    same_dim(s.dim(), window.dim())?;
    let memory = s.memory();
    window
        .iter()
        .map(|g| {
            let rule = s.rule_at(g);
            let inputs = memory
                .iter()
                .map(|m| {
                    let c = g.checked_add(m)?;
                    input_support.index_of(&c).ok_or_else(|| {
                        Error::SupportMismatch(format!("input does not cover cell {c}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OutputPlan {
                q: s.alphabet(),
                table: rule.shared_table(),
                inputs,
            })
        })
        .collect()
}

fn evaluate(s: &RuleConfig, window: &CellSet, x: &Pattern) -> Result<Pattern> {
    x.check_alphabet(s.alphabet())?;
    let plans = output_plans(s, window, x.support())?;
    let symbols = plans.iter().map(|p| p.eval(x.symbols())).collect();
    Pattern::new(window.clone(), symbols)
}

/// The induced local map: `σ_s(x)|_E` from `x` over exactly `E + M`.
pub fn apply_window(s: &RuleConfig, window: &CellSet, x: &Pattern) -> Result<Pattern> {
    let needed = minkowski(window, s.memory())?;
    if x.support() != &needed {
        return Err(Error::SupportMismatch(format!(
            "input support has {} cells, E + M has {}",
            x.support().len(),
            needed.len()
        )));
    }
    evaluate(s, window, x)
}

/// Like [`apply_window`] but accepts any input support containing `E + M`.
pub fn apply_window_on(s: &RuleConfig, window: &CellSet, x: &Pattern) -> Result<Pattern> {
    evaluate(s, window, x)
}

/// Evaluates on `E`, reading `background` wherever `x` is undefined.
pub fn apply_window_with_background(
    s: &RuleConfig,
    window: &CellSet,
    x: &Pattern,
    background: Symbol,
) -> Result<Pattern> {
    let needed = minkowski(window, s.memory())?;
    let full = Pattern::from_fn(needed, |c| x.get(c).unwrap_or(background));
    evaluate(s, window, &full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::LocalRule;
    use crate::universe::{Cell, Cuboid};

    fn m3() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    #[test]
    fn shift_window() {
        // f(u,v,w) = w
        let shift = RuleConfig::constant(LocalRule::from_fn(3, m3(), |n| n[2]).unwrap());
        let x = Pattern::from_packed(&Cuboid::interval(-1, 3).unwrap(), "01201").unwrap();
        let y = apply_window(&shift, &CellSet::interval(0, 2), &x).unwrap();
        assert_eq!(y.packed(), "201");
    }

    #[test]
    fn identity_window() {
        let id = RuleConfig::constant(
            LocalRule::from_fn(2, Arc::new(CellSet::from_ints([0])), |n| n[0]).unwrap(),
        );
        let e = CellSet::from_ints([-3, 0, 4]);
        let x = Pattern::new(e.clone(), vec![1, 0, 1]).unwrap();
        assert_eq!(apply_window(&id, &e, &x).unwrap(), x);
    }

    #[test]
    fn support_mismatch() {
        let shift = RuleConfig::constant(LocalRule::from_fn(2, m3(), |n| n[2]).unwrap());
        let x = Pattern::from_packed(&Cuboid::interval(0, 2).unwrap(), "010").unwrap();
        assert!(matches!(
            apply_window(&shift, &CellSet::interval(0, 2), &x),
            Err(Error::SupportMismatch(_))
        ));
        let y = apply_window_with_background(&shift, &CellSet::interval(0, 2), &x, 1).unwrap();
        assert_eq!(y.packed(), "101");
        assert_eq!(y.get(&Cell::from(2)), Some(1));
    }
}
