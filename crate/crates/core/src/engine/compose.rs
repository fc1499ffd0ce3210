use std::sync::Arc;

use crate::caps::{within_cap, Caps};
use crate::error::{Error, Result};
use crate::rules::{derive_config, LocalRule, RuleConfig};
use crate::universe::{minkowski, same_dim, Cell, CellSet};

/// `q` with `σ_q = σ_s ∘ σ_t`, over the memory `M + N`.
///
/// The composite rule at `g` is `s(g)` applied to the outputs of `t` on
/// `g + M`; one table is materialized per distinct joint view.
pub fn compose(s: &RuleConfig, t: &RuleConfig, caps: &Caps) -> Result<RuleConfig> {
    same_dim(s.dim(), t.dim())?;
    if s.alphabet() != t.alphabet() {
        return Err(Error::InvalidParameter(format!(
            "alphabets differ: {} vs {}",
            s.alphabet(),
            t.alphabet()
        )));
    }
    let q = s.alphabet();
    let m = s.memory().clone();
    let n = t.memory().clone();
    let mn = Arc::new(minkowski(&m, &n)?);
    within_cap(q as u64, mn.len(), caps.table, "composite rule table")?;

    // gather[j][k]: position in MN of m_j + n_k
    let gather: Vec<Vec<usize>> = m
        .iter()
        .map(|mj| {
            n.iter()
                .map(|nk| {
                    let c = mj.checked_add(nk)?;
                    Ok(mn.index_of(&c).expect("sumset contains every sum"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let origin = CellSet::singleton(Cell::zero(s.dim()));
    derive_config(&[(s, &origin), (t, &m)], |_, views| {
        let outer = &views[0].rules()[0];
        let inner = views[1].rules();
        composite_rule(q, mn.clone(), outer, inner, &gather)
    })
}

fn composite_rule(
    q: u8,
    memory: Arc<CellSet>,
    outer: &LocalRule,
    inner: &[LocalRule],
    gather: &[Vec<usize>],
) -> Result<LocalRule> {
    let mut mid = vec![0u8; inner.len()];
    let mut nb = Vec::new();
    LocalRule::from_fn(q, memory, |x| {
        for (j, rule) in inner.iter().enumerate() {
            nb.clear();
            nb.extend(gather[j].iter().map(|&p| x[p]));
            mid[j] = rule.apply(&nb);
        }
        outer.apply(&mid)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{apply_window, Pattern};
    use crate::universe::Cuboid;

    fn m3() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    #[test]
    fn shift_squared_reads_offset_two() {
        let shift = RuleConfig::constant(LocalRule::from_fn(2, m3(), |n| n[2]).unwrap());
        let c = compose(&shift, &shift, &Caps::default()).unwrap();
        assert_eq!(c.variant_name(), "constant");
        assert_eq!(c.memory().as_ref(), &CellSet::interval(-2, 2));
        let expected = LocalRule::from_fn(2, Arc::new(CellSet::interval(-2, 2)), |n| n[4]).unwrap();
        assert_eq!(c.rule_at(&Cell::from(0)), &expected);
    }

    #[test]
    fn identity_is_neutral() {
        let id = RuleConfig::constant(
            LocalRule::from_fn(2, Arc::new(CellSet::from_ints([0])), |n| n[0]).unwrap(),
        );
        let xor = LocalRule::from_fn(2, m3(), |n| (n[0] + n[1]) % 2).unwrap();
        let f = LocalRule::from_fn(2, m3(), |n| n[2]).unwrap();
        let s = RuleConfig::two_sided(f, xor, 0, []).unwrap();
        let c = compose(&id, &s, &Caps::default()).unwrap();
        for lo in -6..3 {
            let e = CellSet::interval(lo, lo + 4);
            let k = Cuboid::interval(lo - 1, lo + 5).unwrap();
            for code in [0u64, 5, 77, 101, 127] {
                let mut digits = vec![0u8; 7];
                crate::codes::decode_lex(code, 2, &mut digits);
                let x = Pattern::new(k.cells(), digits).unwrap();
                assert_eq!(apply_window(&c, &e, &x).unwrap(), apply_window(&s, &e, &x).unwrap());
            }
        }
    }

    #[test]
    fn table_cap_is_enforced() {
        let big = Arc::new(CellSet::interval(-3, 3));
        let r = RuleConfig::constant(LocalRule::from_fn(2, big, |n| n[0]).unwrap());
        let err = compose(&r, &r, &Caps::uniform(1 << 10)).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
