use std::ops::ControlFlow;

use crate::analysis::{ball, enumerator, Certificate};
use crate::caps::{within_cap, Caps};
use crate::codes::{decode_lex, lex_code};
use crate::engine::Pattern;
use crate::error::{Error, Result};
use crate::rules::RuleConfig;
use crate::universe::{minkowski, same_dim, CellSet};

/// `Γ_Ω = f⁺(A^{ΩM})`, the set of patterns on `Ω` that occur in the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageWindow {
    window: CellSet,
    alphabet: u8,
    present: Vec<bool>,
}

impl ImageWindow {
    pub fn window(&self) -> &CellSet {
        &self.window
    }

    /// Number of patterns in the image.
    pub fn len(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Size of `A^Ω`.
    pub fn universe_size(&self) -> usize {
        self.present.len()
    }

    pub fn is_full(&self) -> bool {
        self.present.iter().all(|&p| p)
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        p.support() == &self.window
            && p.symbols().iter().all(|&s| s < self.alphabet)
            && self.present[lex_code(p.symbols(), self.alphabet) as usize]
    }

    fn pattern(&self, code: usize) -> Pattern {
        let mut symbols = vec![0; self.window.len()];
        decode_lex(code as u64, self.alphabet, &mut symbols);
        Pattern::new(self.window.clone(), symbols).expect("decoded pattern fits the window")
    }

    /// Image patterns in lexicographic order.
    pub fn patterns(&self) -> Vec<Pattern> {
        (0..self.present.len())
            .filter(|&c| self.present[c])
            .map(|c| self.pattern(c))
            .collect()
    }

    /// The lexicographically first pattern outside the image.
    pub fn first_missing(&self) -> Option<Pattern> {
        self.present.iter().position(|&p| !p).map(|c| self.pattern(c))
    }
}

pub fn image_window(s: &RuleConfig, window: &CellSet, caps: &Caps) -> Result<ImageWindow> {
    same_dim(s.dim(), window.dim())?;
    let q = s.alphabet();
    let support = minkowski(window, s.memory())?;
    let size = within_cap(q as u64, window.len(), caps.enumeration, "image window")?;
    let e = enumerator(
        s,
        window,
        &support,
        &support,
        vec![0; support.len()],
        caps.enumeration,
        "image window inputs",
    )?;
    let mut present = vec![false; size as usize];
    e.scan::<()>(|_, img| {
        present[img as usize] = true;
        ControlFlow::Continue(())
    });
    Ok(ImageWindow {
        window: window.clone(),
        alphabet: q,
        present,
    })
}

/// Whether some input over `ΩM` maps onto `p` (early exit).
pub fn pattern_in_image(s: &RuleConfig, p: &Pattern, caps: &Caps) -> Result<bool> {
    let window = p.support();
    same_dim(s.dim(), window.dim())?;
    p.check_alphabet(s.alphabet())?;
    let support = minkowski(window, s.memory())?;
    let e = enumerator(
        s,
        window,
        &support,
        &support,
        vec![0; support.len()],
        caps.enumeration,
        "image window inputs",
    )?;
    let target = lex_code(p.symbols(), s.alphabet());
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

/// Scans `Ω = [-r, r]^d` for `r = 0..=max_radius` and reports the first
/// pattern missing from the image. Never certifies surjectivity.
pub fn surjectivity_deficit(s: &RuleConfig, max_radius: u32, caps: &Caps) -> Result<Certificate> {
    for r in 0..=max_radius {
        let window = ball(s.dim(), r)?;
        let img = match image_window(s, &window, caps) {
            Ok(img) => img,
            Err(e @ Error::CapExceeded { .. }) => return Err(e.with_completed(r.checked_sub(1))),
            Err(e) => return Err(e),
        };
        if let Some(pattern) = img.first_missing() {
            return Ok(Certificate::MissingImagePattern { radius: r, pattern });
        }
    }
    Ok(Certificate::Inconclusive {
        search: "surjectivity deficit on [-r, r]^d".into(),
        bound: max_radius,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::LocalRule;
    use crate::universe::Cell;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn m3() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    fn ex3() -> RuleConfig {
        let f = LocalRule::from_fn(2, m3(), |n| n[2]).unwrap();
        let g = LocalRule::from_fn(2, m3(), |n| n[0]).unwrap();
        let h = LocalRule::from_fn(2, m3(), |n| n[1]).unwrap();
        RuleConfig::two_sided(f, g, 0, [(Cell::from(0), h)]).unwrap()
    }

    /// Direct oracle: evaluate every input cell by cell.
    fn oracle_image(s: &RuleConfig, lo: i64, hi: i64) -> BTreeSet<Vec<u8>> {
        let q = s.alphabet() as u64;
        let n = (hi - lo + 3) as u32;
        let mut out = BTreeSet::new();
        for code in 0..q.pow(n) {
            let x: Vec<u8> = (0..n).map(|i| ((code / q.pow(i)) % q) as u8).collect();
            let at = |c: i64| x[(c - lo + 1) as usize];
            let y: Vec<u8> = (lo..=hi)
                .map(|g| s.rule_at(&Cell::from(g)).apply(&[at(g - 1), at(g), at(g + 1)]))
                .collect();
            out.insert(y);
        }
        out
    }

    #[test]
    fn ex3_image_is_constrained_triple() {
        let s = ex3();
        let img = image_window(&s, &CellSet::interval(-4, 4), &Caps::default()).unwrap();
        assert_eq!(img.len(), 1 << 7);
        for p in img.patterns() {
            let y = p.symbols();
            assert!(y[3] == y[4] && y[4] == y[5]);
        }
        let oracle = oracle_image(&s, -4, 4);
        let got: BTreeSet<Vec<u8>> = img.patterns().iter().map(|p| p.symbols().to_vec()).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn identity_is_full_and_deficit_inconclusive() {
        let id = RuleConfig::constant(
            LocalRule::from_fn(3, Arc::new(CellSet::from_ints([0])), |n| n[0]).unwrap(),
        );
        let img = image_window(&id, &CellSet::interval(0, 3), &Caps::default()).unwrap();
        assert!(img.is_full());
        assert!(surjectivity_deficit(&id, 3, &Caps::default()).unwrap().is_inconclusive());
    }

    #[test]
    fn ex3_deficit_at_radius_one() {
        let c = surjectivity_deficit(&ex3(), 4, &Caps::default()).unwrap();
        match &c {
            Certificate::MissingImagePattern { radius, pattern } => {
                assert_eq!(*radius, 1);
                assert_eq!(pattern.packed(), "001");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(c.replay(&ex3(), &Caps::default()).unwrap());
    }

    #[test]
    fn cap_reports_completed_radius() {
        let err = surjectivity_deficit(
            &RuleConfig::constant(LocalRule::from_fn(2, m3(), |n| n[2]).unwrap()),
            10,
            &Caps::uniform(1 << 8),
        )
        .unwrap_err();
        match err {
            Error::CapExceeded { completed, .. } => assert_eq!(completed, Some(2)),
            other => panic!("unexpected {other}"),
        }
    }
}
