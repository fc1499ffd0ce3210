use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::analysis::{enumerator, wrap_compatibility, Certificate};
use crate::caps::{checked_pow, Caps};
use crate::codes::decode_lex;
use crate::engine::{Pattern, PeriodizedMap};
use crate::error::{Error, Result};
use crate::rules::config::FarField;
use crate::rules::file::RuleFile;
use crate::rules::{orbit_closure, LocalRule, RuleConfig, Symbol};
use crate::universe::{box_reduce, minkowski, Cuboid};

/// Searches for two distinct configurations with the same image.
///
/// For each radius `r`, first asymptotic pairs on `[-r, r]^d` over every
/// background in `backgrounds`, then periodic pairs on the box `[0, r]^d`
/// when the configuration wraps compatibly around it.
pub fn collision_search(
    s: &RuleConfig,
    max_radius: u32,
    backgrounds: &[Symbol],
    caps: &Caps,
) -> Result<Certificate> {
    if let Some(b) = backgrounds.iter().find(|&&b| b >= s.alphabet()) {
        return Err(Error::InvalidParameter(format!(
            "background {b} outside the alphabet of size {}",
            s.alphabet()
        )));
    }
    let mut notes = Vec::new();
    for r in 0..=max_radius {
        let mut step = || -> Result<Option<Certificate>> {
            for &b in backgrounds {
                if let Some(c) = asymptotic_collision(s, r, b, caps)? {
                    return Ok(Some(c));
                }
            }
            periodic_collision(s, r, caps, &mut notes)
        };
        match step() {
            Ok(Some(c)) => return Ok(c),
            Ok(None) => {}
            Err(e @ Error::CapExceeded { .. }) => return Err(e.with_completed(r.checked_sub(1))),
            Err(e) => return Err(e),
        }
    }
    Ok(Certificate::Inconclusive {
        search: "asymptotic and periodic collisions".into(),
        bound: max_radius,
        notes,
    })
}

fn asymptotic_collision(s: &RuleConfig, r: u32, b: Symbol, caps: &Caps) -> Result<Option<Certificate>> {
    let window = Cuboid::centered(s.dim(), r as i64)?;
    let w = window.cells();
    let out = minkowski(&w, &s.memory().negated()?)?;
    let support = minkowski(&out, s.memory())?;
    let e = enumerator(
        s,
        &out,
        &support,
        &w,
        vec![b; support.len()],
        caps.enumeration,
        "asymptotic collision search",
    )?;
    let mut seen: HashMap<u64, u64> = HashMap::new();
    let hit = e.scan(|code, img| match seen.get(&img) {
        Some(&first) => ControlFlow::Break((first, code, img)),
        None => {
            seen.insert(img, code);
            ControlFlow::Continue(())
        }
    });
    let Some((a, c, img)) = hit else {
        return Ok(None);
    };
    let mut image = vec![0; out.len()];
    decode_lex(img, s.alphabet(), &mut image);
    Ok(Some(Certificate::CollisionAsymptotic {
        radius: r,
        background: b,
        window,
        left: Pattern::new(w.clone(), e.digits(a))?,
        right: Pattern::new(w, e.digits(c))?,
        image: Pattern::new(out, image)?,
    }))
}

fn periodic_collision(
    s: &RuleConfig,
    r: u32,
    caps: &Caps,
    notes: &mut Vec<String>,
) -> Result<Option<Certificate>> {
    let k = Cuboid::cube(s.dim(), 0, r as i64)?;
    if !wrap_compatibility(s, &k, s.memory())? {
        return Ok(None);
    }
    let n = k.cells().len();
    match checked_pow(s.alphabet() as u64, n) {
        Some(v) if v <= caps.materialize => {}
        _ => {
            notes.push(format!("periodic box {k} skipped: {}^{n} exceeds the cap", s.alphabet()));
            return Ok(None);
        }
    }
    let mut psi = PeriodizedMap::new(s, &k)?;
    let table = psi.materialize(caps)?.to_vec();
    let mut first = vec![u64::MAX; table.len()];
    let q = s.alphabet();
    let (mut x, mut y) = (vec![0; n], vec![0; n]);
    for (code, &img) in table.iter().enumerate() {
        let prev = first[img as usize];
        if prev == u64::MAX {
            first[img as usize] = code as u64;
            continue;
        }
        decode_lex(prev, q, &mut x);
        decode_lex(code as u64, q, &mut y);
        if lifts_collide(s, &k, &x, &y)? {
            let mut image = vec![0; n];
            decode_lex(img, q, &mut image);
            return Ok(Some(Certificate::CollisionPeriodic {
                period_box: k.clone(),
                left: Pattern::new(k.cells(), x)?,
                right: Pattern::new(k.cells(), y)?,
                image: Pattern::new(k.cells(), image)?,
            }));
        }
    }
    Ok(None)
}

/// Whether the `K`-periodic lifts of `x` and `y` have equal images under
/// `σ_s` everywhere. Each residue class of `K` meets the far-field rules and
/// finitely many special cells, so finitely many rule evaluations decide it.
pub(crate) fn lifts_collide(s: &RuleConfig, k: &Cuboid, x: &[Symbol], y: &[Symbol]) -> Result<bool> {
    let cells = k.cells();
    let mut rules: Vec<Vec<&LocalRule>> = vec![Vec::new(); cells.len()];
    let far: Vec<&LocalRule> = match s.far_field() {
        FarField::Uniform(r) => vec![r],
        FarField::Split { left, right, .. } => vec![left, right],
    };
    for list in rules.iter_mut() {
        list.extend(far.iter().copied());
    }
    for c in s.special_cells() {
        let i = k.index_of(&box_reduce(&c, k)?).expect("reduced cell lies in the box");
        let r = s.rule_at(&c);
        if !rules[i].contains(&r) {
            rules[i].push(r);
        }
    }
    let (mut nx, mut ny) = (Vec::new(), Vec::new());
    for (i, g) in cells.iter().enumerate() {
        nx.clear();
        ny.clear();
        for m in s.memory().iter() {
            let j = k
                .index_of(&box_reduce(&g.checked_add(m)?, k)?)
                .expect("reduced cell lies in the box");
            nx.push(x[j]);
            ny.push(y[j]);
        }
        if rules[i].iter().any(|r| r.apply(&nx) != r.apply(&ny)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StableVerdict {
    Refuted,
    Unrefuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentativeResult {
    pub name: String,
    /// The representative the certificate refers to.
    pub config: RuleFile,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableInjectivityReport {
    pub verdict: StableVerdict,
    pub bound: u32,
    pub representatives: Vec<RepresentativeResult>,
}

impl StableInjectivityReport {
    /// The first refuting representative, if any.
    pub fn refutation(&self) -> Option<&RepresentativeResult> {
        self.representatives.iter().find(|r| r.certificate.is_refutation())
    }
}

/// Runs [`collision_search`] on `s` and on each limit point of its orbit
/// closure. Translates of `s` are injective exactly when `s` is.
pub fn stable_injectivity_check(
    s: &RuleConfig,
    max_radius: u32,
    caps: &Caps,
) -> Result<StableInjectivityReport> {
    let closure = orbit_closure(s)?;
    let names: Vec<&str> = match s {
        RuleConfig::TwoSided1D { .. } => vec!["left limit", "right limit"],
        _ => vec!["background limit"],
    };
    let mut reps = vec![("s".to_string(), s.clone())];
    for (i, p) in closure.limit_points.into_iter().enumerate() {
        if &p != s {
            reps.push((names.get(i).copied().unwrap_or("limit").to_string(), p));
        }
    }
    let backgrounds: Vec<Symbol> = (0..s.alphabet()).collect();
    let mut representatives = Vec::new();
    for (name, p) in reps {
        let certificate = collision_search(&p, max_radius, &backgrounds, caps)?;
        representatives.push(RepresentativeResult {
            name,
            config: RuleFile::from_config(&p, &[]),
            certificate,
        });
    }
    let verdict = if representatives.iter().any(|r| r.certificate.is_refutation()) {
        StableVerdict::Refuted
    } else {
        StableVerdict::Unrefuted
    };
    Ok(StableInjectivityReport {
        verdict,
        bound: max_radius,
        representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::{Cell, CellSet};
    use std::sync::Arc;

    fn m3() -> Arc<CellSet> {
        Arc::new(CellSet::interval(-1, 1))
    }

    fn rule(f: impl Fn(&[u8]) -> u8) -> LocalRule {
        LocalRule::from_fn(2, m3(), f).unwrap()
    }

    #[test]
    fn xor_collides_at_period_one() {
        let q = RuleConfig::constant(rule(|n| (n[0] + n[1]) % 2));
        let c = collision_search(&q, 3, &[0, 1], &Caps::default()).unwrap();
        match &c {
            Certificate::CollisionPeriodic {
                period_box,
                left,
                right,
                image,
            } => {
                assert_eq!(period_box.volume(), Some(1));
                assert_eq!((left.packed().as_str(), right.packed().as_str()), ("0", "1"));
                assert_eq!(image.packed(), "0");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(c.replay(&q, &Caps::default()).unwrap());
    }

    #[test]
    fn majority_collides_asymptotically() {
        let maj = RuleConfig::constant(rule(|n| u8::from(n.iter().sum::<u8>() >= 2)));
        let c = collision_search(&maj, 2, &[0, 1], &Caps::default()).unwrap();
        match &c {
            Certificate::CollisionAsymptotic { radius, background, left, right, image, .. } => {
                assert_eq!((*radius, *background), (0, 0));
                assert_eq!((left.packed().as_str(), right.packed().as_str()), ("0", "1"));
                assert!(image.symbols().iter().all(|&v| v == 0));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(c.replay(&maj, &Caps::default()).unwrap());
    }

    #[test]
    fn identity_and_shift_are_inconclusive() {
        let shift = RuleConfig::constant(rule(|n| n[2]));
        assert!(collision_search(&shift, 5, &[0, 1], &Caps::default())
            .unwrap()
            .is_inconclusive());
        let rep = stable_injectivity_check(&shift, 4, &Caps::default()).unwrap();
        assert_eq!(rep.verdict, StableVerdict::Unrefuted);
        assert_eq!(rep.representatives.len(), 1);
    }

    #[test]
    fn lift_check_sees_far_rules() {
        // left half identity, right half constant 0: period-1 lifts 0 and 1
        // agree under the right rule only
        let id = rule(|n| n[1]);
        let zero = rule(|_| 0);
        let s = RuleConfig::two_sided(id, zero.clone(), 0, Vec::<(Cell, LocalRule)>::new()).unwrap();
        let k = Cuboid::interval(0, 0).unwrap();
        assert!(!lifts_collide(&s, &k, &[0], &[1]).unwrap());
        let z = RuleConfig::constant(zero);
        assert!(lifts_collide(&z, &k, &[0], &[1]).unwrap());
    }
}
