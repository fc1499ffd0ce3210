use std::ops::ControlFlow;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{ball, enumerator, Certificate};
use crate::caps::{within_cap, Caps};
use crate::codes::lex_code;
use crate::engine::{apply_window, compose, Pattern};
use crate::error::{Error, Result};
use crate::rules::file::RuleFile;
use crate::rules::{derive_config, LocalRule, RuleConfig, Symbol};
use crate::universe::{minkowski, translate, Cell, CellSet, Coord, Cuboid};

const UNSEEN: Symbol = Symbol::MAX;

/// For inputs over `g + N + M`, the map from images on `g + N` to `x(g)`,
/// indexed by lexicographic image code (`Symbol::MAX` for unseen images).
/// `None` if two inputs with equal images disagree at `g`.
pub fn determination_table(
    s: &RuleConfig,
    g: &Cell,
    offsets: &CellSet,
    caps: &Caps,
) -> Result<Option<Vec<Symbol>>> {
    let q = s.alphabet();
    let window = translate(offsets, g)?;
    let support = minkowski(&window, s.memory())?;
    let size = within_cap(q as u64, window.len(), caps.table, "inverse table")?;
    let Some(pos) = support.index_of(g) else {
        return Ok((q == 1).then(|| vec![0; size as usize]));
    };
    let e = enumerator(
        s,
        &window,
        &support,
        &support,
        vec![0; support.len()],
        caps.enumeration,
        "determining radius search",
    )?;
    let weight = (q as u64).pow((support.len() - 1 - pos) as u32);
    let mut table = vec![UNSEEN; size as usize];
    let conflict = e.scan(|code, img| {
        let xg = ((code / weight) % q as u64) as Symbol;
        let slot = &mut table[img as usize];
        if *slot == UNSEEN {
            *slot = xg;
        } else if *slot != xg {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(conflict.is_none().then_some(table))
}

/// Smallest `r <= max_radius` such that `σ_s(x)` on `g + B_r` determines `x(g)`.
pub fn min_determining_radius(
    s: &RuleConfig,
    g: &Cell,
    max_radius: u32,
    caps: &Caps,
) -> Result<Option<u32>> {
    for r in 0..=max_radius {
        let n = ball(s.dim(), r)?;
        match determination_table(s, g, &n, caps) {
            Ok(Some(_)) => return Ok(Some(r)),
            Ok(None) => {}
            Err(e @ Error::CapExceeded { .. }) => return Err(e.with_completed(r.checked_sub(1))),
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Builds a left inverse `q` with memory inside `B_r` for the smallest
/// `r <= max_radius` where every view class determines its preimage symbol.
/// Off-image neighbourhoods map to symbol 0. The result is checked exactly
/// before it is returned.
pub fn synthesize_inverse(s: &RuleConfig, max_radius: u32, caps: &Caps) -> Result<Certificate> {
    let q = s.alphabet();
    for r in 0..=max_radius {
        let n = Arc::new(ball(s.dim(), r)?);
        let mut undetermined = false;
        let derived = derive_config(&[(s, n.as_ref())], |g, _| {
            match determination_table(s, g, &n, caps)? {
                Some(table) => LocalRule::from_fn(q, n.clone(), |y| match table[lex_code(y, q) as usize] {
                    UNSEEN => 0,
                    v => v,
                }),
                None => {
                    undetermined = true;
                    Err(Error::Verification("undetermined".into()))
                }
            }
        });
        let inverse = match derived {
            Ok(c) => c,
            Err(_) if undetermined => continue,
            Err(e @ Error::CapExceeded { .. }) => return Err(e.with_completed(r.checked_sub(1))),
            Err(e) => return Err(e),
        };
        let inverse = prune_memory(&inverse)?;
        if !composite_is_identity(&inverse, s, caps)?
            || !verify_left_inverse(&inverse, s, 100, r + 2, 0, caps)?
        {
            return Err(Error::Verification(
                "synthesized inverse is not a left inverse".into(),
            ));
        }
        return Ok(Certificate::InverseSynthesized {
            radius: r,
            memory: inverse.memory().as_ref().clone(),
            inverse: RuleFile::from_config(&inverse, &[]),
        });
    }
    Ok(Certificate::Inconclusive {
        search: "inverse with memory [-r, r]^d".into(),
        bound: max_radius,
        notes: Vec::new(),
    })
}

/// Drops memory offsets no rule depends on and normalizes the patch.
fn prune_memory(c: &RuleConfig) -> Result<RuleConfig> {
    let mut keep: Vec<usize> = c.rules().iter().flat_map(|r| r.dependent_positions()).collect();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        let zero = Cell::zero(c.dim());
        keep.push(c.memory().index_of(&zero).unwrap_or(0));
    }
    let cells = keep.iter().map(|&i| c.memory().cells()[i].clone()).collect();
    let memory = Arc::new(CellSet::new(c.dim(), cells)?);
    let pruned = c.map_rules(|r| r.restrict(&keep, memory.clone()))?;
    let origin = CellSet::singleton(Cell::zero(c.dim()));
    derive_config(&[(&pruned, &origin)], |_, v| Ok(v[0].rules()[0].clone()))
}

/// Exact test that `σ_t ∘ σ_s` is the identity: every rule of the composite
/// must be the projection onto offset 0.
pub fn composite_is_identity(t: &RuleConfig, s: &RuleConfig, caps: &Caps) -> Result<bool> {
    let c = compose(t, s, caps)?;
    let Some(zero) = c.memory().index_of(&Cell::zero(c.dim())) else {
        return Ok(c.alphabet() == 1);
    };
    Ok(c.rules().iter().all(|r| {
        let mut ok = true;
        let mut probe = vec![0; r.memory().len()];
        for (i, &out) in r.table().iter().enumerate() {
            let mut rest = i;
            for d in probe.iter_mut() {
                *d = (rest % c.alphabet() as usize) as Symbol;
                rest /= c.alphabet() as usize;
            }
            ok &= out == probe[zero];
        }
        ok
    }))
}

/// Checks `σ_t ∘ σ_s = Id` on `trials` random windows of radius
/// `window_radius`, centred around the cells where either configuration is
/// special.
pub fn verify_left_inverse(
    t: &RuleConfig,
    s: &RuleConfig,
    trials: u32,
    window_radius: u32,
    seed: u64,
    caps: &Caps,
) -> Result<bool> {
    let c = compose(t, s, caps)?;
    let d = c.dim();
    let q = c.alphabet();
    let (lo, hi) = interest_bounds(&[&c, s, t]);
    let pad = window_radius as Coord + c.memory().radius() + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let centre: Vec<Coord> = (0..d).map(|j| rng.gen_range(lo[j] - pad..=hi[j] + pad)).collect();
        let centre = Cell::new(centre);
        let w = Cuboid::centered(d, window_radius as Coord)?.translate(&centre)?.cells();
        let support = minkowski(&w, c.memory())?;
        let x = Pattern::from_fn(support, |_| rng.gen_range(0..q));
        if apply_window(&c, &w, &x)? != x.restrict(&w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn interest_bounds(configs: &[&RuleConfig]) -> (Vec<Coord>, Vec<Coord>) {
    let d = configs[0].dim();
    let mut cells: Vec<Cell> = vec![Cell::zero(d)];
    for c in configs {
        cells.extend(c.special_cells());
        if let RuleConfig::TwoSided1D { cut, .. } = c {
            cells.push(Cell::from(*cut));
            cells.push(Cell::from(*cut + 1));
        }
    }
    let lo = (0..d).map(|j| cells.iter().map(|c| c.coords()[j]).min().unwrap_or(0)).collect();
    let hi = (0..d).map(|j| cells.iter().map(|c| c.coords()[j]).max().unwrap_or(0)).collect();
    (lo, hi)
}
