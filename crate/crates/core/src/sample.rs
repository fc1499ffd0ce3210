//! Random rules, configurations and patterns for property tests.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::Pattern;
use crate::rules::{LocalRule, RuleConfig, Symbol};
use crate::universe::{Cell, CellSet, Coord, Cuboid};

fn random_cell<R: Rng>(rng: &mut R, d: usize, r: Coord) -> Cell {
    Cell::new((0..d).map(|_| rng.gen_range(-r..=r)).collect())
}

/// `1..=max_len` distinct offsets from `[-1, 1]^d`.
pub fn random_memory<R: Rng>(rng: &mut R, d: usize, max_len: usize) -> Arc<CellSet> {
    let mut pool = Cuboid::centered(d, 1).expect("valid cube").cells().cells().to_vec();
    pool.shuffle(rng);
    let len = rng.gen_range(1..=max_len.min(pool.len()));
    pool.truncate(len);
    Arc::new(CellSet::new(d, pool).expect("cells share a dimension"))
}

pub fn random_rule<R: Rng>(rng: &mut R, q: u8, memory: Arc<CellSet>) -> LocalRule {
    LocalRule::from_fn(q, memory, |_| rng.gen_range(0..q)).expect("small random rule")
}

/// A configuration of any variant supported in dimension `memory.dim()`,
/// with special cells inside `[-3, 3]^d`.
pub fn random_config<R: Rng>(rng: &mut R, q: u8, memory: Arc<CellSet>) -> RuleConfig {
    let d = memory.dim();
    let mut rule = |rng: &mut R| random_rule(rng, q, memory.clone());
    let patch = |rng: &mut R, rule: &mut dyn FnMut(&mut R) -> LocalRule| -> Vec<(Cell, LocalRule)> {
        (0..rng.gen_range(0..=3))
            .map(|_| (random_cell(rng, d, 3), rule(rng)))
            .collect()
    };
    let variant = rng.gen_range(0..4);
    match variant {
        0 => RuleConfig::constant(rule(rng)),
        2 if d == 1 => {
            let (l, r) = (rule(rng), rule(rng));
            let cut = rng.gen_range(-2..=2);
            let p = patch(rng, &mut rule);
            RuleConfig::two_sided(l, r, cut, p).expect("valid random config")
        }
        3 => {
            let bg = rule(rng);
            let boxes = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let lo = random_cell(rng, d, 3);
                    let hi = Cell::new(lo.coords().iter().map(|&c| c + rng.gen_range(0..=2)).collect());
                    (Cuboid::new(lo, hi).expect("lo <= hi"), rule(rng))
                })
                .collect();
            let p = patch(rng, &mut rule);
            RuleConfig::box_list(bg, boxes, p).expect("valid random config")
        }
        _ => {
            let bg = rule(rng);
            let p = patch(rng, &mut rule);
            RuleConfig::patched(bg, p).expect("valid random config")
        }
    }
}

pub fn random_pattern<R: Rng>(rng: &mut R, support: CellSet, q: u8) -> Pattern {
    Pattern::from_fn(support, |_| rng.gen_range(0..q))
}

fn permutation<R: Rng>(rng: &mut R, q: u8) -> Vec<Symbol> {
    let mut p: Vec<Symbol> = (0..q).collect();
    p.shuffle(rng);
    p
}

/// A patched configuration `s(g): x ↦ π_g(x(g + m))` together with its
/// inverse `t(g): y ↦ π_{g-m}^{-1}(y(g - m))`, so that `σ_t ∘ σ_s = Id`.
/// `s` may carry extra memory offsets it ignores.
pub fn invertible_pair<R: Rng>(rng: &mut R, d: usize, q: u8) -> (RuleConfig, RuleConfig) {
    let memory = random_memory(rng, d, 3);
    let mi = rng.gen_range(0..memory.len());
    let m = memory.cells()[mi].clone();
    let back = Arc::new(CellSet::singleton(m.checked_neg().expect("small offset")));
    let forward_rule = |p: &[Symbol]| {
        let p = p.to_vec();
        LocalRule::from_fn(q, memory.clone(), move |n| p[n[mi] as usize]).expect("small rule")
    };
    let inverse_rule = |p: &[Symbol]| {
        let mut inv = vec![0; p.len()];
        for (a, &b) in p.iter().enumerate() {
            inv[b as usize] = a as Symbol;
        }
        LocalRule::from_fn(q, back.clone(), move |n| inv[n[0] as usize]).expect("small rule")
    };
    let bg = permutation(rng, q);
    let cells: Vec<(Cell, Vec<Symbol>)> = (0..rng.gen_range(0..=3))
        .map(|_| (random_cell(rng, d, 2), permutation(rng, q)))
        .collect();
    let s = RuleConfig::patched(
        forward_rule(&bg),
        cells.iter().map(|(c, p)| (c.clone(), forward_rule(p))),
    )
    .expect("valid config");
    let t = RuleConfig::patched(
        inverse_rule(&bg),
        cells
            .iter()
            .map(|(c, p)| (c.checked_add(&m).expect("small offset"), inverse_rule(p))),
    )
    .expect("valid config");
    (s, t)
}
