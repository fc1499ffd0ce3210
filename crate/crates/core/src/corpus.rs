//! Built-in configurations with their expected verdicts, and the
//! bounded-singularity generator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    collision_search, stable_injectivity_check, surjectivity_deficit, synthesize_inverse,
    uniform_post_surjectivity_radius, Certificate, StableVerdict,
};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rules::file::RuleFile;
use crate::rules::{LocalRule, RuleConfig, Symbol};
use crate::universe::{Cell, CellSet, Coord, Cuboid};

pub const BUILTIN_NAMES: [&str; 12] = [
    "ex1_s", "ex1_p", "ex1_q", "ex2_s", "ex2_s_k", "ex3_s", "ex3_p", "ex3_q", "shift", "identity",
    "xor2", "majority3",
];

/// Cut position of the `ex2_s_k` builtin.
pub const EX2_K: Coord = 2;

/// An expected analysis outcome. `operation` names a CLI command,
/// `verdict` a certificate kind (or `refuted` / `unrefuted`, or `radius`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub operation: String,
    pub bound: u32,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    pub note: String,
}

fn expect(operation: &str, bound: u32, verdict: &str, radius: Option<u32>, note: &str) -> Expectation {
    Expectation {
        operation: operation.into(),
        bound,
        verdict: verdict.into(),
        radius,
        note: note.into(),
    }
}

#[derive(Clone, Debug)]
pub struct NamedExample {
    pub name: String,
    pub config: RuleConfig,
    /// Names used for the rules in the fixture file.
    pub rule_names: Vec<(String, LocalRule)>,
    pub expected: Vec<Expectation>,
}

impl NamedExample {
    pub fn rule_file(&self) -> RuleFile {
        let mut f = RuleFile::from_config(&self.config, &self.rule_names);
        f.version = Some(crate::rules::file::SCHEMA_VERSION);
        f
    }
}

fn m3() -> Arc<CellSet> {
    Arc::new(CellSet::interval(-1, 1))
}

fn m2() -> Arc<CellSet> {
    Arc::new(CellSet::interval(-1, 0))
}

fn binary(memory: Arc<CellSet>, f: impl Fn(&[Symbol]) -> Symbol) -> LocalRule {
    LocalRule::from_fn(2, memory, f).expect("builtin rules are valid")
}

/// `(u, v, w) ↦ w`.
pub fn read_right() -> LocalRule {
    binary(m3(), |n| n[2])
}

/// `(u, v, w) ↦ u`.
pub fn read_left() -> LocalRule {
    binary(m3(), |n| n[0])
}

/// `(u, v, w) ↦ v`.
pub fn read_centre() -> LocalRule {
    binary(m3(), |n| n[1])
}

/// `(u, v, w) ↦ u + v mod 2`.
pub fn xor_left() -> LocalRule {
    binary(m3(), |n| (n[0] + n[1]) % 2)
}

/// Two-sided configuration over `{-1, 0}`: `v` on cells `<= k`, `u + v mod 2` beyond.
pub fn ex2_s_k(k: Coord) -> RuleConfig {
    let f = binary(m2(), |n| n[1]);
    let g = binary(m2(), |n| (n[0] + n[1]) % 2);
    RuleConfig::two_sided(f, g, k, Vec::<(Cell, LocalRule)>::new()).expect("valid builtin")
}

fn no_patch() -> Vec<(Cell, LocalRule)> {
    Vec::new()
}

pub fn builtin(name: &str) -> Result<NamedExample> {
    let named = |pairs: &[(&str, LocalRule)]| -> Vec<(String, LocalRule)> {
        pairs.iter().map(|(n, r)| (n.to_string(), r.clone())).collect()
    };
    let (config, rule_names, expected) = match name {
        "ex1_s" => (
            RuleConfig::two_sided(read_right(), xor_left(), 0, no_patch())?,
            named(&[("f", read_right()), ("g", xor_left())]),
            vec![
                expect("collisions", 6, "inconclusive", None, "injective: right half is recovered cell by cell from the left"),
                expect("stable-injectivity", 4, "refuted", None, "right limit u + v identifies 0^Z and 1^Z"),
                expect("surjectivity", 2, "missing-image-pattern", Some(1), "y(1) = y(-1) + y(0) on [-1, 1]"),
                expect("inverse", 5, "inconclusive", None, "x(n) needs y on [0, n]"),
            ],
        ),
        "ex1_p" => (
            RuleConfig::constant(read_right()),
            named(&[("f", read_right())]),
            vec![
                expect("collisions", 6, "inconclusive", None, "shift"),
                expect("inverse", 3, "inverse-synthesized", Some(1), "x(n) = y(n - 1)"),
            ],
        ),
        "ex1_q" => (
            RuleConfig::constant(xor_left()),
            named(&[("g", xor_left())]),
            vec![expect("collisions", 3, "collision-periodic", None, "0^Z and 1^Z both map to 0^Z")],
        ),
        "ex2_s" | "ex2_s_k" => {
            let c = if name == "ex2_s" { ex2_s_k(0) } else { ex2_s_k(EX2_K) };
            let f = binary(m2(), |n| n[1]);
            let g = binary(m2(), |n| (n[0] + n[1]) % 2);
            (
                c,
                named(&[("f", f), ("g", g)]),
                vec![
                    expect("collisions", 6, "inconclusive", None, "bijective"),
                    expect("stable-injectivity", 4, "refuted", None, "right limit u + v is not injective"),
                    expect("surjectivity", 4, "inconclusive", None, "bijective"),
                    expect("inverse", 4, "inconclusive", None, "x(n) depends on y(cut), ..., y(n)"),
                ],
            )
        }
        "ex3_s" => (
            RuleConfig::two_sided(read_right(), read_left(), 0, [(Cell::from(0), read_centre())])?,
            named(&[("f", read_right()), ("g", read_left()), ("h", read_centre())]),
            vec![
                expect("collisions", 6, "inconclusive", None, "x(n) = y(n - 1) left of 0, y(n + 1) right of 0"),
                expect("stable-injectivity", 6, "unrefuted", None, "both limits are shifts"),
                expect("surjectivity", 3, "missing-image-pattern", Some(1), "y(-1) = y(0) = y(1)"),
                expect("inverse", 3, "inverse-synthesized", Some(1), "memory {-1, 0, 1}"),
            ],
        ),
        "ex3_p" => (
            RuleConfig::constant(read_right()),
            named(&[("f", read_right())]),
            vec![expect("inverse", 3, "inverse-synthesized", Some(1), "x(n) = y(n - 1)")],
        ),
        "ex3_q" => (
            RuleConfig::constant(read_left()),
            named(&[("g", read_left())]),
            vec![expect("inverse", 3, "inverse-synthesized", Some(1), "x(n) = y(n + 1)")],
        ),
        "shift" => (
            RuleConfig::constant(read_right()),
            named(&[("shift", read_right())]),
            vec![
                expect("collisions", 6, "inconclusive", None, "injective"),
                expect("surjectivity", 4, "inconclusive", None, "surjective"),
                expect("inverse", 3, "inverse-synthesized", Some(1), "read-left inverse"),
                expect("post-surjectivity", 3, "radius", Some(1), "flip x(g + 1)"),
            ],
        ),
        "identity" => {
            let id = binary(Arc::new(CellSet::from_ints([0])), |n| n[0]);
            (
                RuleConfig::constant(id.clone()),
                named(&[("id", id)]),
                vec![
                    expect("collisions", 6, "inconclusive", None, "injective"),
                    expect("inverse", 3, "inverse-synthesized", Some(0), "memory {0}"),
                    expect("post-surjectivity", 3, "radius", Some(0), "flip x(g)"),
                ],
            )
        }
        "xor2" => {
            let xor = binary(m2(), |n| (n[0] + n[1]) % 2);
            (
                RuleConfig::constant(xor.clone()),
                named(&[("xor", xor)]),
                vec![
                    expect("collisions", 3, "collision-periodic", None, "0^Z and 1^Z both map to 0^Z"),
                    expect("post-surjectivity", 3, "none", None, "single flips need one-sided infinite changes"),
                ],
            )
        }
        "majority3" => {
            let maj = binary(m3(), |n| u8::from(n.iter().sum::<u8>() >= 2));
            (
                RuleConfig::constant(maj.clone()),
                named(&[("majority", maj)]),
                vec![expect("collisions", 2, "collision-asymptotic", Some(0), "a lone 1 dies")],
            )
        }
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    Ok(NamedExample {
        name: name.to_string(),
        config,
        rule_names,
        expected,
    })
}

/// Outcome of re-running one expectation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub expectation: Expectation,
    pub actual_verdict: String,
    pub actual_radius: Option<u32>,
    pub pass: bool,
    /// Certificates produced, each paired with the configuration it refers to.
    pub certificates: Vec<(RuleFile, Certificate)>,
}

/// Post-surjectivity trials used by [`check_expectation`].
pub const CORPUS_LIFT_TRIALS: u32 = 8;

pub fn check_expectation(s: &RuleConfig, e: &Expectation, caps: &Caps) -> Result<ExpectationResult> {
    let backgrounds: Vec<Symbol> = (0..s.alphabet()).collect();
    let radius_of = |c: &Certificate| -> Option<u32> {
        use Certificate::*;
        match c {
            CollisionAsymptotic { radius, .. }
            | MissingImagePattern { radius, .. }
            | InverseSynthesized { radius, .. } => Some(*radius),
            _ => None,
        }
    };
    let own = |c: Certificate| vec![(RuleFile::from_config(s, &[]), c)];
    let mut certificates = Vec::new();
    let (verdict, radius) = match e.operation.as_str() {
        "collisions" => {
            let c = collision_search(s, e.bound, &backgrounds, caps)?;
            let out = (c.kind().to_string(), radius_of(&c));
            certificates = own(c);
            out
        }
        "surjectivity" => {
            let c = surjectivity_deficit(s, e.bound, caps)?;
            let out = (c.kind().to_string(), radius_of(&c));
            certificates = own(c);
            out
        }
        "inverse" => {
            let c = synthesize_inverse(s, e.bound, caps)?;
            let out = (c.kind().to_string(), radius_of(&c));
            certificates = own(c);
            out
        }
        "stable-injectivity" => {
            let rep = stable_injectivity_check(s, e.bound, caps)?;
            let v = match rep.verdict {
                StableVerdict::Refuted => "refuted",
                StableVerdict::Unrefuted => "unrefuted",
            };
            certificates = rep
                .representatives
                .into_iter()
                .map(|r| (r.config, r.certificate))
                .collect();
            (v.to_string(), None)
        }
        "post-surjectivity" => {
            match uniform_post_surjectivity_radius(s, &[], e.bound, CORPUS_LIFT_TRIALS, 0, caps)? {
                Some(r) => ("radius".to_string(), Some(r)),
                None => ("none".to_string(), None),
            }
        }
        other => return Err(Error::InvalidParameter(format!("unknown operation `{other}`"))),
    };
    let pass = verdict == e.verdict && (e.radius.is_none() || e.radius == radius);
    Ok(ExpectationResult {
        expectation: e.clone(),
        actual_verdict: verdict,
        actual_radius: radius,
        pass,
        certificates,
    })
}

/// A box-list configuration equal to `ring_rule` on the rings
/// `R_n = { a : g(n) <= |a_j| <= f(n) for all j }` for `n < n_boxes` and to
/// `gap_rule` elsewhere. Each ring is stored as `2^d` boxes.
pub fn bounded_singularity_config(
    d: usize,
    f_seq: &[Coord],
    g_seq: &[Coord],
    ring_rule: LocalRule,
    gap_rule: LocalRule,
    n_boxes: usize,
) -> Result<RuleConfig> {
    let bad = |m: String| Err(Error::InvalidParameter(m));
    if d == 0 || d > 16 {
        return bad(format!("dimension {d} out of range"));
    }
    if n_boxes == 0 || f_seq.len() < n_boxes || g_seq.len() < n_boxes {
        return bad("sequences must have at least n_boxes >= 1 terms".into());
    }
    for n in 0..n_boxes {
        if g_seq[n] < 0 || g_seq[n] > f_seq[n] {
            return bad(format!("need 0 <= g({n}) <= f({n})"));
        }
        if n > 0 {
            if f_seq[n] <= f_seq[n - 1] || g_seq[n] <= g_seq[n - 1] {
                return bad("sequences must be strictly increasing".into());
            }
            if f_seq[n] - g_seq[n] <= f_seq[n - 1] - g_seq[n - 1] {
                return bad("ring thickness f(n) - g(n) must strictly increase".into());
            }
            if g_seq[n] <= f_seq[n - 1] {
                return bad(format!("rings {} and {n} overlap", n - 1));
            }
        }
    }
    let mut boxes = Vec::new();
    for n in 0..n_boxes {
        for signs in 0..(1u32 << d) {
            let (lo, hi): (Vec<Coord>, Vec<Coord>) = (0..d)
                .map(|j| {
                    if signs >> j & 1 == 0 {
                        (g_seq[n], f_seq[n])
                    } else {
                        (-f_seq[n], -g_seq[n])
                    }
                })
                .unzip();
            boxes.push((Cuboid::new(Cell::new(lo), Cell::new(hi))?, ring_rule.clone()));
        }
    }
    RuleConfig::box_list(gap_rule, boxes, Vec::<(Cell, LocalRule)>::new())
}
