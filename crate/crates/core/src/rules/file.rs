//! Rule-file JSON schema.
//!
//! ```json
//! {"dim": 1, "alphabet": 2, "memory": [[-1], [0], [1]],
//!  "rules": {"f": "00001111", "g": "01010101"},
//!  "config": {"variant": "two_sided_1d", "left": "f", "right": "g", "cut": 0, "patch": []}}
//! ```
//!
//! Digit `i` of a rule string is the image of the pattern whose symbol at the
//! `j`-th memory offset is the `j`-th base-q digit of `i` (least significant
//! digit = offset index 0).

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rules::{LocalRule, RuleConfig};
use crate::universe::{Cell, CellSet, Coord, Cuboid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub dim: usize,
    pub alphabet: u8,
    pub memory: Vec<Vec<Coord>>,
    pub rules: BTreeMap<String, String>,
    pub config: ConfigSpec,
}

pub type PatchSpec = Vec<(Vec<Coord>, String)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", deny_unknown_fields)]
pub enum ConfigSpec {
    #[serde(rename = "constant")]
    Constant { rule: String },
    #[serde(rename = "patched")]
    Patched {
        background: String,
        #[serde(default)]
        patch: PatchSpec,
    },
    #[serde(rename = "two_sided_1d")]
    TwoSided1D {
        left: String,
        right: String,
        cut: Coord,
        #[serde(default)]
        patch: PatchSpec,
    },
    #[serde(rename = "box_list")]
    BoxList {
        background: String,
        boxes: Vec<BoxSpec>,
        #[serde(default)]
        patch: PatchSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<Coord>,
    pub hi: Vec<Coord>,
    pub rule: String,
}

impl RuleFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::schema(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rule files serialize")
    }

    /// SHA-256 of the compact canonical serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("rule files serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn to_config(&self) -> Result<RuleConfig> {
        if let Some(v) = self.version {
            if v != SCHEMA_VERSION {
                return Err(Error::schema("version", format!("unsupported schema version {v}")));
            }
        }
        if self.dim == 0 {
            return Err(Error::schema("dim", "must be at least 1"));
        }
        if !(2..=36).contains(&self.alphabet) {
            return Err(Error::schema("alphabet", "must lie in 2..=36"));
        }
        let mut cells = Vec::with_capacity(self.memory.len());
        for (i, m) in self.memory.iter().enumerate() {
            if m.len() != self.dim {
                return Err(Error::schema(
                    format!("memory[{i}]"),
                    format!("has {} coordinates, expected {}", m.len(), self.dim),
                ));
            }
            cells.push(Cell::new(m.clone()));
        }
        if cells.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::schema(
                "memory",
                "offsets must be distinct and in canonical (lexicographic) order",
            ));
        }
        let memory = Arc::new(CellSet::new(self.dim, cells)?);

        let mut rules = BTreeMap::new();
        for (name, digits) in &self.rules {
            let rule = LocalRule::from_digit_string(self.alphabet, memory.clone(), digits)
                .map_err(|e| Error::schema(format!("rules.{name}"), e.to_string()))?;
            rules.insert(name.as_str(), rule);
        }
        let lookup = |field: &str, name: &str| -> Result<LocalRule> {
            rules
                .get(name)
                .cloned()
                .ok_or_else(|| Error::schema(field, format!("unknown rule `{name}`")))
        };
        let cell = |field: &str, coords: &[Coord]| -> Result<Cell> {
            if coords.len() != self.dim {
                return Err(Error::schema(
                    field,
                    format!("cell has {} coordinates, expected {}", coords.len(), self.dim),
                ));
            }
            Ok(Cell::new(coords.to_vec()))
        };
        let patch = |spec: &PatchSpec| -> Result<Vec<(Cell, LocalRule)>> {
            let mut out: Vec<(Cell, LocalRule)> = Vec::with_capacity(spec.len());
            for (i, (coords, name)) in spec.iter().enumerate() {
                let field = format!("config.patch[{i}]");
                let c = cell(&field, coords)?;
                if out.iter().any(|(d, _)| *d == c) {
                    return Err(Error::schema(field, format!("duplicate cell {c}")));
                }
                out.push((c, lookup(&field, name)?));
            }
            Ok(out)
        };
        let config = match &self.config {
            ConfigSpec::Constant { rule } => RuleConfig::constant(lookup("config.rule", rule)?),
            ConfigSpec::Patched { background, patch: p } => {
                RuleConfig::patched(lookup("config.background", background)?, patch(p)?)?
            }
            ConfigSpec::TwoSided1D {
                left,
                right,
                cut,
                patch: p,
            } => {
                if self.dim != 1 {
                    return Err(Error::schema("config.variant", "two_sided_1d requires dim 1"));
                }
                RuleConfig::two_sided(
                    lookup("config.left", left)?,
                    lookup("config.right", right)?,
                    *cut,
                    patch(p)?,
                )?
            }
            ConfigSpec::BoxList {
                background,
                boxes,
                patch: p,
            } => {
                let mut bs = Vec::with_capacity(boxes.len());
                for (i, b) in boxes.iter().enumerate() {
                    let field = format!("config.boxes[{i}]");
                    let cuboid = Cuboid::new(cell(&field, &b.lo)?, cell(&field, &b.hi)?)
                        .map_err(|e| Error::schema(field.clone(), e.to_string()))?;
                    bs.push((cuboid, lookup(&field, &b.rule)?));
                }
                RuleConfig::box_list(lookup("config.background", background)?, bs, patch(p)?)?
            }
        };
        Ok(config)
    }

    /// Serializes a configuration. Rules equal to one of `names` keep that
    /// name; the others are called `r0`, `r1`, ... in order of appearance.
    pub fn from_config(config: &RuleConfig, names: &[(String, LocalRule)]) -> RuleFile {
        let mut rules: BTreeMap<String, String> = BTreeMap::new();
        let mut assigned: Vec<(LocalRule, String)> = Vec::new();
        let mut fresh = 0usize;
        let mut name_of = |r: &LocalRule| -> String {
            if let Some((_, n)) = assigned.iter().find(|(a, _)| a == r) {
                return n.clone();
            }
            let n = match names.iter().find(|(_, nr)| nr == r) {
                Some((n, _)) => n.clone(),
                None => loop {
                    let candidate = format!("r{fresh}");
                    fresh += 1;
                    if !names.iter().any(|(n, _)| *n == candidate) {
                        break candidate;
                    }
                },
            };
            rules.insert(n.clone(), r.digit_string());
            assigned.push((r.clone(), n.clone()));
            n
        };
        fn patch_spec(
            p: &crate::rules::config::Patch,
            name_of: &mut impl FnMut(&LocalRule) -> String,
        ) -> PatchSpec {
            p.iter()
                .map(|(c, r)| (c.coords().to_vec(), name_of(r)))
                .collect()
        }
        let config_spec = match config {
            RuleConfig::Constant { rule } => ConfigSpec::Constant {
                rule: name_of(rule),
            },
            RuleConfig::Patched { background, patch } => {
                let background = name_of(background);
                ConfigSpec::Patched {
                    background,
                    patch: patch_spec(patch, &mut name_of),
                }
            }
            RuleConfig::TwoSided1D {
                left,
                right,
                cut,
                patch,
            } => {
                let left = name_of(left);
                let right = name_of(right);
                ConfigSpec::TwoSided1D {
                    left,
                    right,
                    cut: *cut,
                    patch: patch_spec(patch, &mut name_of),
                }
            }
            RuleConfig::BoxList {
                background,
                boxes,
                patch,
            } => {
                let background = name_of(background);
                let boxes = boxes
                    .iter()
                    .map(|(b, r)| BoxSpec {
                        lo: b.lo().coords().to_vec(),
                        hi: b.hi().coords().to_vec(),
                        rule: name_of(r),
                    })
                    .collect();
                ConfigSpec::BoxList {
                    background,
                    boxes,
                    patch: patch_spec(patch, &mut name_of),
                }
            }
        };
        RuleFile {
            version: None,
            dim: config.dim(),
            alphabet: config.alphabet(),
            memory: config
                .memory()
                .iter()
                .map(|c| c.coords().to_vec())
                .collect(),
            rules,
            config: config_spec,
        }
    }
}

/// Reads and validates a rule file.
pub fn parse_rule_file(path: &Path) -> Result<RuleConfig> {
    let text = std::fs::read_to_string(path)?;
    RuleFile::parse(&text)?.to_config()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX: &str = r#"{"dim":1,"alphabet":2,"memory":[[-1],[0],[1]],
        "rules":{"f":"00001111","g":"01010101","h":"00110011"},
        "config":{"variant":"two_sided_1d","left":"f","right":"g","cut":0,"patch":[[[0],"h"]]}}"#;

    #[test]
    fn parses_two_sided() {
        let c = RuleFile::parse(EX).unwrap().to_config().unwrap();
        assert_eq!(c.variant_name(), "two_sided_1d");
        assert_eq!(c.rule_at(&Cell::from(0)).digit_string(), "00110011");
        assert_eq!(c.rule_at(&Cell::from(-4)).digit_string(), "00001111");
        assert_eq!(c.rule_at(&Cell::from(4)).digit_string(), "01010101");
    }

    #[test]
    fn wrong_length_names_the_rule() {
        let bad = EX.replace("\"g\":\"01010101\"", "\"g\":\"0101010\"");
        let err = RuleFile::parse(&bad).unwrap().to_config().unwrap_err();
        match err {
            Error::Schema { field, .. } => assert_eq!(field, "rules.g"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_symbol_rejected() {
        let bad = EX.replace("\"g\":\"01010101\"", "\"g\":\"01010102\"");
        assert!(matches!(
            RuleFile::parse(&bad).unwrap().to_config(),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn unknown_variant_rejected() {
        let bad = EX.replace("two_sided_1d", "spiral");
        assert!(matches!(RuleFile::parse(&bad), Err(Error::Schema { .. })));
    }

    #[test]
    fn inconsistent_dimension_rejected() {
        let bad = EX.replace("[[0],\"h\"]", "[[0,1],\"h\"]");
        let err = RuleFile::parse(&bad).unwrap().to_config().unwrap_err();
        assert!(matches!(err, Error::Schema { ref field, .. } if field == "config.patch[0]"));
        let bad = EX.replace("\"memory\":[[-1],[0],[1]]", "\"memory\":[[0],[-1],[1]]");
        assert!(RuleFile::parse(&bad).unwrap().to_config().is_err());
    }

    #[test]
    fn round_trip_keeps_names() {
        let file = RuleFile::parse(EX).unwrap();
        let c = file.to_config().unwrap();
        let names: Vec<(String, LocalRule)> = ["f", "g", "h"]
            .iter()
            .map(|n| {
                (
                    n.to_string(),
                    LocalRule::from_digit_string(2, c.memory().clone(), &file.rules[*n]).unwrap(),
                )
            })
            .collect();
        let back = RuleFile::from_config(&c, &names);
        assert_eq!(back, file);
        assert_eq!(back.hash(), file.hash());
    }
}
