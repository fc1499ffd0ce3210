//! `report_v1` assembly.

use std::time::Duration;

use anuca::analysis::Certificate;
use anuca::{Caps, RuleConfig};
use serde_json::{json, Value};

pub const SCHEMA: &str = "report_v1";

pub struct Outcome {
    pub result: Value,
    pub summary: String,
    /// A refutation or a failed expectation was reported.
    pub refuted: bool,
}

pub struct Report {
    caps: Caps,
    seed: u64,
    verify: bool,
    config_hash: Option<String>,
    replayed: usize,
    failed: Vec<String>,
}

impl Report {
    pub fn new(caps: &Caps, seed: u64, verify: bool) -> Self {
        Report {
            caps: *caps,
            seed,
            verify,
            config_hash: None,
            replayed: 0,
            failed: Vec::new(),
        }
    }

    pub fn hash(&mut self, hash: &str) {
        self.config_hash = Some(hash.to_string());
    }

    /// Replays `cert` against `s` when `--verify` is on.
    pub fn replay(&mut self, s: &RuleConfig, cert: &Certificate) {
        if !self.verify {
            return;
        }
        self.replayed += 1;
        match cert.replay(s, &self.caps) {
            Ok(true) => {}
            Ok(false) => self.failed.push(format!("{} did not replay", cert.kind())),
            Err(e) => self.failed.push(format!("{} replay error: {e}", cert.kind())),
        }
    }

    /// Prints the report and returns the exit code.
    pub fn finish(self, outcome: Outcome, elapsed: Option<Duration>) -> u8 {
        let mut report = json!({
            "schema": SCHEMA,
            "command": command_echo(),
            "seed": self.seed,
            "caps": self.caps,
            "result": outcome.result,
        });
        if let Some(h) = &self.config_hash {
            report["config_hash"] = json!(h);
        }
        if self.verify {
            report["verification"] = json!({
                "replayed": self.replayed,
                "ok": self.failed.is_empty(),
                "failures": self.failed,
            });
        }
        if let Some(d) = elapsed {
            report["wall_time_ms"] = json!(d.as_millis() as u64);
        }
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
        eprintln!("{}", outcome.summary);
        if self.verify {
            eprintln!("verify: {} certificate(s) replayed, {} failed", self.replayed, self.failed.len());
            for f in &self.failed {
                eprintln!("verify: {f}");
            }
        }
        u8::from(outcome.refuted || !self.failed.is_empty())
    }
}

/// Command-line arguments without `--threads`, which never affects output.
fn command_echo() -> Vec<String> {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--threads" {
            args.next();
        } else if !a.starts_with("--threads=") {
            out.push(a);
        }
    }
    out
}
